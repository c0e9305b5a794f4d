#include "skyreview/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace skyreview {

namespace detail {
extern const char* kDefaultLexiconTsv;  // generated from data/lexicon.tsv
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

}  // namespace

void Lexicon::validate() const {
    for (const auto& neg : negators) {
        if (entries.count(neg))
            throw SentimentError("token is both lexicon entry and negator: " + neg);
    }
    for (const auto& [tok, pol] : entries) {
        if (pol < -1.0 || pol > 1.0)
            throw SentimentError("polarity out of [-1,1] for token: " + tok);
    }
}

Lexicon parse_lexicon(const std::string& text) {
    Lexicon lex;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw SentimentError("lexicon line " + std::to_string(line_no) + ": no tab");
        std::string token = line.substr(0, tab);
        std::string val = line.substr(tab + 1);
        if (val == "NEG") {
            lex.negators.insert(token);
        } else {
            lex.entries[token] = std::stod(val);
        }
    }
    lex.validate();
    return lex;
}

Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SentimentError("cannot open lexicon " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lexicon(buf.str());
}

const Lexicon& default_lexicon() {
    static const Lexicon lex = parse_lexicon(detail::kDefaultLexiconTsv);
    return lex;
}

SentimentScore score(const std::string& text, const Lexicon& lex) {
    SentimentScore s;
    const auto tokens = tokenize(text);
    s.n_tokens = tokens.size();

    long last_negator = -1000000;
    double sum = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (lex.negators.count(tokens[i])) {
            last_negator = static_cast<long>(i);
            continue;
        }
        auto it = lex.entries.find(tokens[i]);
        if (it == lex.entries.end()) continue;
        double polarity = it->second;
        if (static_cast<long>(i) - last_negator <= lex.negation_window) polarity = -polarity;
        sum += polarity;
        ++s.n_hits;
    }
    if (s.n_hits > 0)
        s.value = std::clamp(sum / static_cast<double>(s.n_hits), -1.0, 1.0);
    return s;
}

std::uint64_t RemoteScorer::content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RemoteScorer::RemoteScorer(std::string endpoint, std::string cache_path)
    : cache_path_(std::move(cache_path)) {
    std::string rest = endpoint;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    std::size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
    } else {
        host_ = hostport.substr(0, colon);
        port_ = std::stoi(hostport.substr(colon + 1));
    }
    if (host_.empty()) throw SentimentError("bad endpoint: " + endpoint);

    std::ifstream in(cache_path_);
    std::string line;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        cache_[j.at("hash").get<std::uint64_t>()] = j.at("score").get<double>();
    }
}

SentimentScore RemoteScorer::operator()(const std::string& text) {
    const std::uint64_t h = content_hash(text);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(h);
        if (it != cache_.end())
            return {it->second, tokenize(text).size(), 1};
    }

    httplib::Client cli(host_, port_);
    nlohmann::json req;
    req["text"] = text;
    auto res = cli.Post(path_, req.dump(), "application/json");
    if (!res)
        throw SentimentError("sentiment endpoint unreachable and text not cached");
    if (res->status != 200)
        throw SentimentError("sentiment endpoint returned status " +
                             std::to_string(res->status));
    double raw;
    try {
        auto j = nlohmann::json::parse(res->body);
        raw = j.at("score").get<double>();
    } catch (const std::exception& e) {
        throw SentimentError(std::string("malformed sentiment reply: ") + e.what());
    }
    double value = std::clamp(raw, -1.0, 1.0);
    if (value != raw)
        std::cerr << "warning: remote sentiment " << raw << " clamped to " << value << "\n";

    {
        std::lock_guard lock(mu_);
        ++network_calls_;
        cache_[h] = value;
        std::ofstream out(cache_path_, std::ios::app);
        nlohmann::ordered_json entry;
        entry["hash"] = h;
        entry["score"] = value;
        out << entry.dump() << '\n';
    }
    return {value, tokenize(text).size(), 1};
}

Dataset annotate(const Dataset& d, const Scorer& scorer, bool force) {
    Dataset out = d;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        auto& rec = out.records[i];
        if (rec.sentiment && !force) continue;
        try {
            rec.sentiment = std::clamp(scorer(rec.text).value, -1.0, 1.0);
        } catch (const std::exception& e) {
            throw SentimentError("record " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace skyreview
