#include "skyreview/stc.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace skyreview::stc {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",     "about", "above", "after",  "again",  "all",    "also",  "am",
        "an",    "and",   "any",   "are",    "as",     "at",     "be",    "because",
        "been",  "before","being", "below",  "between","both",   "but",   "by",
        "can",   "could", "did",   "do",     "does",   "doing",  "down",  "during",
        "each",  "few",   "for",   "from",   "further","had",    "has",   "have",
        "having","he",    "her",   "here",   "hers",   "him",    "his",   "how",
        "i",     "if",    "in",    "into",   "is",     "it",     "its",   "itself",
        "just",  "me",    "more",  "most",   "my",     "myself", "of",    "off",
        "on",    "once",  "only",  "or",     "other",  "our",    "ours",  "out",
        "over",  "own",   "s",     "same",   "she",    "should", "so",    "some",
        "such",  "t",     "than",  "that",   "the",    "their",  "theirs","them",
        "then",  "there", "these", "they",   "this",   "those",  "through","to",
        "too",   "under", "until", "up",     "us",     "very",
        "was",   "we",    "were",  "what",   "when",   "where",  "which", "while",
        "who",   "whom",  "why",   "will",   "with",   "would",  "you",   "your",
        "yours", "yourself"};
    return words;
}

bool ends_with(const std::string& s, const char* suf) {
    const std::size_t n = std::strlen(suf);
    return s.size() >= n && s.compare(s.size() - n, n, suf) == 0;
}

}  // namespace

bool is_stopword(const std::string& token) { return stopwords().count(token) > 0; }

std::string stem(const std::string& token) {
    std::string w = token;
    // plural endings
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (w.size() > 3 && w.back() == 's' && !ends_with(w, "ss") &&
               !ends_with(w, "us")) {
        w.pop_back();
    }
    // participle / adverb endings
    if (ends_with(w, "ing") && w.size() >= 6) {
        w.resize(w.size() - 3);
    } else if (ends_with(w, "ed") && w.size() >= 5) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ly") && w.size() >= 5) {
        w.resize(w.size() - 2);
    }
    return w;
}

Document preprocess(const std::string& text) {
    Document doc;
    Sentence cur;
    std::string tok;
    auto flush_token = [&] {
        if (tok.empty()) return;
        if (!is_stopword(tok)) {
            std::string st = stem(tok);
            if (!st.empty() && !is_stopword(st)) cur.push_back(std::move(st));
        }
        tok.clear();
    };
    auto flush_sentence = [&] {
        flush_token();
        if (!cur.empty()) doc.push_back(std::move(cur));
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            tok.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '.' || c == '!' || c == '?') {
            flush_sentence();
        } else {
            flush_token();
        }
    }
    flush_sentence();
    return doc;
}

double phrase_weight(std::size_t len, std::size_t max_len) {
    if (len <= 1) return 0.5;
    const std::size_t l = std::min(len, max_len);
    return 0.5 + 0.5 * static_cast<double>(l - 1) / static_cast<double>(max_len - 1);
}

std::size_t SuffixTree::child(std::size_t node, const std::string& token) {
    auto& kids = nodes_[node].children;
    auto it = std::lower_bound(kids.begin(), kids.end(), token,
                               [](const auto& kv, const std::string& t) {
                                   return kv.first < t;
                               });
    if (it != kids.end() && it->first == token) return it->second;
    nodes_.emplace_back();
    const std::size_t idx = nodes_.size() - 1;
    nodes_[node].children.insert(it, {token, idx});
    return idx;
}

void SuffixTree::add_sentence(std::size_t doc, const Sentence& sentence) {
    for (std::size_t start = 0; start < sentence.size(); ++start) {
        std::size_t node = 0;
        const std::size_t end = std::min(sentence.size(), start + max_depth_);
        for (std::size_t i = start; i < end; ++i) {
            node = child(node, sentence[i]);
            nodes_[node].docs.insert(doc);
        }
    }
}

std::vector<BaseCluster> base_clusters(const std::vector<Document>& docs,
                                       const Options& opt) {
    SuffixTree tree(opt.max_phrase_len);
    for (std::size_t d = 0; d < docs.size(); ++d)
        for (const auto& sentence : docs[d]) tree.add_sentence(d, sentence);

    std::vector<BaseCluster> bases;
    tree.for_each_shared_phrase([&](const Phrase& phrase, const std::set<std::size_t>& ds) {
        BaseCluster b;
        b.phrase = phrase;
        b.docs = ds;
        b.score = static_cast<double>(ds.size()) *
                  phrase_weight(phrase.size(), opt.max_phrase_len);
        bases.push_back(std::move(b));
    });

    std::sort(bases.begin(), bases.end(), [](const BaseCluster& a, const BaseCluster& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.phrase < b.phrase;
    });
    if (bases.size() > opt.top_k_bases) bases.resize(opt.top_k_bases);
    return bases;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::size_t intersection_size(const std::set<std::size_t>& a,
                              const std::set<std::size_t>& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++n; ++ia; ++ib; }
    }
    return n;
}

}  // namespace

std::vector<Cluster> merge(const std::vector<BaseCluster>& bases,
                           double overlap_threshold) {
    UnionFind uf(bases.size());
    for (std::size_t i = 0; i < bases.size(); ++i) {
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            if (bases[i].docs.empty() || bases[j].docs.empty()) continue;
            const double inter =
                static_cast<double>(intersection_size(bases[i].docs, bases[j].docs));
            if (inter / static_cast<double>(bases[i].docs.size()) > overlap_threshold &&
                inter / static_cast<double>(bases[j].docs.size()) > overlap_threshold) {
                uf.unite(i, j);
            }
        }
    }

    std::vector<std::vector<std::size_t>> members;
    std::vector<long> comp_of(bases.size(), -1);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        const std::size_t root = uf.find(i);
        if (comp_of[root] < 0) {
            comp_of[root] = static_cast<long>(members.size());
            members.emplace_back();
        }
        members[static_cast<std::size_t>(comp_of[root])].push_back(i);
    }

    // accumulate each component in phrase order so the summed score (and
    // therefore the ranking) does not depend on the input order of `bases`
    std::vector<Cluster> clusters;
    for (auto& comp : members) {
        std::sort(comp.begin(), comp.end(), [&](std::size_t a, std::size_t b) {
            return bases[a].phrase < bases[b].phrase;
        });
        Cluster c;
        std::size_t best = comp.front();
        for (std::size_t i : comp) {
            c.docs.insert(bases[i].docs.begin(), bases[i].docs.end());
            c.score += bases[i].score;
            c.n_bases += 1;
            if (bases[i].score > bases[best].score) best = i;
        }
        c.label = bases[best].phrase;
        clusters.push_back(std::move(c));
    }

    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    return clusters;
}

TopicReport topics_by_polarity(const Dataset& d, std::size_t k, const Options& opt) {
    std::vector<Document> pos_docs, neg_docs;
    for (const auto& rec : d.records) {
        if (!rec.recommended) continue;
        auto doc = preprocess(rec.text);
        if (*rec.recommended)
            pos_docs.push_back(std::move(doc));
        else
            neg_docs.push_back(std::move(doc));
    }

    auto run = [&](const std::vector<Document>& docs, bool positive) {
        ClusterSet cs;
        cs.positive = positive;
        if (docs.size() >= 2 && k > 0) {
            cs.clusters = merge(base_clusters(docs, opt), opt.overlap_threshold);
            if (cs.clusters.size() > k) cs.clusters.resize(k);
        }
        return cs;
    };
    return {run(pos_docs, true), run(neg_docs, false)};
}

namespace {

std::string phrase_str(const Phrase& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s.push_back(' ');
        s += p[i];
    }
    return s;
}

ordered_json cluster_set_to_json(const ClusterSet& cs) {
    ordered_json j;
    j["polarity"] = cs.positive ? "positive" : "negative";
    ordered_json arr = ordered_json::array();
    for (const auto& c : cs.clusters) {
        ordered_json jc;
        jc["label"] = phrase_str(c.label);
        jc["size"] = c.docs.size();
        jc["score"] = c.score;
        ordered_json samples = ordered_json::array();
        std::size_t n = 0;
        for (auto id : c.docs) {
            if (n++ >= 5) break;
            samples.push_back(id);
        }
        jc["sample_doc_ids"] = std::move(samples);
        arr.push_back(std::move(jc));
    }
    j["clusters"] = std::move(arr);
    return j;
}

}  // namespace

std::string topic_report_to_json(const TopicReport& rep, const Options& opt) {
    ordered_json j;
    j["format"] = "skyreview-topics";
    j["version"] = 1;
    ordered_json config;
    config["max_phrase_len"] = opt.max_phrase_len;
    config["top_k_bases"] = opt.top_k_bases;
    config["overlap_threshold"] = opt.overlap_threshold;
    j["config"] = std::move(config);
    j["positive"] = cluster_set_to_json(rep.positive);
    j["negative"] = cluster_set_to_json(rep.negative);
    return j.dump(2) + "\n";
}

std::string topic_report_to_table(const TopicReport& rep) {
    std::ostringstream os;
    auto dump = [&](const ClusterSet& cs) {
        os << (cs.positive ? "POSITIVE topics" : "NEGATIVE topics") << "\n";
        os << "  rank  size  score    label\n";
        std::size_t rank = 1;
        for (const auto& c : cs.clusters) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  %4zu  %4zu  %7.1f  ", rank++,
                          c.docs.size(), c.score);
            os << buf << phrase_str(c.label) << "\n";
        }
    };
    dump(rep.positive);
    dump(rep.negative);
    return os.str();
}

}  // namespace skyreview::stc
