#include "skyreview/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "skyreview/csv.hpp"

namespace skyreview {

using ordered_json = nlohmann::ordered_json;

const char* category_name(Category c) {
    switch (c) {
        case Category::Airport: return "airport";
        case Category::Lounge: return "lounge";
        case Category::Airline: return "airline";
        case Category::Seat: return "seat";
    }
    return "?";
}

Category category_from_name(const std::string& name) {
    for (Category c : all_categories()) {
        if (name == category_name(c)) return c;
    }
    throw std::invalid_argument("unknown category: " + name);
}

std::vector<Category> all_categories() {
    return {Category::Airport, Category::Lounge, Category::Airline, Category::Seat};
}

const RatingSchema& schema_for(Category c) {
    static const RatingSchema airport{
        Category::Airport,
        {"queuing", "airport_shopping", "terminal_cleanliness", "terminal_seating",
         "food_beverages", "wifi_connectivity", "terminal_signs", "airport_staff"}};
    static const RatingSchema lounge{
        Category::Lounge,
        {"comfort", "staff_service", "bar_beverages", "catering", "cleanliness",
         "washrooms", "wifi"}};
    static const RatingSchema airline{
        Category::Airline,
        {"value_money", "cabin_staff", "seat_comfort", "food_beverages",
         "inflight_entertainment", "ground_service", "wifi_connectivity"}};
    static const RatingSchema seat{
        Category::Seat,
        {"seat_legroom", "seat_width", "aisle_space", "seat_recline", "viewing_tv",
         "seat_storage", "power_supply"}};
    switch (c) {
        case Category::Airport: return airport;
        case Category::Lounge: return lounge;
        case Category::Airline: return airline;
        case Category::Seat: return seat;
    }
    throw std::logic_error("bad category");
}

std::optional<Date> parse_date(const std::string& s) {
    // The scrape stores ISO dates (2014-03-30).
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) return std::nullopt;
    if (y < 1900 || y > 2200 || m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return Date{y, m, d};
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::optional<int> parse_int(const std::string& s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    // tolerate "4.0" style values in rating columns
    std::size_t dot = t.find('.');
    if (dot != std::string::npos) {
        for (std::size_t i = dot + 1; i < t.size(); ++i)
            if (t[i] != '0') return std::nullopt;
        t = t.substr(0, dot);
    }
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return v;
}

// Maps the public scrape's column headers onto schema feature names.
// The fixture format may also use the schema names directly.
std::vector<std::string> rating_column_aliases(Category c, const std::string& feature) {
    std::vector<std::string> out{feature, feature + "_rating"};
    if (c == Category::Lounge && feature == "wifi")
        out.push_back("wifi_connectivity_rating");
    return out;
}

std::vector<std::string> entity_column_aliases(Category c) {
    switch (c) {
        case Category::Airport: return {"entity", "airport_name"};
        case Category::Lounge: return {"entity", "lounge_name", "airline_name"};
        case Category::Airline:
        case Category::Seat: return {"entity", "airline_name"};
    }
    return {};
}

int find_column(const std::vector<std::string>& header,
                const std::vector<std::string>& candidates) {
    for (const auto& cand : candidates) {
        auto it = std::find(header.begin(), header.end(), cand);
        if (it != header.end()) return static_cast<int>(it - header.begin());
    }
    return -1;
}

std::optional<bool> parse_recommended(const std::string& raw, bool* bad) {
    std::string v = lower(trim(raw));
    if (v.empty()) return std::nullopt;
    if (v == "1" || v == "yes" || v == "true") return true;
    if (v == "0" || v == "no" || v == "false") return false;
    *bad = true;
    return std::nullopt;
}

}  // namespace

IngestResult ingest_text(const std::string& csv_text, Category category) {
    auto rows = csv::parse(csv_text);
    if (rows.empty()) throw IngestError("empty input: no header row");

    std::vector<std::string> header;
    header.reserve(rows[0].fields.size());
    for (const auto& f : rows[0].fields) header.push_back(lower(trim(f)));

    const RatingSchema& schema = schema_for(category);

    const int col_date = find_column(header, {"date"});
    const int col_entity = find_column(header, entity_column_aliases(category));
    const int col_text = find_column(header, {"text", "content"});
    if (col_date < 0 || col_entity < 0 || col_text < 0) {
        throw IngestError(std::string("header missing mandatory column(s) for ") +
                          category_name(category));
    }
    const int col_author = find_column(header, {"author"});
    const int col_overall = find_column(header, {"overall", "overall_rating"});
    const int col_recommended = find_column(header, {"recommended"});

    std::vector<int> rating_cols(schema.features.size(), -1);
    for (std::size_t i = 0; i < schema.features.size(); ++i) {
        rating_cols[i] =
            find_column(header, rating_column_aliases(category, schema.features[i]));
    }

    IngestResult res;
    res.dataset.category = category;

    for (std::size_t ri = 1; ri < rows.size(); ++ri) {
        const auto& row = rows[ri];
        if (row.fields.size() != header.size()) {
            std::ostringstream os;
            os << "field count " << row.fields.size() << " != header " << header.size();
            res.warnings.push_back({row.line_no, os.str()});
            continue;
        }
        ReviewRecord rec;
        rec.category = category;
        rec.entity = trim(row.fields[col_entity]);
        rec.text = row.fields[col_text];
        if (col_author >= 0) rec.author = trim(row.fields[col_author]);

        const std::string date_raw = trim(row.fields[col_date]);
        if (!date_raw.empty()) {
            rec.timestamp = parse_date(date_raw);
            if (!rec.timestamp)
                res.warnings.push_back({row.line_no, "unparseable date: " + date_raw});
        } else {
            res.warnings.push_back({row.line_no, "missing date"});
        }

        if (col_overall >= 0) {
            const std::string raw = trim(row.fields[col_overall]);
            if (!raw.empty()) {
                auto v = parse_int(raw);
                if (v && *v >= schema.overall_min && *v <= schema.overall_max) {
                    rec.overall = *v;
                } else {
                    res.warnings.push_back(
                        {row.line_no, "overall rating out of domain: " + raw});
                }
            }
        }

        for (std::size_t fi = 0; fi < schema.features.size(); ++fi) {
            if (rating_cols[fi] < 0) continue;
            const std::string raw = trim(row.fields[rating_cols[fi]]);
            if (raw.empty()) continue;
            auto v = parse_int(raw);
            if (v && *v >= schema.rating_min && *v <= schema.rating_max) {
                rec.ratings[schema.features[fi]] = *v;
            } else {
                res.warnings.push_back(
                    {row.line_no,
                     "rating out of domain: " + schema.features[fi] + "=" + raw});
            }
        }

        if (col_recommended >= 0) {
            bool bad = false;
            rec.recommended = parse_recommended(row.fields[col_recommended], &bad);
            if (bad)
                res.warnings.push_back(
                    {row.line_no,
                     "bad recommended flag: " + trim(row.fields[col_recommended])});
        }

        res.dataset.records.push_back(std::move(rec));
    }
    return res;
}

IngestResult ingest(const std::string& path, Category category) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_text(buf.str(), category);
}

DatasetStats stats(const Dataset& d) {
    DatasetStats s;
    s.category = d.category;
    s.n_reviews = d.records.size();
    std::unordered_set<std::string> users;
    std::set<std::pair<std::string, std::string>> user_entity;
    std::size_t labeled = 0, satisfied = 0;
    for (const auto& r : d.records) {
        if (!r.author.empty()) {
            users.insert(r.author);
            if (!user_entity.insert({r.author, r.entity}).second)
                ++s.n_duplicate_user_entity;
        }
        if (r.recommended) {
            ++labeled;
            if (*r.recommended) ++satisfied;
        }
    }
    s.n_users = users.size();
    s.n_labeled = labeled;
    if (labeled > 0)
        s.satisfaction_rate = static_cast<double>(satisfied) / static_cast<double>(labeled);
    return s;
}

Dataset sort_chronological(const Dataset& d, std::vector<std::size_t>* undated) {
    Dataset out;
    out.category = d.category;
    out.records = d.records;
    if (undated) {
        undated->clear();
        for (std::size_t i = 0; i < d.records.size(); ++i)
            if (!d.records[i].timestamp) undated->push_back(i);
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const ReviewRecord& a, const ReviewRecord& b) {
                         if (!a.timestamp && !b.timestamp) return false;
                         if (!a.timestamp) return true;  // undated first
                         if (!b.timestamp) return false;
                         return *a.timestamp < *b.timestamp;
                     });
    return out;
}

namespace {

ordered_json record_to_json(const ReviewRecord& r) {
    ordered_json j;
    j["category"] = category_name(r.category);
    j["author"] = r.author;
    j["date"] = r.timestamp ? ordered_json(format_date(*r.timestamp)) : ordered_json(nullptr);
    j["entity"] = r.entity;
    ordered_json ratings = ordered_json::object();
    for (const auto& [k, v] : r.ratings) ratings[k] = v;
    j["ratings"] = std::move(ratings);
    j["overall"] = r.overall ? ordered_json(*r.overall) : ordered_json(nullptr);
    j["recommended"] = r.recommended ? ordered_json(*r.recommended) : ordered_json(nullptr);
    j["text"] = r.text;
    j["sentiment"] = r.sentiment ? ordered_json(*r.sentiment) : ordered_json(nullptr);
    return j;
}

ReviewRecord record_from_json(const ordered_json& j) {
    ReviewRecord r;
    r.category = category_from_name(j.at("category").get<std::string>());
    r.author = j.at("author").get<std::string>();
    if (!j.at("date").is_null()) {
        auto d = parse_date(j.at("date").get<std::string>());
        if (!d) throw std::runtime_error("corrupt date in dataset cache");
        r.timestamp = d;
    }
    r.entity = j.at("entity").get<std::string>();
    for (const auto& [k, v] : j.at("ratings").items()) r.ratings[k] = v.get<int>();
    if (!j.at("overall").is_null()) r.overall = j.at("overall").get<int>();
    if (!j.at("recommended").is_null()) r.recommended = j.at("recommended").get<bool>();
    r.text = j.at("text").get<std::string>();
    if (!j.at("sentiment").is_null()) r.sentiment = j.at("sentiment").get<double>();
    return r;
}

}  // namespace

std::string to_jsonl(const Dataset& d) {
    std::ostringstream os;
    ordered_json meta;
    meta["format"] = "skyreview-dataset";
    meta["version"] = 1;
    meta["category"] = category_name(d.category);
    meta["n_records"] = d.records.size();
    os << meta.dump() << '\n';
    for (const auto& r : d.records) os << record_to_json(r).dump() << '\n';
    return os.str();
}

Dataset from_jsonl(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty dataset cache");
    ordered_json meta = ordered_json::parse(line);
    if (meta.value("format", "") != "skyreview-dataset" || meta.value("version", 0) != 1)
        throw std::runtime_error("unrecognized dataset cache format");
    Dataset d;
    d.category = category_from_name(meta.at("category").get<std::string>());
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        d.records.push_back(record_from_json(ordered_json::parse(line)));
        if (d.records.back().category != d.category)
            throw std::runtime_error("mixed categories in dataset cache");
    }
    if (meta.contains("n_records") &&
        meta.at("n_records").get<std::size_t>() != d.records.size())
        throw std::runtime_error("dataset cache truncated");
    return d;
}

void save_jsonl(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_jsonl(d);
}

Dataset load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

void save_rejections(const std::vector<Rejection>& rej, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& r : rej) {
        ordered_json j;
        j["line_no"] = r.line_no;
        j["reason"] = r.reason;
        out << j.dump() << '\n';
    }
}

}  // namespace skyreview
