#ifndef SKYREVIEW_DATA_HPP
#define SKYREVIEW_DATA_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyreview {

enum class Category { Airport, Lounge, Airline, Seat };

const char* category_name(Category c);
Category category_from_name(const std::string& name);
std::vector<Category> all_categories();

/// Calendar date; the scrape carries no time of day.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
};

std::optional<Date> parse_date(const std::string& s);
std::string format_date(const Date& d);

/// Per-category list of rating features. Individual ratings are 1..5 stars,
/// the overall rating is on a 1..10 scale.
struct RatingSchema {
    Category category;
    std::vector<std::string> features;
    int rating_min = 1;
    int rating_max = 5;
    int overall_min = 1;
    int overall_max = 10;
};

const RatingSchema& schema_for(Category c);

struct ReviewRecord {
    Category category = Category::Airport;
    std::string author;
    std::optional<Date> timestamp;
    std::string entity;
    std::map<std::string, int> ratings;  // feature name -> 1..5, absent if missing
    std::optional<int> overall;          // 1..10
    std::optional<bool> recommended;
    std::string text;
    std::optional<double> sentiment;     // [-1, +1]

    bool operator==(const ReviewRecord&) const = default;
};

struct Dataset {
    Category category = Category::Airport;
    std::vector<ReviewRecord> records;

    const RatingSchema& schema() const { return schema_for(category); }
};

struct DatasetStats {
    Category category;
    std::size_t n_users = 0;
    std::size_t n_reviews = 0;
    std::size_t n_labeled = 0;
    std::optional<double> satisfaction_rate;  // absent when no labeled records
    std::size_t n_duplicate_user_entity = 0;  // rows beyond the first per (user, entity)
};

struct Rejection {
    std::size_t line_no = 0;  // 1-based physical line of the offending row
    std::string reason;
};

struct IngestResult {
    Dataset dataset;
    std::vector<Rejection> warnings;
};

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse one CSV file of the public Skytrax scrape into a Dataset.
/// Record order follows file order. Out-of-domain ratings become absent
/// and are reported as warnings, not dropped rows.
IngestResult ingest(const std::string& path, Category category);

/// Same parser over an already-loaded CSV body (used by tests and the
/// normalized-cache round trip).
IngestResult ingest_text(const std::string& csv_text, Category category);

DatasetStats stats(const Dataset& d);

/// Stable ascending sort by date. Records without a date go first,
/// keeping their input order; their indices are reported in `undated`.
Dataset sort_chronological(const Dataset& d, std::vector<std::size_t>* undated = nullptr);

/// Normalized line-delimited JSON cache used between CLI stages.
void save_jsonl(const Dataset& d, const std::string& path);
Dataset load_jsonl(const std::string& path);
std::string to_jsonl(const Dataset& d);
Dataset from_jsonl(const std::string& text);

void save_rejections(const std::vector<Rejection>& rej, const std::string& path);

}  // namespace skyreview

#endif
