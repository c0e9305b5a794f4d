#ifndef SKYREVIEW_EVAL_HPP
#define SKYREVIEW_EVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "skyreview/correlation.hpp"
#include "skyreview/data.hpp"
#include "skyreview/hoeffding.hpp"

namespace skyreview::eval {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maps named review features (schema ratings, "overall", "sentiment")
/// onto Hoeffding-tree attributes: ratings and overall are nominal with an
/// "absent" branch, sentiment is discretized into 20 equal-width bins.
struct FeatureEncoder {
    FeatureEncoder(Category category, std::vector<std::string> features);

    std::vector<std::string> features;
    std::vector<ht::AttributeSpec> specs;

    std::vector<std::size_t> encode(const ReviewRecord& rec) const;

private:
    Category category_;
};

struct Confusion {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Chronological holdout: the last ceil(fraction*n) records form the test
/// side. Requires n >= 5. Order is preserved within each side.
std::pair<Dataset, Dataset> split(const Dataset& d, double fraction);

/// Class-weighted F1 over both classes.
double f1_weighted(const Confusion& c);
double f1_positive(const Confusion& c);
double f1_negative(const Confusion& c);

/// Rank-based (Mann-Whitney) AUC with average ranks for ties.
/// nullopt when the labels are single-class.
std::optional<double> auc(const std::vector<std::pair<double, bool>>& scored);

struct ExperimentSpec {
    Category category;
    std::vector<std::string> features;
    double test_fraction = 0.2;
    ht::Params params;
    std::string name;  // row label for reports
};

struct EvalReport {
    ExperimentSpec spec;
    Confusion confusion;
    double f1 = 0.0;       // weighted
    double f1_pos = 0.0;
    double f1_neg = 0.0;
    std::optional<double> auc;
    double train_seconds = 0.0;  // model updates only
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t tree_nodes = 0;
};

/// Train on the chronological train split, score the test split.
/// Input may be unsorted; unlabeled records are dropped first.
EvalReport run_experiment(const ExperimentSpec& spec, const Dataset& d);

struct SuiteOptions {
    double correlation_threshold = 0.3;
    double test_fraction = 0.2;
    ht::Params params;
    bool paper_faithful = false;  // threshold correlations on the full dataset
};

/// One category's paper-style experiment block: each rating feature and the
/// overall rating singly, the correlated-feature combination, sentiment only.
std::vector<EvalReport> run_category_suite(const Dataset& d, const SuiteOptions& opt);

std::vector<EvalReport> run_paper_suite(const std::vector<Dataset>& datasets,
                                        const SuiteOptions& opt,
                                        std::vector<std::string>* warnings = nullptr);

std::string reports_to_csv(const std::vector<EvalReport>& reports);
std::string reports_to_json(const std::vector<EvalReport>& reports);
std::vector<EvalReport> reports_from_json(const std::string& text);
std::string reports_to_markdown(const std::vector<EvalReport>& reports);

}  // namespace skyreview::eval

#endif
