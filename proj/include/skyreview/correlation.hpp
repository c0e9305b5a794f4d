#ifndef SKYREVIEW_CORRELATION_HPP
#define SKYREVIEW_CORRELATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "skyreview/data.hpp"

namespace skyreview {

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

class CorrelationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pearson r with a two-sided p-value from the t distribution
/// (t = r*sqrt((n-2)/(1-r^2)), n-2 degrees of freedom).
/// Inputs must have equal length and n >= 3; throws on degenerate input.
PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Pairwise-complete variant: pairs where either side is absent are skipped.
/// Returns nullopt when fewer than 3 complete pairs remain or a side is constant.
std::optional<PearsonResult> pearson_pairwise(
    const std::vector<std::optional<double>>& x,
    const std::vector<std::optional<double>>& y);

/// Two-sided p-value of Student's t with nu degrees of freedom,
/// via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double nu);

struct CorrelationReport {
    Category category;
    std::vector<std::string> variables;  // schema features + "overall" + "sentiment"
    std::vector<std::vector<std::optional<double>>> r;
    std::vector<std::vector<std::optional<double>>> p;
    std::vector<std::vector<std::size_t>> n;

    std::optional<std::size_t> index_of(const std::string& name) const;
};

CorrelationReport correlation_matrix(const Dataset& d);

/// Features whose correlation with "overall" exceeds `threshold`,
/// sorted by r descending, name ascending on ties. "overall" itself
/// (r = 1) is listed first when include_overall is set.
std::vector<std::string> select_features(const CorrelationReport& rep, double threshold,
                                         bool include_overall = false);

std::string report_to_json(const CorrelationReport& rep);
CorrelationReport report_from_json(const std::string& text);
std::string report_to_csv(const CorrelationReport& rep);

}  // namespace skyreview

#endif
