#ifndef SKYREVIEW_HOEFFDING_HPP
#define SKYREVIEW_HOEFFDING_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyreview::ht {

/// Binary classes: index 1 is the positive ("recommend") class.
enum : int { kNegative = 0, kPositive = 1 };

struct AttributeSpec {
    struct Nominal {
        std::vector<std::string> values;  // must include "absent"
    };
    struct Numeric {
        std::vector<double> bin_edges;  // strictly increasing interior edges
    };

    std::string name;
    bool is_nominal = true;
    Nominal nominal;
    Numeric numeric;

    /// Number of branches, including the trailing "absent" slot.
    std::size_t arity() const;

    /// Branch index for a raw value (nullopt = absent).
    std::size_t index_for(std::optional<double> value) const;
    std::size_t absent_index() const { return arity() - 1; }

    void validate() const;

    static AttributeSpec nominal_ints(std::string name, int lo, int hi);
    static AttributeSpec binned(std::string name, double lo, double hi, std::size_t bins);
};

/// One training instance: one branch index per attribute, plus the label.
struct Instance {
    std::vector<std::size_t> values;
    int label = kNegative;
};

struct LeafStats {
    std::array<std::uint64_t, 2> class_counts{0, 0};
    // contingency[attr][value][class]
    std::vector<std::vector<std::array<std::uint64_t, 2>>> contingency;
    std::uint64_t n_seen = 0;
    std::uint64_t n_at_last_check = 0;
};

struct Params {
    double delta = 1e-7;  // split confidence
    double tau = 0.05;    // tie threshold
    std::uint64_t grace = 200;
    double range = 1.0;   // R of the split criterion (binary entropy)
};

struct Prediction {
    int cls = kNegative;
    double probability = 0.5;  // of the positive class
};

struct SplitAudit {
    std::string attribute;
    double g_best = 0.0;
    double g_second = 0.0;
    double epsilon = 0.0;
    std::uint64_t n = 0;
};

/// epsilon = sqrt(R^2 ln(1/delta) / (2n))
double hoeffding_bound(double range, double delta, std::uint64_t n);

double entropy2(std::uint64_t a, std::uint64_t b);

/// Information gain of splitting `stats` on attribute `attr`.
double info_gain(const LeafStats& stats, std::size_t attr);

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HoeffdingTree {
public:
    HoeffdingTree(std::vector<AttributeSpec> attributes, Params params = {});

    void train_one(const Instance& inst);
    Prediction predict(const std::vector<std::size_t>& values) const;

    std::uint64_t n_trained() const { return n_trained_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const;
    const Params& params() const { return params_; }
    const std::vector<AttributeSpec>& attributes() const { return attributes_; }
    const std::vector<SplitAudit>& split_audit() const { return audit_; }

    /// Leaf reached by an instance (for white-box tests).
    std::size_t leaf_for(const std::vector<std::size_t>& values) const;
    const LeafStats& leaf_stats(std::size_t node) const;

    std::string to_json() const;
    static HoeffdingTree from_json(const std::string& text);
    void save(const std::string& path) const;
    static HoeffdingTree load(const std::string& path);

private:
    struct Node {
        int split_attr = -1;  // -1: leaf
        std::vector<std::size_t> children;
        LeafStats stats;      // meaningful for leaves only
    };

    LeafStats fresh_stats() const;
    void maybe_split(std::size_t node_idx);

    std::vector<AttributeSpec> attributes_;
    Params params_;
    std::vector<Node> nodes_;
    std::uint64_t n_trained_ = 0;
    std::vector<SplitAudit> audit_;
};

}  // namespace skyreview::ht

#endif
