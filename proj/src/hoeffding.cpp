#include "skyreview/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skyreview::ht {

using ordered_json = nlohmann::ordered_json;

std::size_t AttributeSpec::arity() const {
    if (is_nominal) return nominal.values.size();
    return numeric.bin_edges.size() + 2;  // bins + absent
}

std::size_t AttributeSpec::index_for(std::optional<double> value) const {
    if (!value) return absent_index();
    if (is_nominal) {
        // nominal attributes carry integer codes 0..k-2; out-of-range -> absent
        auto v = static_cast<long long>(*value);
        if (v < 0 || static_cast<std::size_t>(v) >= nominal.values.size() - 1)
            return absent_index();
        return static_cast<std::size_t>(v);
    }
    std::size_t i = 0;
    while (i < numeric.bin_edges.size() && *value >= numeric.bin_edges[i]) ++i;
    return i;
}

void AttributeSpec::validate() const {
    if (name.empty()) throw ModelError("attribute with empty name");
    if (is_nominal) {
        if (nominal.values.empty()) throw ModelError(name + ": empty value list");
        if (nominal.values.back() != "absent")
            throw ModelError(name + ": nominal values must end with \"absent\"");
        auto vals = nominal.values;
        std::sort(vals.begin(), vals.end());
        if (std::adjacent_find(vals.begin(), vals.end()) != vals.end())
            throw ModelError(name + ": duplicate nominal value");
    } else {
        for (std::size_t i = 1; i < numeric.bin_edges.size(); ++i)
            if (!(numeric.bin_edges[i - 1] < numeric.bin_edges[i]))
                throw ModelError(name + ": bin edges not strictly increasing");
    }
}

AttributeSpec AttributeSpec::nominal_ints(std::string name, int lo, int hi) {
    AttributeSpec s;
    s.name = std::move(name);
    s.is_nominal = true;
    for (int v = lo; v <= hi; ++v) s.nominal.values.push_back(std::to_string(v));
    s.nominal.values.push_back("absent");
    s.validate();
    return s;
}

AttributeSpec AttributeSpec::binned(std::string name, double lo, double hi,
                                    std::size_t bins) {
    AttributeSpec s;
    s.name = std::move(name);
    s.is_nominal = false;
    for (std::size_t i = 1; i < bins; ++i)
        s.numeric.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(bins));
    s.validate();
    return s;
}

double hoeffding_bound(double range, double delta, std::uint64_t n) {
    if (!(range > 0)) throw ModelError("range must be positive");
    if (!(delta > 0 && delta < 1)) throw ModelError("delta must be in (0,1)");
    if (n < 1) throw ModelError("n must be >= 1");
    return std::sqrt(range * range * std::log(1.0 / delta) /
                     (2.0 * static_cast<double>(n)));
}

double entropy2(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t n = a + b;
    if (n == 0 || a == 0 || b == 0) return 0.0;
    const double pa = static_cast<double>(a) / static_cast<double>(n);
    const double pb = static_cast<double>(b) / static_cast<double>(n);
    return -pa * std::log2(pa) - pb * std::log2(pb);
}

double info_gain(const LeafStats& stats, std::size_t attr) {
    if (attr >= stats.contingency.size()) throw ModelError("unknown attribute index");
    if (stats.n_seen == 0) throw ModelError("no observations");
    const double h_parent = entropy2(stats.class_counts[0], stats.class_counts[1]);
    double h_children = 0.0;
    const double n = static_cast<double>(stats.n_seen);
    for (const auto& cell : stats.contingency[attr]) {
        const std::uint64_t nv = cell[0] + cell[1];
        if (nv == 0) continue;
        h_children += (static_cast<double>(nv) / n) * entropy2(cell[0], cell[1]);
    }
    return h_parent - h_children;
}

HoeffdingTree::HoeffdingTree(std::vector<AttributeSpec> attributes, Params params)
    : attributes_(std::move(attributes)), params_(params) {
    if (attributes_.empty()) throw ModelError("no attributes");
    for (const auto& a : attributes_) a.validate();
    if (!(params_.delta > 0 && params_.delta < 1)) throw ModelError("bad delta");
    if (!(params_.tau >= 0)) throw ModelError("bad tau");
    if (!(params_.range > 0)) throw ModelError("bad range");
    Node root;
    root.stats = fresh_stats();
    nodes_.push_back(std::move(root));
}

LeafStats HoeffdingTree::fresh_stats() const {
    LeafStats s;
    s.contingency.resize(attributes_.size());
    for (std::size_t a = 0; a < attributes_.size(); ++a)
        s.contingency[a].assign(attributes_[a].arity(), {0, 0});
    return s;
}

std::size_t HoeffdingTree::leaf_for(const std::vector<std::size_t>& values) const {
    if (values.size() != attributes_.size())
        throw ModelError("instance arity mismatch");
    std::size_t idx = 0;
    while (nodes_[idx].split_attr >= 0) {
        const auto attr = static_cast<std::size_t>(nodes_[idx].split_attr);
        std::size_t v = values[attr];
        if (v >= nodes_[idx].children.size())
            throw ModelError("value index out of range for " + attributes_[attr].name);
        idx = nodes_[idx].children[v];
    }
    return idx;
}

const LeafStats& HoeffdingTree::leaf_stats(std::size_t node) const {
    return nodes_.at(node).stats;
}

void HoeffdingTree::train_one(const Instance& inst) {
    if (inst.label != kNegative && inst.label != kPositive)
        throw ModelError("label absent or invalid");
    const std::size_t leaf = leaf_for(inst.values);
    LeafStats& st = nodes_[leaf].stats;
    st.class_counts[inst.label] += 1;
    st.n_seen += 1;
    for (std::size_t a = 0; a < attributes_.size(); ++a)
        st.contingency[a][inst.values[a]][inst.label] += 1;
    ++n_trained_;

    if (st.n_seen - st.n_at_last_check >= params_.grace) {
        st.n_at_last_check = st.n_seen;
        maybe_split(leaf);
    }
}

void HoeffdingTree::maybe_split(std::size_t node_idx) {
    LeafStats& st = nodes_[node_idx].stats;
    // a pure leaf cannot gain anything
    if (st.class_counts[0] == 0 || st.class_counts[1] == 0) return;

    double g_best = -1.0, g_second = -1.0;
    std::size_t best_attr = 0;
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
        const double g = info_gain(st, a);
        if (g > g_best) {
            g_second = g_best;
            g_best = g;
            best_attr = a;
        } else if (g > g_second) {
            g_second = g;
        }
    }
    if (g_second < 0.0) g_second = 0.0;  // single attribute: compare against no-split
    if (!(g_best > 0.0)) return;

    // degenerate-split guard: need at least 2 observed values
    std::size_t observed_values = 0;
    for (const auto& cell : st.contingency[best_attr])
        if (cell[0] + cell[1] > 0) ++observed_values;
    if (observed_values < 2) return;

    const double eps = hoeffding_bound(params_.range, params_.delta, st.n_seen);
    if (!(g_best - g_second > eps || eps < params_.tau)) return;

    audit_.push_back({attributes_[best_attr].name, g_best, g_second, eps, st.n_seen});

    Node& node = nodes_[node_idx];
    node.split_attr = static_cast<int>(best_attr);
    const std::size_t arity = attributes_[best_attr].arity();
    for (std::size_t v = 0; v < arity; ++v) {
        Node child;
        child.stats = fresh_stats();
        nodes_.push_back(std::move(child));
        // nodes_ may have reallocated; re-index through nodes_[node_idx]
        nodes_[node_idx].children.push_back(nodes_.size() - 1);
    }
    nodes_[node_idx].stats = LeafStats{};  // statistics are released on split
}

Prediction HoeffdingTree::predict(const std::vector<std::size_t>& values) const {
    const std::size_t leaf = leaf_for(values);
    const LeafStats& st = nodes_[leaf].stats;
    const double pos = static_cast<double>(st.class_counts[kPositive]);
    const double n = static_cast<double>(st.n_seen);
    const double p = (pos + 1.0) / (n + 2.0);  // Laplace
    return {p > 0.5 ? kPositive : kNegative, p};
}

std::size_t HoeffdingTree::leaf_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes_)
        if (n.split_attr < 0) ++c;
    return c;
}

namespace {

constexpr int kModelVersion = 1;

ordered_json stats_to_json(const LeafStats& st) {
    ordered_json j;
    j["class_counts"] = st.class_counts;
    j["contingency"] = st.contingency;
    j["n_seen"] = st.n_seen;
    j["n_at_last_check"] = st.n_at_last_check;
    return j;
}

LeafStats stats_from_json(const ordered_json& j) {
    LeafStats st;
    st.class_counts = j.at("class_counts").get<std::array<std::uint64_t, 2>>();
    st.contingency =
        j.at("contingency")
            .get<std::vector<std::vector<std::array<std::uint64_t, 2>>>>();
    st.n_seen = j.at("n_seen").get<std::uint64_t>();
    st.n_at_last_check = j.at("n_at_last_check").get<std::uint64_t>();
    return st;
}

}  // namespace

std::string HoeffdingTree::to_json() const {
    ordered_json j;
    j["format"] = "skyreview-hoeffding-tree";
    j["version"] = kModelVersion;
    ordered_json params;
    params["delta"] = params_.delta;
    params["tau"] = params_.tau;
    params["grace"] = params_.grace;
    params["range"] = params_.range;
    j["params"] = std::move(params);
    j["n_trained"] = n_trained_;

    ordered_json attrs = ordered_json::array();
    for (const auto& a : attributes_) {
        ordered_json ja;
        ja["name"] = a.name;
        ja["kind"] = a.is_nominal ? "nominal" : "numeric";
        if (a.is_nominal)
            ja["values"] = a.nominal.values;
        else
            ja["bin_edges"] = a.numeric.bin_edges;
        attrs.push_back(std::move(ja));
    }
    j["attributes"] = std::move(attrs);

    ordered_json nodes = ordered_json::array();
    for (const auto& n : nodes_) {
        ordered_json jn;
        jn["split_attr"] = n.split_attr;
        jn["children"] = n.children;
        jn["stats"] = stats_to_json(n.stats);
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);

    ordered_json audit = ordered_json::array();
    for (const auto& a : audit_) {
        ordered_json ja;
        ja["attribute"] = a.attribute;
        ja["g_best"] = a.g_best;
        ja["g_second"] = a.g_second;
        ja["epsilon"] = a.epsilon;
        ja["n"] = a.n;
        audit.push_back(std::move(ja));
    }
    j["split_audit"] = std::move(audit);
    return j.dump(2) + "\n";
}

HoeffdingTree HoeffdingTree::from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
    if (j.value("format", "") != "skyreview-hoeffding-tree")
        throw ModelError("not a model file");
    if (j.value("version", -1) != kModelVersion)
        throw ModelError("unsupported model version");

    try {
        std::vector<AttributeSpec> attrs;
        for (const auto& ja : j.at("attributes")) {
            AttributeSpec a;
            a.name = ja.at("name").get<std::string>();
            a.is_nominal = ja.at("kind").get<std::string>() == "nominal";
            if (a.is_nominal)
                a.nominal.values = ja.at("values").get<std::vector<std::string>>();
            else
                a.numeric.bin_edges = ja.at("bin_edges").get<std::vector<double>>();
            attrs.push_back(std::move(a));
        }
        Params p;
        p.delta = j.at("params").at("delta").get<double>();
        p.tau = j.at("params").at("tau").get<double>();
        p.grace = j.at("params").at("grace").get<std::uint64_t>();
        p.range = j.at("params").at("range").get<double>();

        HoeffdingTree t(std::move(attrs), p);
        t.n_trained_ = j.at("n_trained").get<std::uint64_t>();
        t.nodes_.clear();
        for (const auto& jn : j.at("nodes")) {
            Node n;
            n.split_attr = jn.at("split_attr").get<int>();
            n.children = jn.at("children").get<std::vector<std::size_t>>();
            n.stats = stats_from_json(jn.at("stats"));
            t.nodes_.push_back(std::move(n));
        }
        if (t.nodes_.empty()) throw ModelError("model has no nodes");
        for (const auto& n : t.nodes_)
            for (auto c : n.children)
                if (c >= t.nodes_.size()) throw ModelError("dangling child index");
        for (const auto& ja : j.at("split_audit")) {
            t.audit_.push_back({ja.at("attribute").get<std::string>(),
                                ja.at("g_best").get<double>(),
                                ja.at("g_second").get<double>(),
                                ja.at("epsilon").get<double>(),
                                ja.at("n").get<std::uint64_t>()});
        }
        return t;
    } catch (const ModelError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
}

void HoeffdingTree::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write " + path);
    out << to_json();
}

HoeffdingTree HoeffdingTree::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace skyreview::ht
