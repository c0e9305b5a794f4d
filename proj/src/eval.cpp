#include "skyreview/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace skyreview::eval {

using ordered_json = nlohmann::ordered_json;

FeatureEncoder::FeatureEncoder(Category category, std::vector<std::string> feats)
    : features(std::move(feats)), category_(category) {
    if (features.empty()) throw EvalError("feature list must be non-empty");
    const auto& schema = schema_for(category);
    for (const auto& f : features) {
        if (f == "overall") {
            specs.push_back(ht::AttributeSpec::nominal_ints("overall", schema.overall_min,
                                                            schema.overall_max));
        } else if (f == "sentiment") {
            specs.push_back(ht::AttributeSpec::binned("sentiment", -1.0, 1.0, 20));
        } else {
            if (std::find(schema.features.begin(), schema.features.end(), f) ==
                schema.features.end())
                throw EvalError("unknown feature for category: " + f);
            specs.push_back(
                ht::AttributeSpec::nominal_ints(f, schema.rating_min, schema.rating_max));
        }
    }
}

std::vector<std::size_t> FeatureEncoder::encode(const ReviewRecord& rec) const {
    const auto& schema = schema_for(category_);
    std::vector<std::size_t> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        std::optional<double> raw;
        if (f == "overall") {
            if (rec.overall) raw = static_cast<double>(*rec.overall - schema.overall_min);
        } else if (f == "sentiment") {
            if (rec.sentiment) raw = *rec.sentiment;
        } else {
            auto it = rec.ratings.find(f);
            if (it != rec.ratings.end())
                raw = static_cast<double>(it->second - schema.rating_min);
        }
        out[i] = specs[i].index_for(raw);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw EvalError("fraction must be in (0,1)");
    const std::size_t n = d.records.size();
    if (n < 5) throw EvalError("refusing to split fewer than 5 records");
    const auto n_test = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n)));
    const std::size_t boundary = n - n_test;
    Dataset train{d.category, {d.records.begin(), d.records.begin() + boundary}};
    Dataset test{d.category, {d.records.begin() + boundary, d.records.end()}};
    return {std::move(train), std::move(test)};
}

namespace {

double f1_from(double tp, double fp, double fn) {
    const double denom = 2 * tp + fp + fn;
    if (denom == 0.0) return 0.0;
    return 2 * tp / denom;
}

}  // namespace

double f1_positive(const Confusion& c) {
    return f1_from(static_cast<double>(c.tp), static_cast<double>(c.fp),
                   static_cast<double>(c.fn));
}

double f1_negative(const Confusion& c) {
    // negative class: tn are its true positives, fn its false positives
    return f1_from(static_cast<double>(c.tn), static_cast<double>(c.fn),
                   static_cast<double>(c.fp));
}

double f1_weighted(const Confusion& c) {
    const double n_pos = static_cast<double>(c.tp + c.fn);
    const double n_neg = static_cast<double>(c.tn + c.fp);
    const double n = n_pos + n_neg;
    if (n == 0.0) throw EvalError("empty confusion");
    return (n_pos * f1_positive(c) + n_neg * f1_negative(c)) / n;
}

std::optional<double> auc(const std::vector<std::pair<double, bool>>& scored) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [s, l] : scored) (l ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].first < scored[b].first;
    });

    // average ranks over tied scores
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scored[order[j]].first == scored[order[i]].first) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (scored[order[t]].second) rank_sum_pos += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

EvalReport run_experiment(const ExperimentSpec& spec, const Dataset& d) {
    if (d.category != spec.category) throw EvalError("category mismatch");

    Dataset labeled;
    labeled.category = d.category;
    for (const auto& r : d.records)
        if (r.recommended) labeled.records.push_back(r);
    labeled = sort_chronological(labeled);

    auto [train, test] = split(labeled, spec.test_fraction);

    FeatureEncoder enc(spec.category, spec.features);
    std::vector<ht::Instance> train_set;
    train_set.reserve(train.records.size());
    for (const auto& r : train.records)
        train_set.push_back({enc.encode(r), *r.recommended ? ht::kPositive : ht::kNegative});

    ht::HoeffdingTree tree(enc.specs, spec.params);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& inst : train_set) tree.train_one(inst);
    const auto t1 = std::chrono::steady_clock::now();

    EvalReport rep;
    rep.spec = spec;
    rep.n_train = train.records.size();
    rep.n_test = test.records.size();
    rep.train_seconds = std::chrono::duration<double>(t1 - t0).count();
    rep.tree_nodes = tree.node_count();

    std::vector<std::pair<double, bool>> scored;
    scored.reserve(test.records.size());
    for (const auto& r : test.records) {
        const auto pred = tree.predict(enc.encode(r));
        const bool actual = *r.recommended;
        scored.emplace_back(pred.probability, actual);
        const bool predicted = pred.cls == ht::kPositive;
        if (predicted && actual) ++rep.confusion.tp;
        else if (predicted && !actual) ++rep.confusion.fp;
        else if (!predicted && !actual) ++rep.confusion.tn;
        else ++rep.confusion.fn;
    }
    rep.f1 = f1_weighted(rep.confusion);
    rep.f1_pos = f1_positive(rep.confusion);
    rep.f1_neg = f1_negative(rep.confusion);
    rep.auc = auc(scored);
    return rep;
}

std::vector<EvalReport> run_category_suite(const Dataset& d, const SuiteOptions& opt) {
    std::vector<EvalReport> out;
    const auto& schema = d.schema();

    auto make_spec = [&](std::vector<std::string> feats, std::string name) {
        ExperimentSpec s;
        s.category = d.category;
        s.features = std::move(feats);
        s.test_fraction = opt.test_fraction;
        s.params = opt.params;
        s.name = std::move(name);
        return s;
    };

    out.push_back(run_experiment(make_spec({"overall"}, "overall"), d));
    for (const auto& f : schema.features)
        out.push_back(run_experiment(make_spec({f}, f), d));

    // combination: rating features correlating with overall above the
    // threshold, computed on the training split unless paper_faithful
    Dataset labeled;
    labeled.category = d.category;
    for (const auto& r : d.records)
        if (r.recommended) labeled.records.push_back(r);
    labeled = sort_chronological(labeled);
    Dataset corr_basis = labeled;
    if (!opt.paper_faithful) corr_basis = split(labeled, opt.test_fraction).first;

    auto rep = correlation_matrix(corr_basis);
    auto selected = select_features(rep, opt.correlation_threshold, true);
    std::erase(selected, "sentiment");  // combination uses rating features only
    if (!selected.empty())
        out.push_back(run_experiment(make_spec(selected, "combination"), d));

    out.push_back(run_experiment(make_spec({"sentiment"}, "sentiment"), d));
    return out;
}

std::vector<EvalReport> run_paper_suite(const std::vector<Dataset>& datasets,
                                        const SuiteOptions& opt,
                                        std::vector<std::string>* warnings) {
    std::vector<EvalReport> out;
    for (Category c : all_categories()) {
        auto it = std::find_if(datasets.begin(), datasets.end(),
                               [&](const Dataset& d) { return d.category == c; });
        if (it == datasets.end() || it->records.empty()) {
            if (warnings)
                warnings->push_back(std::string("missing category: ") + category_name(c));
            continue;
        }
        auto block = run_category_suite(*it, opt);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(sep);
        s += v[i];
    }
    return s;
}

ordered_json report_to_json_obj(const EvalReport& r) {
    ordered_json j;
    j["category"] = category_name(r.spec.category);
    j["name"] = r.spec.name;
    j["features"] = r.spec.features;
    ordered_json params;
    params["delta"] = r.spec.params.delta;
    params["tau"] = r.spec.params.tau;
    params["grace"] = r.spec.params.grace;
    params["range"] = r.spec.params.range;
    params["test_fraction"] = r.spec.test_fraction;
    j["params"] = std::move(params);
    ordered_json conf;
    conf["tp"] = r.confusion.tp;
    conf["fp"] = r.confusion.fp;
    conf["tn"] = r.confusion.tn;
    conf["fn"] = r.confusion.fn;
    j["confusion"] = std::move(conf);
    j["f1"] = r.f1;
    j["f1_positive"] = r.f1_pos;
    j["f1_negative"] = r.f1_neg;
    j["auc"] = r.auc ? ordered_json(*r.auc) : ordered_json(nullptr);
    j["train_seconds"] = r.train_seconds;
    j["n_train"] = r.n_train;
    j["n_test"] = r.n_test;
    j["tree_nodes"] = r.tree_nodes;
    return j;
}

}  // namespace

std::string reports_to_csv(const std::vector<EvalReport>& reports) {
    std::ostringstream os;
    os << "category,name,features,f1,f1_positive,f1_negative,auc,train_seconds,"
          "n_train,n_test,tp,fp,tn,fn\n";
    os.precision(12);
    for (const auto& r : reports) {
        os << category_name(r.spec.category) << ',' << r.spec.name << ",\""
           << join(r.spec.features, ';') << "\"," << r.f1 << ',' << r.f1_pos << ','
           << r.f1_neg << ',';
        if (r.auc) os << *r.auc;
        os << ',' << r.train_seconds << ',' << r.n_train << ',' << r.n_test << ','
           << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn << ','
           << r.confusion.fn << '\n';
    }
    return os.str();
}

std::string reports_to_json(const std::vector<EvalReport>& reports) {
    ordered_json j;
    j["format"] = "skyreview-eval";
    j["version"] = 1;
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json_obj(r));
    j["reports"] = std::move(arr);
    return j.dump(2) + "\n";
}

std::vector<EvalReport> reports_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.value("format", "") != "skyreview-eval")
        throw EvalError("not an eval report file");
    std::vector<EvalReport> out;
    for (const auto& jr : j.at("reports")) {
        EvalReport r;
        r.spec.category = category_from_name(jr.at("category").get<std::string>());
        r.spec.name = jr.at("name").get<std::string>();
        r.spec.features = jr.at("features").get<std::vector<std::string>>();
        r.spec.params.delta = jr.at("params").at("delta").get<double>();
        r.spec.params.tau = jr.at("params").at("tau").get<double>();
        r.spec.params.grace = jr.at("params").at("grace").get<std::uint64_t>();
        r.spec.params.range = jr.at("params").at("range").get<double>();
        r.spec.test_fraction = jr.at("params").at("test_fraction").get<double>();
        r.confusion.tp = jr.at("confusion").at("tp").get<std::uint64_t>();
        r.confusion.fp = jr.at("confusion").at("fp").get<std::uint64_t>();
        r.confusion.tn = jr.at("confusion").at("tn").get<std::uint64_t>();
        r.confusion.fn = jr.at("confusion").at("fn").get<std::uint64_t>();
        r.f1 = jr.at("f1").get<double>();
        r.f1_pos = jr.at("f1_positive").get<double>();
        r.f1_neg = jr.at("f1_negative").get<double>();
        if (!jr.at("auc").is_null()) r.auc = jr.at("auc").get<double>();
        r.train_seconds = jr.at("train_seconds").get<double>();
        r.n_train = jr.at("n_train").get<std::size_t>();
        r.n_test = jr.at("n_test").get<std::size_t>();
        r.tree_nodes = jr.value("tree_nodes", std::size_t{0});
        out.push_back(std::move(r));
    }
    return out;
}

std::string reports_to_markdown(const std::vector<EvalReport>& reports) {
    std::ostringstream os;
    Category last = Category::Airport;
    bool first = true;
    char buf[64];
    for (const auto& r : reports) {
        if (first || r.spec.category != last) {
            if (!first) os << '\n';
            os << "**" << category_name(r.spec.category) << " reviews**\n\n";
            os << "| Feature | F1 | AUC |\n|---|---|---|\n";
            last = r.spec.category;
            first = false;
        }
        std::snprintf(buf, sizeof(buf), "%.3f", r.f1);
        os << "| " << r.spec.name << " | " << buf << " | ";
        if (r.auc) {
            std::snprintf(buf, sizeof(buf), "%.3f", *r.auc);
            os << buf;
        } else {
            os << "n/a";
        }
        os << " |\n";
    }
    return os.str();
}

}  // namespace skyreview::eval
