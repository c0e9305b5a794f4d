#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skyreview/correlation.hpp"
#include "skyreview/data.hpp"
#include "skyreview/eval.hpp"
#include "skyreview/hoeffding.hpp"
#include "skyreview/sentiment.hpp"
#include "skyreview/stc.hpp"

namespace py = pybind11;
using namespace skyreview;

namespace {

Category to_category(const std::string& name) { return category_from_name(name); }

py::dict stats_dict(const DatasetStats& s) {
    py::dict d;
    d["category"] = category_name(s.category);
    d["n_users"] = s.n_users;
    d["n_reviews"] = s.n_reviews;
    d["n_labeled"] = s.n_labeled;
    if (s.satisfaction_rate)
        d["satisfaction_rate"] = *s.satisfaction_rate;
    else
        d["satisfaction_rate"] = py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(skyreview, m) {
    m.doc() = "Airline-review satisfaction analysis toolkit";

    py::class_<Dataset>(m, "Dataset")
        .def_static(
            "ingest",
            [](const std::string& path, const std::string& category) {
                auto res = ingest(path, to_category(category));
                return py::make_tuple(res.dataset, res.warnings.size());
            },
            py::arg("path"), py::arg("category"),
            "Parse a raw CSV; returns (dataset, warning_count).")
        .def_static("load", &load_jsonl, py::arg("path"))
        .def("save", &save_jsonl, py::arg("path"))
        .def("__len__", [](const Dataset& d) { return d.records.size(); })
        .def_property_readonly(
            "category", [](const Dataset& d) { return category_name(d.category); })
        .def("stats", [](const Dataset& d) { return stats_dict(stats(d)); })
        .def("sort_chronological",
             [](const Dataset& d) { return sort_chronological(d); })
        .def("annotate_sentiment",
             [](const Dataset& d, const std::string& lexicon_path, bool force) {
                 const Lexicon lex = lexicon_path.empty() ? default_lexicon()
                                                          : load_lexicon(lexicon_path);
                 return annotate(
                     d, [&lex](const std::string& t) { return score(t, lex); }, force);
             },
             py::arg("lexicon_path") = "", py::arg("force") = false);

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            auto r = pearson(x, y);
            return py::make_tuple(r.r, r.p, r.n);
        },
        py::arg("x"), py::arg("y"), "Pearson r with two-sided t-test p-value.");

    m.def(
        "correlation_json",
        [](const Dataset& d) { return report_to_json(correlation_matrix(d)); },
        py::arg("dataset"),
        "Pairwise-complete correlation matrix as a JSON document.");

    m.def(
        "sentiment_score",
        [](const std::string& text, const std::string& lexicon_path) {
            const Lexicon lex =
                lexicon_path.empty() ? default_lexicon() : load_lexicon(lexicon_path);
            auto s = score(text, lex);
            py::dict out;
            out["value"] = s.value;
            out["n_tokens"] = s.n_tokens;
            out["n_hits"] = s.n_hits;
            return out;
        },
        py::arg("text"), py::arg("lexicon_path") = "");

    m.def("hoeffding_bound", &ht::hoeffding_bound, py::arg("range"), py::arg("delta"),
          py::arg("n"));

    py::class_<ht::HoeffdingTree>(m, "HoeffdingTree")
        .def(py::init([](const std::string& category,
                         const std::vector<std::string>& features, double delta,
                         double tau, std::uint64_t grace) {
                 eval::FeatureEncoder enc(to_category(category), features);
                 return ht::HoeffdingTree(enc.specs, {delta, tau, grace, 1.0});
             }),
             py::arg("category"), py::arg("features"), py::arg("delta") = 1e-7,
             py::arg("tau") = 0.05, py::arg("grace") = 200)
        .def("train_one",
             [](ht::HoeffdingTree& t, const std::vector<std::size_t>& values, int label) {
                 t.train_one({values, label});
             })
        .def("predict",
             [](const ht::HoeffdingTree& t, const std::vector<std::size_t>& values) {
                 auto p = t.predict(values);
                 return py::make_tuple(p.cls, p.probability);
             })
        .def_property_readonly("n_trained", &ht::HoeffdingTree::n_trained)
        .def_property_readonly("node_count", &ht::HoeffdingTree::node_count)
        .def("to_json", &ht::HoeffdingTree::to_json)
        .def_static("from_json", &ht::HoeffdingTree::from_json)
        .def("save", &ht::HoeffdingTree::save)
        .def_static("load", &ht::HoeffdingTree::load);

    m.def(
        "encode",
        [](const std::string& category, const std::vector<std::string>& features,
           const Dataset& d, std::size_t index) {
            eval::FeatureEncoder enc(to_category(category), features);
            return enc.encode(d.records.at(index));
        },
        py::arg("category"), py::arg("features"), py::arg("dataset"), py::arg("index"),
        "Attribute branch indices for one record.");

    m.def(
        "auc",
        [](const std::vector<std::pair<double, bool>>& scored) -> py::object {
            auto a = eval::auc(scored);
            if (!a) return py::none();
            return py::float_(*a);
        },
        py::arg("scored"), "Rank-based AUC over (score, is_positive) pairs.");

    m.def(
        "f1_weighted",
        [](std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
            return eval::f1_weighted({tp, fp, tn, fn});
        },
        py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));

    m.def(
        "evaluate_json",
        [](const Dataset& d, double threshold, bool paper_faithful) {
            eval::SuiteOptions opt;
            opt.correlation_threshold = threshold;
            opt.paper_faithful = paper_faithful;
            return eval::reports_to_json(eval::run_category_suite(d, opt));
        },
        py::arg("dataset"), py::arg("threshold") = 0.3, py::arg("paper_faithful") = false,
        "Full experiment block for one category, as JSON.");

    m.def(
        "topics_json",
        [](const Dataset& d, std::size_t k) {
            stc::Options opt;
            return stc::topic_report_to_json(stc::topics_by_polarity(d, k, opt), opt);
        },
        py::arg("dataset"), py::arg("k") = 10,
        "Per-polarity phrase clusters as JSON.");
}
