#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "skyreview/correlation.hpp"
#include "skyreview/data.hpp"
#include "skyreview/eval.hpp"
#include "skyreview/hoeffding.hpp"
#include "skyreview/sentiment.hpp"
#include "skyreview/stc.hpp"

namespace fs = std::filesystem;
using namespace skyreview;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

struct GlobalOpts {
    std::string out_dir = "out";
    std::string lexicon_path;
    std::string endpoint;
    double delta = 1e-7;
    double tau = 0.05;
    std::uint64_t grace = 200;
    double threshold = 0.3;
    bool paper_faithful = false;
    bool markdown = false;

    ht::Params params() const { return {delta, tau, grace, 1.0}; }

    Lexicon lexicon() const {
        if (!lexicon_path.empty()) return load_lexicon(lexicon_path);
        return default_lexicon();
    }

    Scorer scorer() const {
        std::string ep = endpoint;
        if (ep.empty()) {
            if (const char* env = std::getenv("SENTIMENT_ENDPOINT")) ep = env;
        }
        if (!ep.empty()) {
            auto remote = std::make_shared<RemoteScorer>(
                ep, (fs::path(out_dir) / "sentiment_cache.jsonl").string());
            return [remote](const std::string& text) { return (*remote)(text); };
        }
        Lexicon lex = lexicon();
        return [lex = std::move(lex)](const std::string& text) { return score(text, lex); };
    }

    std::string cache_path(Category c) const {
        return (fs::path(out_dir) / (std::string(category_name(c)) + ".jsonl")).string();
    }
};

Dataset load_cache(const GlobalOpts& g, Category c) {
    const std::string path = g.cache_path(c);
    if (!fs::exists(path))
        throw std::runtime_error("dataset cache missing: " + path +
                                 " (run `skyreview ingest` first)");
    return load_jsonl(path);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_ingest(const GlobalOpts& g, const std::string& input, const std::string& category,
               bool force_sentiment) {
    const Category cat = category_from_name(category);
    auto res = ingest(input, cat);
    auto annotated = annotate(res.dataset, g.scorer(), force_sentiment);

    fs::create_directories(g.out_dir);
    save_jsonl(annotated, g.cache_path(cat));
    save_rejections(res.warnings,
                    (fs::path(g.out_dir) / (category + ".rejects.jsonl")).string());

    const auto st = stats(annotated);
    std::cout << "category: " << category_name(cat) << "\n"
              << "reviews: " << st.n_reviews << "\n"
              << "users: " << st.n_users << "\n"
              << "labeled: " << st.n_labeled << "\n";
    if (st.satisfaction_rate)
        std::cout << "satisfaction: " << *st.satisfaction_rate << "\n";
    else
        std::cout << "satisfaction: n/a\n";
    std::cout << "duplicate user/entity rows: " << st.n_duplicate_user_entity << "\n"
              << "warnings: " << res.warnings.size() << "\n";
    return kExitOk;
}

int cmd_analyze(const GlobalOpts& g, const std::string& category) {
    const Category cat = category_from_name(category);
    auto d = load_cache(g, cat);
    auto rep = correlation_matrix(d);

    write_file((fs::path(g.out_dir) / (category + ".correlation.json")).string(),
               report_to_json(rep));
    write_file((fs::path(g.out_dir) / (category + ".correlation.csv")).string(),
               report_to_csv(rep));

    auto top = select_features(rep, -1.0);
    std::cout << "top correlates of overall (" << category << "):\n";
    const auto oi = rep.index_of("overall");
    for (std::size_t i = 0; i < top.size() && i < 4; ++i) {
        const auto fi = rep.index_of(top[i]);
        std::cout << "  " << (i + 1) << ". " << top[i];
        if (fi && oi && rep.r[*fi][*oi]) std::cout << "  r=" << *rep.r[*fi][*oi];
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_cluster(const GlobalOpts& g, const std::string& category, std::size_t k,
                const stc::Options& opt) {
    const Category cat = category_from_name(category);
    auto d = load_cache(g, cat);
    auto rep = stc::topics_by_polarity(d, k, opt);
    write_file((fs::path(g.out_dir) / (category + ".topics.json")).string(),
               stc::topic_report_to_json(rep, opt));
    std::cout << stc::topic_report_to_table(rep);
    return kExitOk;
}

int cmd_train(const GlobalOpts& g, const std::string& category,
              const std::string& features_csv, const std::string& model_path) {
    const Category cat = category_from_name(category);
    auto d = load_cache(g, cat);

    Dataset labeled;
    labeled.category = cat;
    for (const auto& r : d.records)
        if (r.recommended) labeled.records.push_back(r);
    labeled = sort_chronological(labeled);
    if (labeled.records.empty()) throw std::runtime_error("no labeled records");

    eval::FeatureEncoder enc(cat, split_csv_list(features_csv));
    ht::HoeffdingTree tree(enc.specs, g.params());
    for (const auto& r : labeled.records)
        tree.train_one({enc.encode(r), *r.recommended ? ht::kPositive : ht::kNegative});
    tree.save(model_path);
    std::cout << "trained on " << tree.n_trained() << " records, " << tree.node_count()
              << " nodes, " << tree.split_audit().size() << " splits -> " << model_path
              << "\n";
    return kExitOk;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& category,
                 const std::string& features_csv) {
    eval::SuiteOptions opt;
    opt.correlation_threshold = g.threshold;
    opt.params = g.params();
    opt.paper_faithful = g.paper_faithful;

    std::vector<eval::EvalReport> reports;
    std::vector<std::string> warnings;
    if (!features_csv.empty()) {
        const Category cat = category_from_name(category);
        eval::ExperimentSpec spec;
        spec.category = cat;
        spec.features = split_csv_list(features_csv);
        spec.params = opt.params;
        spec.name = features_csv;
        reports.push_back(eval::run_experiment(spec, load_cache(g, cat)));
    } else if (category == "all") {
        std::vector<Dataset> datasets;
        for (Category c : all_categories()) {
            if (fs::exists(g.cache_path(c))) datasets.push_back(load_cache(g, c));
        }
        reports = eval::run_paper_suite(datasets, opt, &warnings);
    } else {
        reports = eval::run_category_suite(load_cache(g, category_from_name(category)), opt);
    }

    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    fs::create_directories(g.out_dir);
    const std::string stem = features_csv.empty() ? category : category + ".single";
    write_file((fs::path(g.out_dir) / (stem + ".eval.json")).string(),
               eval::reports_to_json(reports));
    write_file((fs::path(g.out_dir) / (stem + ".eval.csv")).string(),
               eval::reports_to_csv(reports));
    if (g.markdown)
        std::cout << eval::reports_to_markdown(reports);
    else
        std::cout << eval::reports_to_csv(reports);
    return kExitOk;
}

int cmd_report(const GlobalOpts& g, const std::string& in_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + in_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto reports = eval::reports_from_json(buf.str());
    if (g.markdown)
        std::cout << eval::reports_to_markdown(reports);
    else
        std::cout << eval::reports_to_csv(reports);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skyreview: airline-review satisfaction analysis toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.out_dir, "Output / cache directory");
    app.add_option("--lexicon", g.lexicon_path, "Sentiment lexicon file (token<TAB>polarity)");
    app.add_option("--endpoint", g.endpoint,
                   "Remote sentiment endpoint (or env SENTIMENT_ENDPOINT)");
    app.add_option("--delta", g.delta, "Hoeffding split confidence");
    app.add_option("--tau", g.tau, "Hoeffding tie threshold");
    app.add_option("--grace", g.grace, "Observations between split checks");
    app.add_option("--threshold", g.threshold, "Correlation cutoff for the combination model");
    app.add_flag("--paper-faithful", g.paper_faithful,
                 "Select combination features on the full dataset, not the train split");
    app.add_flag("--markdown", g.markdown, "Emit results as a markdown table");

    std::string category, input, features, model_path = "model.json", report_in;
    bool force_sentiment = false;
    std::size_t k = 10;
    stc::Options stc_opt;

    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a raw CSV into the dataset cache");
    ingest_cmd->add_option("--category", category, "airport|lounge|airline|seat")->required();
    ingest_cmd->add_option("--input", input, "CSV file")->required();
    ingest_cmd->add_flag("--force-sentiment", force_sentiment, "Re-score existing sentiments");

    auto* analyze_cmd = app.add_subcommand("analyze", "Correlation matrices and feature ranking");
    analyze_cmd->add_option("--category", category)->required();

    auto* cluster_cmd = app.add_subcommand("cluster", "Suffix-tree topic clusters per polarity");
    cluster_cmd->add_option("--category", category)->required();
    cluster_cmd->add_option("-k,--top-k", k, "Clusters per polarity");
    cluster_cmd->add_option("--max-phrase-len", stc_opt.max_phrase_len);
    cluster_cmd->add_option("--top-k-bases", stc_opt.top_k_bases);
    cluster_cmd->add_option("--overlap", stc_opt.overlap_threshold);

    auto* train_cmd = app.add_subcommand("train", "Train a Hoeffding tree and save it");
    train_cmd->add_option("--category", category)->required();
    train_cmd->add_option("--features", features, "Comma-separated feature names")->required();
    train_cmd->add_option("--model", model_path, "Model output path");

    auto* eval_cmd = app.add_subcommand("evaluate", "Run the experiment suite");
    eval_cmd->add_option("--category", category, "Category name or 'all'")->required();
    eval_cmd->add_option("--features", features, "Single run with these features only");

    auto* report_cmd = app.add_subcommand("report", "Render a saved eval report");
    report_cmd->add_option("--in", report_in, "Path to a .eval.json file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(g, input, category, force_sentiment);
        if (analyze_cmd->parsed()) return cmd_analyze(g, category);
        if (cluster_cmd->parsed()) return cmd_cluster(g, category, k, stc_opt);
        if (train_cmd->parsed()) return cmd_train(g, category, features, model_path);
        if (eval_cmd->parsed()) return cmd_evaluate(g, category, features);
        if (report_cmd->parsed()) return cmd_report(g, report_in);
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
