#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;  // path to the CLI executable, from argv[1]

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() /
                         ("skyreview_cli_out_" + std::to_string(std::random_device{}()));
    const std::string cmd =
        "'" + g_binary + "' " + args + " > '" + out.string() + "' 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    fs::remove(out);
    return r;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() /
              ("skyreview_cli_ws_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    // 40-row seat CSV: recommendation tracks the overall rating, dates ascend
    std::string write_seat_csv() const {
        std::ostringstream csv;
        csv << "airline_name,author,date,content,overall_rating,seat_legroom_rating,"
               "seat_width_rating,recommended\n";
        for (int i = 0; i < 40; ++i) {
            const int overall = 1 + (i * 7) % 10;
            const bool rec = overall >= 6;
            csv << "AirX,user" << i << ",2014-" << (1 + i / 28 % 12 < 10 ? "0" : "")
                << (1 + i / 28 % 12) << "-" << (1 + i % 28 < 10 ? "0" : "") << (1 + i % 28)
                << "," << (rec ? "great comfortable seat" : "terrible cramped seat") << ","
                << overall << "," << (rec ? 5 : 1) << "," << (rec ? 4 : 2) << ","
                << (rec ? 1 : 0) << "\n";
        }
        const std::string p = path("seat.csv");
        std::ofstream(p) << csv.str();
        return p;
    }

    std::string out_dir() const { return path("out"); }
    std::string global_flags() const { return "--out '" + out_dir() + "' "; }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("ingest writes the cache and prints dataset stats") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    auto r = run(ws.global_flags() + "ingest --category seat --input '" + csv + "'");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("reviews: 40") != std::string::npos);
    CHECK(r.output.find("users: 40") != std::string::npos);
    CHECK(r.output.find("labeled: 40") != std::string::npos);
    CHECK(r.output.find("satisfaction: 0.5") != std::string::npos);
    CHECK(fs::exists(ws.out_dir() + "/seat.jsonl"));
    CHECK(fs::exists(ws.out_dir() + "/seat.rejects.jsonl"));
}

TEST_CASE("ingest of a missing file exits with the bad-input code") {
    Workspace ws;
    auto r = run(ws.global_flags() + "ingest --category seat --input /no/such.csv");
    CHECK(r.exit_code == 2);
}

TEST_CASE("unknown category name exits with the bad-input code") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    auto r = run(ws.global_flags() + "ingest --category hotel --input '" + csv + "'");
    CHECK(r.exit_code == 2);
}

TEST_CASE("re-ingesting the same input reproduces the cache byte for byte") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    REQUIRE(run(ws.global_flags() + "ingest --category seat --input '" + csv + "'")
                .exit_code == 0);
    const std::string first = slurp(ws.out_dir() + "/seat.jsonl");
    REQUIRE(run(ws.global_flags() + "ingest --category seat --input '" + csv + "'")
                .exit_code == 0);
    CHECK(slurp(ws.out_dir() + "/seat.jsonl") == first);
    CHECK(!first.empty());
}

TEST_CASE("analyze requires an existing cache") {
    Workspace ws;
    auto r = run(ws.global_flags() + "analyze --category seat");
    CHECK(r.exit_code == 2);
}

TEST_CASE("full pipeline: analyze, cluster, train, evaluate, report") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    REQUIRE(run(ws.global_flags() + "ingest --category seat --input '" + csv + "'")
                .exit_code == 0);

    auto analyze = run(ws.global_flags() + "analyze --category seat");
    CHECK(analyze.exit_code == 0);
    CHECK(analyze.output.find("top correlates of overall") != std::string::npos);
    CHECK(fs::exists(ws.out_dir() + "/seat.correlation.json"));
    CHECK(fs::exists(ws.out_dir() + "/seat.correlation.csv"));

    auto cluster = run(ws.global_flags() + "cluster --category seat -k 5");
    CHECK(cluster.exit_code == 0);
    CHECK(fs::exists(ws.out_dir() + "/seat.topics.json"));

    const std::string model = ws.path("model.json");
    auto train = run(ws.global_flags() + "train --category seat --features overall --model '" +
                     model + "'");
    CHECK(train.exit_code == 0);
    CHECK(train.output.find("trained on 40 records") != std::string::npos);
    CHECK(fs::exists(model));

    auto eval = run(ws.global_flags() + "evaluate --category seat");
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.rfind("category,name,", 0) == 0);
    CHECK(fs::exists(ws.out_dir() + "/seat.eval.json"));
    CHECK(fs::exists(ws.out_dir() + "/seat.eval.csv"));

    auto md = run(ws.global_flags() +
                  "--markdown report --in '" + ws.out_dir() + "/seat.eval.json'");
    CHECK(md.exit_code == 0);
    CHECK(md.output.find("**seat reviews**") != std::string::npos);
    CHECK(md.output.find("| Feature | F1 | AUC |") != std::string::npos);
}

TEST_CASE("evaluate with an explicit feature list does a single run") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    REQUIRE(run(ws.global_flags() + "ingest --category seat --input '" + csv + "'")
                .exit_code == 0);
    auto r = run(ws.global_flags() + "evaluate --category seat --features overall,seat_width");
    CHECK(r.exit_code == 0);
    // header plus exactly one data row
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 2);
    CHECK(r.output.find("\"overall;seat_width\"") != std::string::npos);
    CHECK(fs::exists(ws.out_dir() + "/seat.single.eval.json"));
}

TEST_CASE("evaluate refuses an unknown feature with the bad-input code") {
    Workspace ws;
    const std::string csv = ws.write_seat_csv();
    REQUIRE(run(ws.global_flags() + "ingest --category seat --input '" + csv + "'")
                .exit_code == 0);
    auto r = run(ws.global_flags() + "evaluate --category seat --features queuing");
    CHECK(r.exit_code == 2);
}

TEST_CASE("report on a missing file exits with the bad-input code") {
    Workspace ws;
    auto r = run("report --in '" + ws.path("nope.eval.json") + "'");
    CHECK(r.exit_code == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-cli-binary> [doctest args]\n");
        return 1;
    }
    g_binary = argv[1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv + 1);
    return ctx.run();
}
