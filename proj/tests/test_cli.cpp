#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "ecv/cli.hpp"
#include "ecv/dataset.hpp"
#include "oracles.hpp"

using namespace ecv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"ecv"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("simulate writes train and test CSVs") {
    const fs::path dir = oracle::temp_dir("cli_sim");
    const std::vector<std::string> args = {"simulate", "--model", "quad", "--n", "1000", "--p", "100",
                                           "--rho", "0.5", "--sigma", "0.5", "--seed", "7",
                                           "--out", (dir / "a").string()};
    REQUIRE(cli(args).code == 0);
    CHECK(line_count(dir / "a" / "train.csv") == 1001);
    CHECK(line_count(dir / "a" / "test.csv") == 2001);
    CHECK(load_csv(dir / "a" / "train.csv").p() == 100);
    CHECK(fs::exists(dir / "a" / "run_config.json"));

    std::vector<std::string> again = args;
    again.back() = (dir / "b").string();
    REQUIRE(cli(again).code == 0);
    CHECK(slurp(dir / "a" / "train.csv") == slurp(dir / "b" / "train.csv"));
    CHECK(slurp(dir / "a" / "test.csv") == slurp(dir / "b" / "test.csv"));
}

TEST_CASE("noiseless linear data reload as y = X beta") {
    const fs::path dir = oracle::temp_dir("cli_lin");
    REQUIRE(cli({"simulate", "--model", "linear", "--n", "50", "--p", "8", "--sigma", "0", "--seed", "2",
                 "--n-test", "5", "--out", dir.string()})
                .code == 0);
    const Dataset d = load_csv(dir / "train.csv");
    const Eigen::VectorXd fit = d.features * signal_beta(ar1_covariance(8, 0.5));
    CHECK((fit - d.response).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tune writes a selection trace and surface") {
    const fs::path dir = oracle::temp_dir("cli_tune");
    REQUIRE(cli({"simulate", "--n", "200", "--p", "10", "--seed", "3", "--n-test", "100", "--out", dir.string()})
                .code == 0);
    const Outcome o = cli({"tune", "--train", (dir / "train.csv").string(), "--test", (dir / "test.csv").string(),
                           "--predictor", "ridge", "--lambda", "0.1", "--nu", "0.4", "--m0", "10", "--delta",
                           "0.05", "--seed", "1", "--out", (dir / "t").string()});
    REQUIRE(o.code == 0);
    const auto j = read_json(dir / "t" / "tune.json");
    const auto grid = j.at("grid").get<std::vector<std::size_t>>();
    CHECK(std::find(grid.begin(), grid.end(), j.at("k_hat").get<std::size_t>()) != grid.end());
    CHECK(j.at("m_hat").get<std::size_t>() >= 1);
    CHECK(j.contains("test_nmse"));
    CHECK(j.at("components").size() == grid.size());
    CHECK(line_count(dir / "t" / "surface.csv") == 1 + grid.size() * 7);
    const auto cfg = read_json(dir / "t" / "run_config.json");
    CHECK(cfg.at("ecv").at("nu").get<double>() == 0.4);
    CHECK(cfg.at("predictor").at("kind") == "ridge");
}

TEST_CASE("config file, flags and ECV_SEED precedence") {
    const fs::path dir = oracle::temp_dir("cli_cfg");
    REQUIRE(cli({"simulate", "--n", "120", "--p", "6", "--seed", "3", "--n-test", "10", "--out", dir.string()})
                .code == 0);
    {
        std::ofstream c(dir / "cfg.json");
        c << R"({"predictor": {"kind": "knn", "neighbors": 3}, "ecv": {"nu": 0.5, "m0": 4}, "seed": 11})";
    }
    const std::string train = (dir / "train.csv").string();
    REQUIRE(cli({"tune", "--train", train, "--config", (dir / "cfg.json").string(), "--m0", "5", "--out",
                 (dir / "a").string()})
                .code == 0);
    const auto a = read_json(dir / "a" / "run_config.json");
    CHECK(a.at("predictor").at("kind") == "knn");
    CHECK(a.at("predictor").at("neighbors") == 3);
    CHECK(a.at("ecv").at("m0") == 5);
    CHECK(a.at("ecv").at("seed") == 11);

    setenv("ECV_SEED", "42", 1);
    REQUIRE(cli({"tune", "--train", train, "--m0", "3", "--out", (dir / "b").string()}).code == 0);
    CHECK(read_json(dir / "b" / "run_config.json").at("ecv").at("seed") == 42);
    REQUIRE(cli({"tune", "--train", train, "--m0", "3", "--seed", "8", "--out", (dir / "c").string()}).code == 0);
    CHECK(read_json(dir / "c" / "run_config.json").at("ecv").at("seed") == 8);
    unsetenv("ECV_SEED");

    {
        std::ofstream c(dir / "bad.json");
        c << R"({"ecv": {"nu": 0.5, "bogus": 1}})";
    }
    const Outcome bad = cli({"tune", "--train", train, "--config", (dir / "bad.json").string()});
    CHECK(bad.code != 0);
    CHECK(bad.err.rfind("error: invalid-parameter: ", 0) == 0);
    CHECK(bad.err.find("bogus") != std::string::npos);
}

TEST_CASE("errors are reported on one line with a class") {
    const Outcome missing = cli({"tune", "--train", "/nonexistent/x.csv"});
    CHECK(missing.code != 0);
    CHECK(missing.err.rfind("error: io: ", 0) == 0);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const fs::path dir = oracle::temp_dir("cli_err");
    {
        std::ofstream f(dir / "x.csv");
        f << "a,y\n1,2\nfoo,3\n";
    }
    const Outcome parse = cli({"tune", "--train", (dir / "x.csv").string()});
    CHECK(parse.err.rfind("error: parse: ", 0) == 0);

    REQUIRE(cli({"simulate", "--n", "60", "--p", "5", "--n-test", "5", "--out", dir.string()}).code == 0);
    const Outcome param = cli({"tune", "--train", (dir / "train.csv").string(), "--nu", "2"});
    CHECK(param.err.rfind("error: invalid-parameter: ", 0) == 0);
    const Outcome mismatch =
        cli({"tune", "--train", (dir / "train.csv").string(), "--predictor", "tree", "--lambda", "1"});
    CHECK(mismatch.err.rfind("error: invalid-parameter: ", 0) == 0);
    CHECK(cli({"nosuchcommand"}).code != 0);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("surface export with held-out risk") {
    const fs::path dir = oracle::temp_dir("cli_surface");
    REQUIRE(cli({"simulate", "--n", "150", "--p", "6", "--seed", "4", "--n-test", "200", "--out", dir.string()})
                .code == 0);
    REQUIRE(cli({"surface", "--train", (dir / "train.csv").string(), "--grid", "0,10,20,30,40,50,60,70,80,90",
                 "--m-list", "1,2,5,10,20,50,inf", "--with-test", (dir / "test.csv").string(), "--out",
                 (dir / "s").string()})
                .code == 0);
    CHECK(line_count(dir / "s" / "surface.csv") == 71);
    std::ifstream in(dir / "s" / "surface.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "k,M,estimate,oob_min,oob_mean,skipped_pairs,test_risk");
    for (int i = 0; i < 9; ++i) std::getline(in, row);  // k = 10, M = 2
    CHECK(row.rfind("10,2,", 0) == 0);
    CHECK(row.substr(row.rfind(',') + 1) != "NA");
}

TEST_CASE("compare and size sweep") {
    const fs::path dir = oracle::temp_dir("cli_compare");
    REQUIRE(cli({"simulate", "--model", "quad", "--n", "160", "--p", "5", "--seed", "5", "--n-test", "200", "--out",
                 dir.string()})
                .code == 0);
    const std::vector<std::string> base = {"compare", "--train", (dir / "train.csv").string(), "--test",
                                           (dir / "test.csv").string(), "--predictor", "ridge", "--m-max", "6",
                                           "--nu", "0.6"};
    std::vector<std::string> one = base;
    one.insert(one.end(), {"--out", (dir / "one").string()});
    REQUIRE(cli(one).code == 0);
    CHECK(line_count(dir / "one" / "compare.csv") == 4);

    std::vector<std::string> sweep = base;
    sweep.insert(sweep.end(), {"--sizes", "40,80,120,160", "--metric", "mse", "--out", (dir / "sweep").string()});
    REQUIRE(cli(sweep).code == 0);
    for (const char* n : {"40", "80", "120", "160"}) {
        const fs::path f = dir / "sweep" / (std::string("compare_n") + n + ".csv");
        REQUIRE(fs::exists(f));
        CHECK(line_count(f) == 4);
    }
    std::ifstream in(dir / "sweep" / "compare_n40.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "method,m_hat,k_hat,tune_seconds,test_mse,suboptimality");
}
