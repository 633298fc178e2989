#include "doctest.h"

#include <fstream>
#include <numeric>
#include <set>

#include "ecv/baselines.hpp"
#include "ecv/dataset.hpp"
#include "ecv/error.hpp"
#include "oracles.hpp"

using namespace ecv;

namespace {

Dataset synthetic(std::size_t n, std::size_t p, std::uint64_t seed) {
    SyntheticSpec s;
    s.model = SyntheticModel::Quad;
    s.n = n;
    s.p = p;
    s.seed = seed;
    return simulate(s);
}

std::pair<std::size_t, std::size_t> brute_argmin(const ErrorTable& t) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_v = 0.0;
    bool found = false;
    for (std::size_t m = 1; m <= t.m_max; ++m)
        for (std::size_t r = 0; r < t.ks.size(); ++r) {
            const auto& v = t.at(r, m);
            if (v && (!found || *v < best_v)) {
                found = true;
                best_v = *v;
                best = {t.ks[r], m};
            }
        }
    return best;
}

} // namespace

TEST_CASE("validation table equals from-scratch ensembles") {
    const Dataset train = synthetic(80, 5, 1);
    const Dataset val = synthetic(30, 5, 2);
    const std::vector<std::size_t> grid = {0, 20, 40, 200};
    std::size_t fits = 0;
    const ErrorTable t = validation_table(train, val, TreeSpec{}, grid, 5, SamplingMode::Bagging, 9, &fits);
    CHECK(fits == 10);
    const double null_v = val.response.squaredNorm() / 30.0;
    for (std::size_t m = 1; m <= 5; ++m) CHECK(*t.at(0, m) == doctest::Approx(null_v));
    for (std::size_t m = 1; m <= 5; ++m) CHECK_FALSE(t.at(3, m).has_value());

    for (std::size_t r : {1, 2}) {
        const FittedEnsemble ens = fit_ensemble(TreeSpec{}, train, grid[r], 5, SamplingMode::Bagging, 9);
        for (std::size_t m : {1, 3, 5}) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(30);
            for (std::size_t l = 0; l < m; ++l) mean += ens.members[l].predict(val.features);
            mean /= static_cast<double>(m);
            CHECK(*t.at(r, m) == doctest::Approx(oracle::mse(val.response, mean)).epsilon(1e-12));
        }
    }
}

TEST_CASE("select_from_table matches a brute-force scan") {
    Rng r(5);
    for (int trial = 0; trial < 100; ++trial) {
        ErrorTable t;
        t.ks = {0, 5, 10, 15};
        t.m_max = 6;
        for (std::size_t i = 0; i < t.ks.size() * t.m_max; ++i)
            t.values.push_back(r.below(5) == 0 ? std::nullopt : std::optional<double>(static_cast<double>(r.below(6))));
        t.values[r.below(t.values.size())] = 0.0;
        const auto [row, m] = select_from_table(t);
        CHECK(std::make_pair(t.ks[row], m) == brute_argmin(t));
    }
}

TEST_CASE("folds partition the rows") {
    const auto folds = make_folds(23, 5, 3);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK((f.size() == 4 || f.size() == 5));
        CHECK(std::is_sorted(f.begin(), f.end()));
        seen.insert(f.begin(), f.end());
    }
    CHECK(seen.size() == 23);
    CHECK(make_folds(23, 5, 3) == folds);
    CHECK_THROWS_AS(make_folds(10, 6, 1), Error);
}

TEST_CASE("split and k-fold tuners") {
    const Dataset d = synthetic(120, 6, 3);
    const std::vector<std::size_t> grid = {0, 20, 40, 60};
    const BaselineSpec split{SampleSplit{}, 8, grid, 4};
    const TuneResult s = split_cv_tune(d, RidgeSpec{}, split, SamplingMode::Bagging);
    REQUIRE(s.validation.has_value());
    CHECK(std::make_pair(s.k_hat, s.m_hat) == brute_argmin(*s.validation));
    CHECK(s.method == "split");
    if (s.k_hat > 0) CHECK(s.ensemble->size() == s.m_hat);

    const BaselineSpec kf{KFold{5}, 8, grid, 4};
    std::size_t fits = 0;
    const auto folds = make_folds(120, 5, 4);
    const ErrorTable avg = kfold_table(d, folds, RidgeSpec{}, grid, 8, SamplingMode::Bagging, 4, &fits);
    CHECK(fits == 5 * 3 * 8);
    const TuneResult k = kfold_cv_tune(d, RidgeSpec{}, kf, SamplingMode::Bagging);
    CHECK(std::make_pair(k.k_hat, k.m_hat) == brute_argmin(*k.validation));
    CHECK(k.method == "kfold5");

    // Reversing the fold list does not change the averaged table.
    std::vector<std::vector<std::size_t>> reversed(folds.rbegin(), folds.rend());
    const ErrorTable rev = kfold_table(d, reversed, RidgeSpec{}, grid, 8, SamplingMode::Bagging, 4);
    for (std::size_t i = 0; i < avg.values.size(); ++i)
        if (avg.values[i]) CHECK(*rev.values[i] == doctest::Approx(*avg.values[i]).epsilon(1e-13));

    // With M_max = 1 only k is selected.
    const BaselineSpec one{SampleSplit{}, 1, grid, 4};
    CHECK(split_cv_tune(d, RidgeSpec{}, one, SamplingMode::Bagging).m_hat == 1);

    const BaselineSpec bad{SampleSplit{1.0}, 8, grid, 4};
    CHECK_THROWS_AS(split_cv_tune(d, RidgeSpec{}, bad, SamplingMode::Bagging), Error);
}

TEST_CASE("compare report") {
    const Dataset train = synthetic(150, 6, 6);
    const Dataset test = synthetic(300, 6, 7);
    const std::vector<std::size_t> grid = {0, 30, 60, 90};
    EcvConfig cfg;
    cfg.m_max = 10;
    cfg.seed = 2;
    const std::vector<BaselineSpec> baselines = {{SampleSplit{}, 10, grid, 2}, {KFold{3}, 10, grid, 2}};
    const ComparisonReport a = compare(train, test, TreeSpec{}, cfg, baselines);
    REQUIRE(a.rows.size() == 3);
    CHECK(a.rows[0].method == "ecv");
    CHECK(a.rows[1].method == "split");
    CHECK(a.rows[2].method == "kfold3");
    for (const auto& row : a.rows) {
        CHECK(row.suboptimality >= -1e-12);
        CHECK(row.config_hash == a.rows[0].config_hash);
        CHECK(row.tune_seconds >= 0.0);
    }
    const ComparisonReport b = compare(train, test, TreeSpec{}, cfg, baselines);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.rows[i].k_hat == b.rows[i].k_hat);
        CHECK(a.rows[i].m_hat == b.rows[i].m_hat);
        CHECK(a.rows[i].test_error == b.rows[i].test_error);
    }

    const auto dir = oracle::temp_dir("compare");
    write_comparison_csv(dir / "c.csv", a);
    std::ifstream in(dir / "c.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "method,m_hat,k_hat,tune_seconds,test_nmse,suboptimality");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 3);
    CHECK(parse_metric("mse") == Metric::Mse);
    CHECK(config_hash(TreeSpec{}, grid) != config_hash(RidgeSpec{}, grid));
}
