#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecv/dataset.hpp"
#include "ecv/error.hpp"
#include "ecv/json_io.hpp"
#include "ecv/tuning.hpp"

using namespace ecv;

namespace {

Dataset synthetic(std::size_t n, std::size_t p, std::uint64_t seed, SyntheticModel model = SyntheticModel::Quad) {
    SyntheticSpec s;
    s.model = model;
    s.n = n;
    s.p = p;
    s.seed = seed;
    return simulate(s);
}

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).squaredNorm() / a.size(); }

} // namespace

TEST_CASE("grid construction") {
    const std::vector<std::size_t> g = build_grid(1000, 0.4);
    REQUIRE(g.size() == 58);
    CHECK(g[1] == 15);
    CHECK(g.back() == 855);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == 15 * i);

    // Independent evaluation of the formula.
    for (std::size_t n : {50, 100, 333, 500, 2000}) {
        for (double nu : {0.3, 0.5, 0.7}) {
            const auto k0 = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), nu) + 1e-9));
            const auto last = static_cast<std::size_t>(std::floor(n * (1.0 - 1.0 / std::log(n)) / k0));
            const auto grid = build_grid(n, nu);
            REQUIRE(grid.size() == last + 1);
            CHECK(grid.back() == last * k0);
        }
    }
    const auto h = build_grid(100, 0.5);
    CHECK(h == std::vector<std::size_t>{0, 10, 20, 30, 40, 50, 60, 70});
    CHECK(build_grid(3, 0.1) == std::vector<std::size_t>{0});
}

TEST_CASE("select_k") {
    const std::vector<std::size_t> one = {5};
    const std::vector<std::optional<double>> v1 = {2.0};
    CHECK(select_k(one, v1) == 0);  // row index

    const std::vector<std::size_t> ks = {0, 10, 20, 30};
    const std::vector<std::optional<double>> null_best = {0.5, 0.9, std::nullopt, 0.7};
    CHECK(select_k(ks, null_best) == 0);
    const std::vector<std::optional<double>> tie = {0.9, 0.5, std::nullopt, 0.5};
    CHECK(select_k(ks, tie) == 1);
    const std::vector<std::optional<double>> none = {std::nullopt, std::nullopt};
    const std::vector<std::size_t> two = {1, 2};
    try {
        select_k(two, none);
        FAIL("expected tuning-failed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TuningFailed);
    }

    Rng r(4);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::size_t> grid;
        std::vector<std::optional<double>> values;
        for (std::size_t i = 0; i < 12; ++i) {
            grid.push_back(i * 3);
            if (r.below(4) == 0) values.push_back(std::nullopt);
            else values.push_back(static_cast<double>(r.below(5)));  // plenty of ties
        }
        values[r.below(12)] = 0.0;
        std::size_t best = 0;
        bool found = false;
        double best_v = 0.0;
        for (std::size_t i = 0; i < 12; ++i)
            if (values[i] && (!found || *values[i] < best_v)) {
                found = true;
                best_v = *values[i];
                best = i;
            }
        CHECK(select_k(grid, values) == best);
    }
}

TEST_CASE("ensemble size rules") {
    CHECK(select_m_additive(1.0, 0.8, 0.1, 10000) == 4);
    CHECK(select_m_additive(1.0, 1.0, 0.1, 10000) == 1);
    CHECK(select_m_additive(1.0, 1.2, 0.1, 10000) == 1);
    // n^-1/2 floor: denominator max(1e-6, 0.1).
    CHECK(select_m_additive(1.0, 0.8, 1e-6, 100) == 4);

    const MSelection mult = select_m_multiplicative(1.0, 0.8, 0.1, 10000);
    CHECK(mult.m == 7);
    CHECK_FALSE(mult.fallback_to_additive);
    CHECK(select_m_multiplicative(1.0, 1.0, 0.1, 10000).m == 1);
    const MSelection guard = select_m_multiplicative(1.0, 0.5, 0.1, 10000);
    CHECK(guard.fallback_to_additive);
    CHECK(guard.m == select_m_additive(1.0, 0.5, 0.1, 10000));

    const MSelection b = select_m_budget(1.0, 0.8, 0.05, 10000, 50);
    CHECK(b.m == 7);
    CHECK(b.m == static_cast<std::size_t>(std::ceil(0.4 / (0.05 + 2.0 * 0.2 / 50.0))));
    CHECK_FALSE(b.budget_clipped);
    const MSelection huge = select_m_budget(1.0, 0.8, 0.1, 10000, 1000000000);
    CHECK(huge.m == select_m_additive(1.0, 0.8, 0.1, 10000));
    // 2 (r1 - r2) / (delta + 2 (r1 - r2) / m_max) < m_max, so the clamp only guards rounding.
    const MSelection near = select_m_budget(1.0, 0.2, 1e-9, 10000, 20);
    CHECK(near.m == 20);
    CHECK(select_m_budget(0.8, 1.0, 0.001, 10000, 20).m == 1);
}

TEST_CASE("to-bag rule") {
    CHECK(should_bag(0.5, 0.9, 0.8, 100.0).bag);
    const BagVerdict no = should_bag(1.0, 0.9, 0.9, 5.0);
    CHECK_FALSE(no.bag);
    CHECK(no.lhs == doctest::Approx(0.0));
    CHECK(no.rhs == doctest::Approx(0.5));
    const BagVerdict yes = should_bag(1.0, 0.9, 0.3, 5.0);
    CHECK(yes.bag);
    CHECK(yes.lhs == doctest::Approx(0.6));
}

TEST_CASE("config validation and names") {
    EcvConfig c;
    c.validate();
    c.nu = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.m0 = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.delta = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK(parse_selection_rule("multiplicative") == SelectionRule::Multiplicative);
    CHECK(to_string(SelectionRule::Additive) == "additive");
}

TEST_CASE("ecv_tune end to end") {
    const Dataset d = synthetic(200, 10, 1);
    EcvConfig cfg;
    cfg.seed = 3;
    const TuneResult res = ecv_tune(d, RidgeSpec{}, cfg);
    CHECK(std::find(res.grid.begin(), res.grid.end(), res.k_hat) != res.grid.end());
    CHECK(res.m_hat >= 1);
    REQUIRE(res.surface.has_value());
    if (res.k_hat > 0) {
        REQUIRE(res.ensemble.has_value());
        CHECK(res.ensemble->size() == res.m_hat);
        CHECK(res.ensemble->k == res.k_hat);
    }
    const TuneResult again = ecv_tune(d, RidgeSpec{}, cfg);
    CHECK(to_json(again).dump() == to_json(res).dump());

    // Huge delta: a single base predictor at the best k.
    cfg.delta = 1000.0;
    const TuneResult single = ecv_tune(d, TreeSpec{}, cfg);
    CHECK(single.m_hat == 1);
    CHECK(single.k_hat > 0);

    // The null row wins when every fitted row is worse than predicting zero.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(60, 2);
    Rng r(2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = r.normal();
    Eigen::VectorXd y(60);
    for (Eigen::Index i = 0; i < 60; ++i) y(i) = 0.01 * r.normal();
    EcvConfig small;
    small.grid = std::vector<std::size_t>{0, 4};
    const TuneResult nul = ecv_tune(Dataset::make(x, y), KnnSpec{1}, small);
    CHECK(nul.k_hat == 0);
    CHECK_FALSE(nul.ensemble.has_value());
    CHECK(nul.predict(x).isZero());
}

TEST_CASE("ecv_tune budget, multiplicative and to-bag paths") {
    const Dataset d = synthetic(150, 8, 2);
    EcvConfig cfg;
    cfg.m_max = 3;
    cfg.delta = 0.001;
    const TuneResult budget = ecv_tune(d, TreeSpec{}, cfg);
    CHECK(budget.m_hat <= 3);

    cfg = {};
    cfg.selection = SelectionRule::Multiplicative;
    const TuneResult mult = ecv_tune(d, RidgeSpec{}, cfg);
    CHECK(mult.m_hat >= 1);

    cfg = {};
    cfg.zeta = 1e9;  // demand an impossible improvement
    const TuneResult nobag = ecv_tune(d, TreeSpec{}, cfg);
    CHECK(nobag.to_bag.evaluated);
    if (nobag.k_hat > 0) {
        CHECK_FALSE(nobag.to_bag.bag);
        CHECK(nobag.m_hat == 1);
    }

    cfg = {};
    cfg.normalize = true;
    const TuneResult norm = ecv_tune(d, RidgeSpec{}, cfg);
    CHECK(norm.normalized);
}

TEST_CASE("ecv_tune with ridge is delta-optimal on the grid") {
    // Ridge base, model quad, n = 1000, p = 100; 90% of seeds must pass.
    constexpr double kDelta = 0.05;
    constexpr std::size_t kMmax = 50;
    int passed = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        SyntheticSpec spec;
        spec.model = SyntheticModel::Quad;
        spec.n = 3000;
        spec.p = 100;
        spec.seed = 600 + s;
        const Dataset all = simulate(spec);
        std::vector<std::size_t> a(1000), b(2000);
        std::iota(a.begin(), a.end(), std::size_t{0});
        std::iota(b.begin(), b.end(), std::size_t{1000});
        const Dataset train = all.rows(a), test = all.rows(b);
        EcvConfig cfg;
        cfg.nu = 0.6;
        cfg.delta = kDelta;
        cfg.seed = spec.seed;
        const TuneResult res = ecv_tune(train, RidgeSpec{0.1}, cfg);
        const double risk = mse(test.response, res.predict(test.features));
        const double null_risk = test.response.squaredNorm() / 2000.0;
        double best = null_risk;
        for (std::size_t k : res.grid) {
            if (k == 0) continue;
            const FittedEnsemble ens = fit_ensemble(RidgeSpec{0.1}, train, k, kMmax, SamplingMode::Bagging, 99);
            const Eigen::MatrixXd preds = member_predictions(ens, test.features);
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(2000);
            for (std::size_t m = 1; m <= kMmax; ++m) {
                sum += preds.col(static_cast<Eigen::Index>(m - 1));
                best = std::min(best, mse(test.response, sum / static_cast<double>(m)));
            }
        }
        if (risk <= best + kDelta * null_risk + 0.05 * null_risk) ++passed;
    }
    CHECK(passed >= 18);
}
