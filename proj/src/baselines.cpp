#include "ecv/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ecv/error.hpp"
#include "ecv/json_io.hpp"
#include "ecv/rng.hpp"

namespace ecv {

void BaselineSpec::validate() const {
    require(m_max >= 1, ErrorKind::InvalidParameter, "m_max must be >= 1");
    require(!grid.empty(), ErrorKind::InvalidParameter, "baseline grid is empty");
    if (const auto* s = std::get_if<SampleSplit>(&method))
        require(s->alpha > 0.0 && s->alpha < 1.0, ErrorKind::InvalidParameter,
                "alpha must lie in (0, 1)");
    if (const auto* f = std::get_if<KFold>(&method))
        require(f->folds >= 2, ErrorKind::InvalidParameter, "folds must be >= 2");
}

std::string BaselineSpec::name() const {
    if (const auto* f = std::get_if<KFold>(&method)) return "kfold" + std::to_string(f->folds);
    return "split";
}

ErrorTable validation_table(const Dataset& train, const Dataset& validation,
                            const PredictorSpec& spec, std::span<const std::size_t> grid,
                            std::size_t m_max, SamplingMode mode, std::uint64_t seed,
                            std::size_t* base_fits) {
    require(validation.n() >= 1, ErrorKind::InvalidParameter, "validation part is empty");
    ErrorTable table;
    table.ks.assign(grid.begin(), grid.end());
    table.m_max = m_max;
    table.values.assign(grid.size() * m_max, std::nullopt);

    const Eigen::VectorXd& y = validation.response;
    const double inv_n = 1.0 / static_cast<double>(validation.n());
    for (std::size_t r = 0; r < grid.size(); ++r) {
        const std::size_t k = grid[r];
        if (k == 0) {
            const double null_err = y.squaredNorm() * inv_n;
            for (std::size_t m = 1; m <= m_max; ++m) table.at(r, m) = null_err;
            continue;
        }
        if (k > train.n()) continue;
        std::optional<FittedEnsemble> ens;
        try {
            ens = fit_ensemble(spec, train, k, m_max, mode, seed);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InvalidParameter) throw;
            continue;
        }
        if (base_fits) *base_fits += m_max;
        const Eigen::MatrixXd preds = member_predictions(*ens, validation.features);
        Eigen::VectorXd running = Eigen::VectorXd::Zero(y.size());
        for (std::size_t m = 1; m <= m_max; ++m) {
            running += preds.col(static_cast<Eigen::Index>(m - 1));
            table.at(r, m) =
                (y - running / static_cast<double>(m)).squaredNorm() * inv_n;
        }
    }
    return table;
}

std::pair<std::size_t, std::size_t> select_from_table(const ErrorTable& table) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    double best_value = 0.0;
    for (std::size_t m = 1; m <= table.m_max; ++m) {
        for (std::size_t r = 0; r < table.ks.size(); ++r) {
            const auto& v = table.at(r, m);
            if (!v || !std::isfinite(*v)) continue;
            if (!best || *v < best_value) {
                best = {r, m};
                best_value = *v;
            }
        }
    }
    require(best.has_value(), ErrorKind::TuningFailed, "every validation cell is missing");
    return *best;
}

namespace {

TuneResult finish_baseline(const std::string& method, const Dataset& data,
                           const PredictorSpec& spec, const BaselineSpec& bspec, SamplingMode mode,
                           ErrorTable table, std::size_t base_fits) {
    TuneResult result;
    result.method = method;
    result.grid = bspec.grid;
    const auto [row, m] = select_from_table(table);
    result.k_hat = table.ks[row];
    result.m_hat = m;
    result.estimated_risk = *table.at(row, m);
    result.base_fits = base_fits;
    result.validation = std::move(table);
    if (result.k_hat > 0) {
        result.ensemble = fit_ensemble(spec, data, result.k_hat, result.m_hat, mode, bspec.seed);
    } else {
        result.m_hat = 1;
    }
    return result;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& sorted_ids) {
    std::vector<std::size_t> out;
    out.reserve(n - sorted_ids.size());
    auto it = sorted_ids.begin();
    for (std::size_t i = 0; i < n; ++i) {
        if (it != sorted_ids.end() && *it == i) ++it;
        else out.push_back(i);
    }
    return out;
}

} // namespace

TuneResult split_cv_tune(const Dataset& data, const PredictorSpec& spec, const BaselineSpec& bspec,
                         SamplingMode mode) {
    bspec.validate();
    const auto* split = std::get_if<SampleSplit>(&bspec.method);
    require(split != nullptr, ErrorKind::InvalidParameter, "split_cv_tune needs a SampleSplit spec");
    const std::size_t n = data.n();
    const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * split->alpha));
    require(n_train >= 1 && n_train < n, ErrorKind::InvalidParameter,
            "sample split leaves an empty part");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng stream(bspec.seed, StreamPurpose::Split, {1});
    std::shuffle(perm.begin(), perm.end(), stream);
    std::vector<std::size_t> train_ids(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(train_ids.begin(), train_ids.end());
    const auto val_ids = complement(n, train_ids);

    std::size_t fits = 0;
    ErrorTable table = validation_table(data.rows(train_ids), data.rows(val_ids), spec, bspec.grid,
                                        bspec.m_max, mode, bspec.seed, &fits);
    return finish_baseline(bspec.name(), data, spec, bspec, mode, std::move(table), fits);
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
    require(folds >= 2, ErrorKind::InvalidParameter, "folds must be >= 2");
    require(folds <= n / 2, ErrorKind::InvalidParameter,
            "folds = " + std::to_string(folds) + " exceeds n / 2 = " + std::to_string(n / 2));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng stream(seed, StreamPurpose::Folds);
    std::shuffle(perm.begin(), perm.end(), stream);
    std::vector<std::vector<std::size_t>> out(folds);
    const std::size_t base = n / folds;
    const std::size_t larger = n % folds;
    std::size_t at = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t len = base + (f < larger ? 1 : 0);
        out[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(at),
                      perm.begin() + static_cast<std::ptrdiff_t>(at + len));
        std::sort(out[f].begin(), out[f].end());
        at += len;
    }
    return out;
}

ErrorTable kfold_table(const Dataset& data, const std::vector<std::vector<std::size_t>>& folds,
                       const PredictorSpec& spec, std::span<const std::size_t> grid,
                       std::size_t m_max, SamplingMode mode, std::uint64_t seed,
                       std::size_t* base_fits) {
    require(folds.size() >= 2, ErrorKind::InvalidParameter, "need at least two folds");
    ErrorTable sum;
    sum.ks.assign(grid.begin(), grid.end());
    sum.m_max = m_max;
    sum.values.assign(grid.size() * m_max, 0.0);
    for (const auto& fold : folds) {
        require(!fold.empty(), ErrorKind::InvalidParameter, "fold with no rows");
        std::vector<std::size_t> sorted = fold;
        std::sort(sorted.begin(), sorted.end());
        const auto train_ids = complement(data.n(), sorted);
        const std::uint64_t fold_seed = stream_key(seed, StreamPurpose::Derive, {sorted.front()});
        const ErrorTable t = validation_table(data.rows(train_ids), data.rows(sorted), spec, grid,
                                              m_max, mode, fold_seed, base_fits);
        for (std::size_t c = 0; c < sum.values.size(); ++c) {
            if (sum.values[c] && t.values[c]) *sum.values[c] += *t.values[c];
            else sum.values[c].reset();
        }
    }
    for (auto& v : sum.values)
        if (v) *v /= static_cast<double>(folds.size());
    return sum;
}

TuneResult kfold_cv_tune(const Dataset& data, const PredictorSpec& spec, const BaselineSpec& bspec,
                         SamplingMode mode) {
    bspec.validate();
    const auto* kfold = std::get_if<KFold>(&bspec.method);
    require(kfold != nullptr, ErrorKind::InvalidParameter, "kfold_cv_tune needs a KFold spec");
    const auto folds = make_folds(data.n(), kfold->folds, bspec.seed);
    std::size_t fits = 0;
    ErrorTable table =
        kfold_table(data, folds, spec, bspec.grid, bspec.m_max, mode, bspec.seed, &fits);
    return finish_baseline(bspec.name(), data, spec, bspec, mode, std::move(table), fits);
}

std::string to_string(Metric metric) { return metric == Metric::Mse ? "mse" : "nmse"; }

Metric parse_metric(const std::string& name) {
    if (name == "mse") return Metric::Mse;
    if (name == "nmse") return Metric::Nmse;
    fail(ErrorKind::InvalidParameter, "unknown metric '" + name + "'");
}

std::string config_hash(const PredictorSpec& spec, std::span<const std::size_t> grid) {
    const std::string text =
        to_json(spec).dump() + "|" + Json(std::vector<std::size_t>(grid.begin(), grid.end())).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ComparisonReport compare(const Dataset& train, const Dataset& test, const PredictorSpec& spec,
                         const EcvConfig& ecv_cfg, const std::vector<BaselineSpec>& baselines,
                         const CompareOptions& options) {
    require(!baselines.empty(), ErrorKind::InvalidParameter, "compare needs at least one baseline");
    const std::vector<std::size_t> grid = baselines.front().grid;
    const std::size_t m_max = baselines.front().m_max;
    for (const auto& b : baselines) {
        require(b.grid == grid, ErrorKind::InvalidParameter, "baselines must share one grid");
        require(b.m_max == m_max, ErrorKind::InvalidParameter, "baselines must share m_max");
    }
    EcvConfig cfg = ecv_cfg;
    cfg.grid = grid;

    const auto score = [&](const Eigen::VectorXd& pred) {
        return options.metric == Metric::Nmse ? nmse(pred, test.response)
                                              : mean_squared_error(pred, test.response);
    };

    ComparisonReport report;
    report.metric = options.metric;
    report.grid = grid;

    // Best grid point on the test set: m_max members per k, scored by prefix.
    ErrorTable oracle = validation_table(train, test, spec, grid, m_max, cfg.mode, cfg.seed);
    const auto [best_row, best_m] = select_from_table(oracle);
    report.best_k = grid[best_row];
    report.best_m = best_m;
    report.best_test_error = *oracle.at(best_row, best_m);
    if (options.metric == Metric::Nmse) {
        const double variance = (test.response.array() - test.response.mean()).square().mean();
        require(variance > 0.0, ErrorKind::DivisionByZero, "test response is constant");
        report.best_test_error /= variance;
    }

    const std::string hash = config_hash(spec, grid);
    const auto run = [&](const std::string& method, auto&& tune) {
        if (options.warmup) (void)tune();
        const auto start = std::chrono::steady_clock::now();
        TuneResult tuned = tune();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        ComparisonRow row;
        row.method = method;
        row.m_hat = tuned.m_hat;
        row.k_hat = tuned.k_hat;
        row.tune_seconds = elapsed.count();
        row.test_error = score(tuned.predict(test.features));
        row.suboptimality = row.test_error - report.best_test_error;
        row.base_fits = tuned.base_fits;
        row.config_hash = config_hash(spec, tuned.grid);
        require(row.config_hash == hash, ErrorKind::InvalidParameter,
                method + " ran on a different configuration");
        report.rows.push_back(std::move(row));
    };

    run("ecv", [&] { return ecv_tune(train, spec, cfg); });
    for (const auto& b : baselines) {
        if (std::holds_alternative<KFold>(b.method))
            run(b.name(), [&] { return kfold_cv_tune(train, spec, b, cfg.mode); });
        else
            run(b.name(), [&] { return split_cv_tune(train, spec, b, cfg.mode); });
    }
    return report;
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << "method,m_hat,k_hat,tune_seconds,test_" << to_string(report.metric) << ",suboptimality\n";
    for (const auto& row : report.rows) {
        out << row.method << ',' << row.m_hat << ',' << row.k_hat << ','
            << format_double(row.tune_seconds) << ',' << format_double(row.test_error) << ','
            << format_double(row.suboptimality) << '\n';
    }
    require(out.good(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

} // namespace ecv
