#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecv/dataset.hpp"
#include "ecv/predictors.hpp"
#include "ecv/sampling.hpp"
#include "ecv/tuning.hpp"

namespace ecv {

struct SampleSplit {
    double alpha = 5.0 / 6.0;  // training share; 5:1 train:validation
};

struct KFold {
    std::size_t folds = 5;
};

struct BaselineSpec {
    std::variant<SampleSplit, KFold> method;
    std::size_t m_max = 50;
    std::vector<std::size_t> grid;
    std::uint64_t seed = 0;

    void validate() const;
    std::string name() const;
};

/// Held-out squared error of every M-prefix ensemble, M = 1..m_max, for each
/// k in the grid, from one set of m_max fits per k. Prefix means are kept as
/// running sums. Rows with k larger than the training part (or otherwise
/// unfittable) are left unset.
ErrorTable validation_table(const Dataset& train, const Dataset& validation,
                            const PredictorSpec& spec, std::span<const std::size_t> grid,
                            std::size_t m_max, SamplingMode mode, std::uint64_t seed,
                            std::size_t* base_fits = nullptr);

/// argmin over the table, ties to the smaller M, then the smaller k.
std::pair<std::size_t, std::size_t> select_from_table(const ErrorTable& table);

TuneResult split_cv_tune(const Dataset& data, const PredictorSpec& spec, const BaselineSpec& bspec,
                         SamplingMode mode);

/// Fold tables averaged cellwise; a cell is unset if any fold leaves it unset.
/// Each fold's fits are keyed by its smallest row id, so the result does not
/// depend on the order the folds are listed in.
ErrorTable kfold_table(const Dataset& data, const std::vector<std::vector<std::size_t>>& folds,
                       const PredictorSpec& spec, std::span<const std::size_t> grid,
                       std::size_t m_max, SamplingMode mode, std::uint64_t seed,
                       std::size_t* base_fits = nullptr);

/// Random near-equal partition of [0, n) into `folds` sorted folds.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

TuneResult kfold_cv_tune(const Dataset& data, const PredictorSpec& spec, const BaselineSpec& bspec,
                         SamplingMode mode);

enum class Metric { Mse, Nmse };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& name);

struct ComparisonRow {
    std::string method;
    std::size_t m_hat = 0;
    std::size_t k_hat = 0;
    double tune_seconds = 0.0;
    double test_error = 0.0;     // in the report's metric
    double suboptimality = 0.0;  // test_error minus the best grid point on the test set
    std::size_t base_fits = 0;
    std::string config_hash;
};

struct ComparisonReport {
    Metric metric = Metric::Nmse;
    std::vector<ComparisonRow> rows;
    double best_test_error = 0.0;
    std::size_t best_k = 0;
    std::size_t best_m = 0;
    std::vector<std::size_t> grid;
};

struct CompareOptions {
    Metric metric = Metric::Nmse;
    bool warmup = false;  // run each tuner once untimed before the timed run
};

/// Runs ECV and each baseline on the same grid and base learner, refits each
/// choice on the full training set, and scores it on the test set. The ECV
/// config's grid is replaced by the shared grid of the first baseline.
ComparisonReport compare(const Dataset& train, const Dataset& test, const PredictorSpec& spec,
                         const EcvConfig& ecv_cfg, const std::vector<BaselineSpec>& baselines,
                         const CompareOptions& options = {});

/// method,m_hat,k_hat,tune_seconds,test_<metric>,suboptimality
void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report);

/// Short hex digest of the predictor spec and grid.
std::string config_hash(const PredictorSpec& spec, std::span<const std::size_t> grid);

} // namespace ecv
