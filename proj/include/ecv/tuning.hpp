#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecv/dataset.hpp"
#include "ecv/predictors.hpp"
#include "ecv/risk.hpp"
#include "ecv/sampling.hpp"

namespace ecv {

enum class SelectionRule { Additive, Multiplicative };

std::string to_string(SelectionRule rule);
SelectionRule parse_selection_rule(const std::string& name);

struct EcvConfig {
    double nu = 0.5;                         // grid unit k0 = floor(n^nu)
    std::size_t m0 = 10;                     // members fitted per k for estimation
    double delta = 0.05;                     // optimality tolerance
    CenteringSpec centering;
    SamplingMode mode = SamplingMode::Bagging;
    std::optional<std::size_t> m_max;        // ensemble-size budget
    std::optional<double> zeta;              // to-bag improvement factor
    SelectionRule selection = SelectionRule::Additive;
    bool normalize = false;                  // divide risks by the null risk before choosing M
    std::optional<std::vector<std::size_t>> grid;  // overrides build_grid when set
    std::uint64_t seed = 0;

    void validate() const;
};

/// {0, k0, 2 k0, ..., floor(n (1 - 1/ln n) / k0) k0} with k0 = floor(n^nu).
std::vector<std::size_t> build_grid(std::size_t n, double nu);

/// Row index of the smallest value, ties to the smallest k. Unset values
/// are skipped. Throws TuningFailed when every value is unset.
std::size_t select_k(std::span<const std::size_t> ks, std::span<const std::optional<double>> values);

/// select_k over one column of a surface.
std::size_t select_k(const RiskSurface& surface, EnsembleSize target);

struct MSelection {
    std::size_t m = 1;
    bool budget_clipped = false;
    bool fallback_to_additive = false;
};

/// ceil(2 (r1 - r2) / max(delta, n^-1/2)), at least 1.
std::size_t select_m_additive(double r1, double r2, double delta, std::size_t n);

/// ceil(2 / max(delta, n^-1/2) * (r1 - r2) / (2 r2 - r1)), at least 1. Falls
/// back to the additive rule when 2 r2 - r1 is not positive.
MSelection select_m_multiplicative(double r1, double r2, double delta, std::size_t n);

/// ceil(2 (r1 - r2) / (delta + R(m_max) - R(inf))) clamped to [1, m_max].
MSelection select_m_budget(double r1, double r2, double delta, std::size_t n, std::size_t m_max);

struct BagVerdict {
    bool bag = true;
    double lhs = 0.0;  // improvement due to the ensemble: best_r1 - best_rmmax
    double rhs = 0.0;  // zeta * (null_risk - best_r1)
};

/// Bag when the null risk beats every single predictor, or when the gain from
/// ensembling exceeds zeta times the gain from subsampling.
BagVerdict should_bag(double null_risk, double best_r1, double best_rmmax, double zeta);

struct ToBagTrace {
    bool evaluated = false;
    bool bag = true;
    double null_risk = 0.0;
    double best_r1 = 0.0;
    double best_rmmax = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Held-out error for every (k, M) with M in 1..m_max, stored row-major by k.
struct ErrorTable {
    std::vector<std::size_t> ks;
    std::size_t m_max = 0;
    std::vector<std::optional<double>> values;

    std::optional<double>& at(std::size_t row, std::size_t m) { return values[row * m_max + (m - 1)]; }
    const std::optional<double>& at(std::size_t row, std::size_t m) const {
        return values[row * m_max + (m - 1)];
    }
};

struct TuneResult {
    std::string method = "ecv";
    std::size_t k_hat = 0;
    std::size_t m_hat = 1;
    double estimated_risk = 0.0;  // estimate at (k_hat, m_hat); validation error for baselines
    std::vector<std::size_t> grid;
    std::optional<RiskSurface> surface;     // ECV only
    std::optional<ErrorTable> validation;   // baselines only
    ToBagTrace to_bag;
    bool budget_clipped = false;
    bool fallback_to_additive = false;
    bool normalized = false;
    std::size_t base_fits = 0;
    std::optional<FittedEnsemble> ensemble;  // unset: the null predictor

    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Extrapolated cross-validation: fit m0 members per grid k, estimate the
/// one- and two-member OOB risks, extrapolate, choose (k, M), and grow the
/// chosen ensemble to M.
TuneResult ecv_tune(const Dataset& data, const PredictorSpec& spec, const EcvConfig& cfg);

} // namespace ecv
