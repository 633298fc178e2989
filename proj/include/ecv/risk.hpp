#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecv/dataset.hpp"
#include "ecv/predictors.hpp"
#include "ecv/rng.hpp"
#include "ecv/sampling.hpp"

namespace ecv {

/// An ensemble size that may be infinite.
class EnsembleSize {
public:
    constexpr EnsembleSize(std::size_t m) : value_(m) {}  // NOLINT(google-explicit-constructor)
    static constexpr EnsembleSize infinite() { return EnsembleSize(kInfinite); }

    constexpr bool is_infinite() const noexcept { return value_ == kInfinite; }
    constexpr std::size_t value() const noexcept { return value_; }
    std::string to_string() const;
    static EnsembleSize parse(const std::string& text);

    friend constexpr bool operator==(EnsembleSize, EnsembleSize) = default;

private:
    static constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();
    std::size_t value_;
};

enum class CenteringMethod { Avg, Mom };

/// How OOB squared errors are reduced to one number. For MOM the block count
/// is ceil(8 * exponent * ln n), i.e. eta = n^-exponent.
struct CenteringSpec {
    CenteringMethod method = CenteringMethod::Avg;
    double mom_exponent = 1.0;

    void validate() const;
};

std::string to_string(CenteringMethod method);
CenteringMethod parse_centering_method(const std::string& name);

/// OOB estimates of the one- and two-member risks at one subsample size.
struct RiskComponents {
    double r1 = 0.0;
    double r2 = 0.0;
    std::size_t k = 0;
    std::size_t m0 = 0;
    std::size_t oob_min = 0;     // smallest OOB set used (singles and pairs)
    double oob_mean = 0.0;       // mean size over all OOB sets used
    std::size_t skipped_pairs = 0;
    std::size_t used_pairs = 0;
};

/// (y_i - f(x_i))^2 over the given rows. Throws OobExhausted when rows is empty.
Eigen::VectorXd oob_squared_errors(const FittedPredictor& member, const Dataset& data,
                                   std::span<const std::size_t> oob_rows);

/// Number of MOM blocks for |errors| = count: ceil(8 A ln n) clipped to
/// [1, floor(count / 2)].
std::size_t mom_block_count(std::size_t count, std::size_t n, double exponent);

/// Mean (AVG) or median of block means over a random near-equal partition (MOM).
double center(std::span<const double> errors, const CenteringSpec& spec, std::size_t n, Rng& stream);

/// The MOM stream for the `call`-th centering at subsample size k.
Rng center_stream(std::uint64_t seed, std::size_t k, std::size_t call);

/// r1 averages the centered OOB error of each member; r2 averages, over
/// unordered pairs, the centered error of the pair mean on rows outside both
/// draws. Pairs with no such rows are skipped.
RiskComponents estimate_components(const FittedEnsemble& ens, const Dataset& data,
                                   const CenteringSpec& centering, std::uint64_t seed);

/// -(1 - 2/M) r1 + 2 (1 - 1/M) r2, and 2 r2 - r1 at M = infinity.
double extrapolate(double r1, double r2, EnsembleSize m);
double extrapolate(const RiskComponents& rc, EnsembleSize m);

struct Decomposition {
    double lhs = 0.0;  // empirical risk of the M-prefix ensemble
    double rhs = 0.0;  // the same risk rebuilt from single and pair risks
    double a1 = 0.0;
    double a2 = 0.0;
};

Decomposition decomposition_oracle(const FittedEnsemble& ens, const Dataset& eval_data,
                                   std::size_t m);

struct SurfaceRow {
    std::size_t k = 0;
    std::optional<RiskComponents> components;  // unset for k = 0 and for missing rows
    std::string missing_reason;                // non-empty when the row is missing

    bool is_null() const noexcept { return k == 0; }
    bool is_missing() const noexcept { return k != 0 && !components; }
};

/// OOB risk estimates over a k grid; any (k, M) cell is extrapolated on demand.
struct RiskSurface {
    std::vector<SurfaceRow> rows;  // ascending k
    double null_risk = 0.0;        // training mean of y^2
    std::size_t n = 0;

    std::optional<double> estimate(std::size_t row, EnsembleSize m) const;
};

/// Per-k fits kept alongside the surface so a tuner can reuse them.
struct SurfaceFit {
    RiskSurface surface;
    std::vector<std::optional<FittedEnsemble>> ensembles;  // aligned with surface.rows
};

SurfaceFit fit_surface(const Dataset& data, const PredictorSpec& spec,
                       std::span<const std::size_t> grid, std::size_t m0, SamplingMode mode,
                       const CenteringSpec& centering, std::uint64_t seed);

RiskSurface risk_surface(const Dataset& data, const PredictorSpec& spec,
                         std::span<const std::size_t> grid, std::size_t m0, SamplingMode mode,
                         const CenteringSpec& centering, std::uint64_t seed);

/// Long-format table: k, M, estimate, oob_min, oob_mean, skipped_pairs.
/// Missing cells are written as NA. Optional extra column `test_risk`
/// (aligned row-major over rows x m_list).
void write_surface_csv(const std::filesystem::path& path, const RiskSurface& surface,
                       std::span<const EnsembleSize> m_list,
                       const std::vector<std::optional<double>>* test_risk = nullptr);

/// 17 significant digits, so the text reads back to the same double.
std::string format_double(double value);

} // namespace ecv
