#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ecv {

/// Rows are observations. Construct through make() to get the shape and
/// finiteness checks.
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd response;

    static Dataset make(Eigen::MatrixXd features, Eigen::VectorXd response);

    std::size_t n() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(features.cols()); }

    /// Subset of rows in the given order. Repeated ids repeat rows.
    Dataset rows(std::span<const std::size_t> ids) const;
};

enum class SyntheticModel { Linear, Quad, Tanh };

std::string to_string(SyntheticModel model);
SyntheticModel parse_synthetic_model(const std::string& name);

struct SyntheticSpec {
    SyntheticModel model = SyntheticModel::Linear;
    std::size_t n = 100;
    std::size_t p = 10;
    double rho_ar = 0.5;
    double sigma = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// AR(1) covariance: entry (i, j) = rho^|i-j|.
Eigen::MatrixXd ar1_covariance(std::size_t p, double rho);

/// Symmetric eigendecomposition with eigenvalues in descending order
/// (ties broken by ascending solver index) and each eigenvector's first
/// nonzero coordinate made positive.
struct SortedEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SortedEigen sorted_eigen(const Eigen::MatrixXd& sym);

/// Average of the unit eigenvectors belonging to the five largest eigenvalues.
Eigen::VectorXd signal_beta(const Eigen::MatrixXd& sigma);

/// Symmetric square root V diag(sqrt(lambda)) V^T. Negative round-off
/// eigenvalues are clipped to zero.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sym);

/// The regression function of a synthetic model, without noise.
Eigen::VectorXd synthetic_mean(SyntheticModel model, const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& beta, double trace_over_p);

/// Draws n rows x = Sigma^{1/2} z and y from the chosen model.
Dataset simulate(const SyntheticSpec& spec);

/// Response column: a header name, or an index where negative values count
/// from the end (-1 is the last column).
using ResponseColumn = std::variant<std::string, long>;

struct CsvOptions {
    bool header = true;
    ResponseColumn response = -1L;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes x1..xp,y with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data);

struct Split {
    Dataset train;
    Dataset test;
};

/// floor(n * test_fraction) rows go to the test part. Both parts keep the
/// original row order.
Split train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Mean squared error divided by the population (1/n) variance of truth.
double nmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth);

double mean_squared_error(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth);

} // namespace ecv
