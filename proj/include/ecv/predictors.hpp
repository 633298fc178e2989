#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ecv/dataset.hpp"
#include "ecv/rng.hpp"
#include "ecv/sampling.hpp"
#include "ecv/tree.hpp"

namespace ecv {

// Base-learner specifications. Defaults follow the usual experimental
// settings: ridge lambda 0.1, 5 neighbours, trees with node size 5 and a
// third of the features per split.

struct NullSpec {};

struct RidgeSpec {
    double lambda = 0.1;
};

struct RidgelessSpec {};

struct KnnSpec {
    std::size_t neighbors = 5;
};

struct TreeSpec {
    std::size_t min_node_size = 5;
    double feature_fraction = 1.0 / 3.0;
    std::optional<std::size_t> max_depth;
};

using PredictorSpec = std::variant<NullSpec, RidgeSpec, RidgelessSpec, KnnSpec, TreeSpec>;

std::string predictor_name(const PredictorSpec& spec);
void validate(const PredictorSpec& spec);

/// Linear fit without intercept.
struct LinearModel {
    Eigen::VectorXd beta;
};

struct KnnModel {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::size_t> row_ids;  // parent row id per stored row, for tie-breaks
    std::size_t neighbors = 5;
};

struct NullModel {
    std::size_t p = 0;
};

/// One fitted base predictor. Immutable once built.
class FittedPredictor {
public:
    using Model = std::variant<NullModel, LinearModel, KnnModel, RegressionTree>;

    FittedPredictor(Model model, std::size_t p) : model_(std::move(model)), p_(p) {}

    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

    std::size_t p() const noexcept { return p_; }
    const Model& model() const noexcept { return model_; }

private:
    Model model_;
    std::size_t p_;
};

/// Closed-form ridge on the given rows: argmin (1/k)||y - X b||^2 + lambda ||b||^2.
Eigen::VectorXd ridge_coefficients(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda);

/// Minimum-norm least squares through a truncated SVD pseudo-inverse.
Eigen::VectorXd min_norm_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// The substream a tree member at (k, index) uses for feature sampling.
Rng tree_stream(std::uint64_t seed, std::size_t k, std::size_t index);

/// Fits on data restricted to idx.draws, repeats included. `stream` feeds
/// any randomness inside the learner (tree feature sampling).
FittedPredictor fit_base(const PredictorSpec& spec, const Dataset& data, const SampleIndices& idx,
                         Rng& stream);

Eigen::VectorXd predict_base(const FittedPredictor& fitted, const Eigen::MatrixXd& x);

struct FittedEnsemble {
    PredictorSpec spec;
    std::vector<FittedPredictor> members;
    std::vector<SampleIndices> indices;
    std::size_t k = 0;
    SamplingMode mode = SamplingMode::Subagging;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return members.size(); }

    /// Copy holding the first m members.
    FittedEnsemble prefix(std::size_t m) const;
};

/// M members on independent draws; member l uses draw_stream(seed, k, l)
/// and tree_stream(seed, k, l).
FittedEnsemble fit_ensemble(const PredictorSpec& spec, const Dataset& data, std::size_t k,
                            std::size_t m, SamplingMode mode, std::uint64_t seed);

/// Mean prediction over the first use_first members (all when unset).
Eigen::VectorXd predict_ensemble(const FittedEnsemble& ens, const Eigen::MatrixXd& x,
                                 std::optional<std::size_t> use_first = std::nullopt);

/// Column l holds member l's predictions, for l < count (all when unset).
Eigen::MatrixXd member_predictions(const FittedEnsemble& ens, const Eigen::MatrixXd& x,
                                   std::optional<std::size_t> count = std::nullopt);

/// Appends `extra` members whose stream keys continue from size(). Existing
/// members are shared unchanged.
FittedEnsemble extend_ensemble(const FittedEnsemble& ens, const Dataset& data, std::size_t extra,
                               std::uint64_t seed);

} // namespace ecv
