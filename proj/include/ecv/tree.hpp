#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ecv/rng.hpp"

namespace ecv {

/// A row of a column-major matrix, viewed without copying.
using RowRef = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

struct TreeParams {
    std::size_t min_node_size = 5;
    double feature_fraction = 1.0 / 3.0;
    std::optional<std::size_t> max_depth;
};

/// CART regression tree with per-node feature subsampling and exhaustive
/// midpoint splits. A node is split only if it holds at least
/// 2 * min_node_size rows, and each child must keep min_node_size rows.
class RegressionTree {
public:
    RegressionTree() = default;

    static RegressionTree fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const TreeParams& params, Rng& stream);

    double predict_one(RowRef row) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

    /// Index of the leaf the row falls into.
    std::size_t leaf_of(RowRef row) const;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept;

    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;     // rows with x <= threshold go left
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        double value = 0.0;
    };
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

private:
    std::vector<Node> nodes_;
};

} // namespace ecv
