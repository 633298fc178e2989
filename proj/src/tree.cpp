#include "ecv/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ecv/error.hpp"

namespace ecv {

namespace {

struct SplitCandidate {
    bool found = false;
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
};

struct Frame {
    std::uint32_t node;
    std::size_t begin;
    std::size_t end;
    std::size_t depth;
};

} // namespace

RegressionTree RegressionTree::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const TreeParams& params, Rng& stream) {
    require(x.rows() == y.size(), ErrorKind::DimensionMismatch, "tree: x/y row mismatch");
    require(x.rows() >= 1, ErrorKind::InvalidParameter, "tree: no training rows");
    require(params.min_node_size >= 1, ErrorKind::InvalidParameter, "min_node_size must be >= 1");
    require(params.feature_fraction > 0.0 && params.feature_fraction <= 1.0,
            ErrorKind::InvalidParameter, "feature_fraction must lie in (0, 1]");

    const auto p = static_cast<std::size_t>(x.cols());
    const std::size_t mtry = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(params.feature_fraction * static_cast<double>(p) - 1e-12)),
        1, p);
    const std::size_t min_node = params.min_node_size;

    RegressionTree tree;
    std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::size_t> features(p);
    std::vector<std::pair<double, double>> column;
    column.reserve(rows.size());

    tree.nodes_.emplace_back();
    std::vector<Frame> stack{{0, 0, rows.size(), 0}};
    while (!stack.empty()) {
        const Frame frame = stack.back();
        stack.pop_back();
        const std::size_t count = frame.end - frame.begin;

        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = frame.begin; i < frame.end; ++i) {
            const double v = y(static_cast<Eigen::Index>(rows[i]));
            sum += v;
            sum_sq += v * v;
        }
        const double n_node = static_cast<double>(count);
        tree.nodes_[frame.node].value = sum / n_node;
        const double node_sse = std::max(0.0, sum_sq - sum * sum / n_node);

        const bool depth_ok = !params.max_depth || frame.depth < *params.max_depth;
        if (count < 2 * min_node || !depth_ok || node_sse <= 0.0) continue;

        // Candidate features, sampled without replacement, visited in index order
        // so that equal gains resolve to the smallest (feature, threshold).
        std::iota(features.begin(), features.end(), std::size_t{0});
        for (std::size_t i = 0; i < mtry; ++i) std::swap(features[i], features[i + stream.below(p - i)]);
        std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));

        SplitCandidate best;
        const double parent_score = sum * sum / n_node;
        for (std::size_t fi = 0; fi < mtry; ++fi) {
            const auto f = static_cast<Eigen::Index>(features[fi]);
            column.clear();
            for (std::size_t i = frame.begin; i < frame.end; ++i) {
                const auto r = static_cast<Eigen::Index>(rows[i]);
                column.emplace_back(x(r, f), y(r));
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (column.front().first == column.back().first) continue;

            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                left_sum += column[i].second;
                const std::size_t n_left = i + 1;
                if (n_left < min_node) continue;
                if (count - n_left < min_node) break;
                if (column[i].first == column[i + 1].first) continue;
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                    right_sum * right_sum / static_cast<double>(count - n_left) -
                                    parent_score;
                if (!best.found || gain > best.gain) {
                    double threshold = 0.5 * (column[i].first + column[i + 1].first);
                    if (!(threshold < column[i + 1].first)) threshold = column[i].first;
                    best = {true, gain, static_cast<std::int32_t>(f), threshold};
                }
            }
        }
        if (!best.found || best.gain <= 1e-12 * node_sse) continue;

        const auto mid_it = std::partition(
            rows.begin() + static_cast<std::ptrdiff_t>(frame.begin),
            rows.begin() + static_cast<std::ptrdiff_t>(frame.end), [&](std::size_t r) {
                return x(static_cast<Eigen::Index>(r), best.feature) <= best.threshold;
            });
        const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

        const auto left = static_cast<std::uint32_t>(tree.nodes_.size());
        tree.nodes_.emplace_back();
        const auto right = static_cast<std::uint32_t>(tree.nodes_.size());
        tree.nodes_.emplace_back();
        Node& node = tree.nodes_[frame.node];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        stack.push_back({right, mid, frame.end, frame.depth + 1});
        stack.push_back({left, frame.begin, mid, frame.depth + 1});
    }
    return tree;
}

std::size_t RegressionTree::leaf_of(RowRef row) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
        const Node& node = nodes_[at];
        at = row(node.feature) <= node.threshold ? node.left : node.right;
    }
    return at;
}

double RegressionTree::predict_one(RowRef row) const {
    return nodes_[leaf_of(row)].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_one(x.row(i));
    return out;
}

std::size_t RegressionTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

} // namespace ecv
