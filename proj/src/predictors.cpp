#include "ecv/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ecv/error.hpp"
#include "ecv/parallel.hpp"

namespace ecv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::VectorXd knn_predict(const KnnModel& model, const Eigen::MatrixXd& x) {
    const Eigen::Index stored = model.x.rows();
    const std::size_t take = model.neighbors;
    Eigen::VectorXd out(x.rows());
    std::vector<std::tuple<double, std::size_t, Eigen::Index>> dist(static_cast<std::size_t>(stored));
    for (Eigen::Index q = 0; q < x.rows(); ++q) {
        for (Eigen::Index r = 0; r < stored; ++r) {
            const double d = (model.x.row(r) - x.row(q)).squaredNorm();
            dist[static_cast<std::size_t>(r)] = {d, model.row_ids[static_cast<std::size_t>(r)], r};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
        double sum = 0.0;
        for (std::size_t j = 0; j < take; ++j) sum += model.y(std::get<2>(dist[j]));
        out(q) = sum / static_cast<double>(take);
    }
    return out;
}

} // namespace

std::string predictor_name(const PredictorSpec& spec) {
    return std::visit(overloaded{
                          [](const NullSpec&) { return std::string("null"); },
                          [](const RidgeSpec&) { return std::string("ridge"); },
                          [](const RidgelessSpec&) { return std::string("ridgeless"); },
                          [](const KnnSpec&) { return std::string("knn"); },
                          [](const TreeSpec&) { return std::string("tree"); },
                      },
                      spec);
}

void validate(const PredictorSpec& spec) {
    std::visit(overloaded{
                   [](const NullSpec&) {},
                   [](const RidgeSpec& s) {
                       require(std::isfinite(s.lambda) && s.lambda > 0.0,
                               ErrorKind::InvalidParameter, "ridge lambda must be > 0");
                   },
                   [](const RidgelessSpec&) {},
                   [](const KnnSpec& s) {
                       require(s.neighbors >= 1, ErrorKind::InvalidParameter,
                               "knn neighbors must be >= 1");
                   },
                   [](const TreeSpec& s) {
                       require(s.min_node_size >= 1, ErrorKind::InvalidParameter,
                               "tree min_node_size must be >= 1");
                       require(s.feature_fraction > 0.0 && s.feature_fraction <= 1.0,
                               ErrorKind::InvalidParameter,
                               "tree feature_fraction must lie in (0, 1]");
                   },
               },
               spec);
}

Eigen::VectorXd FittedPredictor::predict(const Eigen::MatrixXd& x) const {
    require(static_cast<std::size_t>(x.cols()) == p_, ErrorKind::DimensionMismatch,
            "predictor was fitted on p = " + std::to_string(p_) + " features, got " +
                std::to_string(x.cols()));
    return std::visit(overloaded{
                          [&](const NullModel&) -> Eigen::VectorXd {
                              return Eigen::VectorXd::Zero(x.rows());
                          },
                          [&](const LinearModel& m) -> Eigen::VectorXd { return x * m.beta; },
                          [&](const KnnModel& m) { return knn_predict(m, x); },
                          [&](const RegressionTree& t) { return t.predict(x); },
                      },
                      model_);
}

Eigen::VectorXd ridge_coefficients(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda) {
    const double k = static_cast<double>(x.rows());
    const Eigen::Index p = x.cols();
    if (x.rows() >= p) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(p, p) * lambda;
        gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / k);
        const Eigen::VectorXd rhs = x.transpose() * y / k;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        require(llt.info() == Eigen::Success, ErrorKind::Numeric, "ridge gram not positive definite");
        return llt.solve(rhs);
    }
    // Dual form: X^T (X X^T + k lambda I)^{-1} y.
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(x.rows(), x.rows()) * (k * lambda);
    kernel.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
    Eigen::LLT<Eigen::MatrixXd> llt(kernel);
    require(llt.info() == Eigen::Success, ErrorKind::Numeric, "ridge kernel not positive definite");
    return x.transpose() * llt.solve(y);
}

Eigen::VectorXd min_norm_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    if (s.size() == 0 || s(0) <= 0.0) return beta;
    const double cutoff = static_cast<double>(std::max(x.rows(), x.cols())) *
                          std::numeric_limits<double>::epsilon() * s(0);
    const Eigen::VectorXd uty = svd.matrixU().transpose() * y;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) beta += svd.matrixV().col(i) * (uty(i) / s(i));
    }
    return beta;
}

Rng tree_stream(std::uint64_t seed, std::size_t k, std::size_t index) {
    return Rng(seed, StreamPurpose::Tree, {k, index});
}

FittedPredictor fit_base(const PredictorSpec& spec, const Dataset& data, const SampleIndices& idx,
                         Rng& stream) {
    validate(spec);
    require(idx.n == data.n(), ErrorKind::InvalidParameter,
            "index draw is for n = " + std::to_string(idx.n) + " but data has " +
                std::to_string(data.n()) + " rows");
    require(!idx.draws.empty(), ErrorKind::InvalidParameter, "cannot fit on an empty subsample");
    const std::size_t p = data.p();

    if (std::holds_alternative<NullSpec>(spec)) return FittedPredictor(NullModel{p}, p);

    const Dataset sub = data.rows(idx.draws);
    return std::visit(
        overloaded{
            [&](const NullSpec&) { return FittedPredictor(NullModel{p}, p); },
            [&](const RidgeSpec& s) {
                return FittedPredictor(
                    LinearModel{ridge_coefficients(sub.features, sub.response, s.lambda)}, p);
            },
            [&](const RidgelessSpec&) {
                return FittedPredictor(
                    LinearModel{min_norm_least_squares(sub.features, sub.response)}, p);
            },
            [&](const KnnSpec& s) {
                require(idx.draws.size() >= s.neighbors, ErrorKind::InvalidParameter,
                        "knn needs k >= neighbors (k = " + std::to_string(idx.draws.size()) +
                            ", neighbors = " + std::to_string(s.neighbors) + ")");
                return FittedPredictor(KnnModel{sub.features, sub.response, idx.draws, s.neighbors},
                                       p);
            },
            [&](const TreeSpec& s) {
                TreeParams params{s.min_node_size, s.feature_fraction, s.max_depth};
                return FittedPredictor(
                    RegressionTree::fit(sub.features, sub.response, params, stream), p);
            },
        },
        spec);
}

Eigen::VectorXd predict_base(const FittedPredictor& fitted, const Eigen::MatrixXd& x) {
    return fitted.predict(x);
}

FittedEnsemble FittedEnsemble::prefix(std::size_t m) const {
    require(m >= 1 && m <= members.size(), ErrorKind::InvalidParameter,
            "prefix size " + std::to_string(m) + " outside [1, " + std::to_string(members.size()) +
                "]");
    FittedEnsemble out{spec, {}, {}, k, mode, seed};
    out.members.assign(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(m));
    out.indices.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(m));
    return out;
}

namespace {

std::vector<FittedPredictor> fit_members(const PredictorSpec& spec, const Dataset& data,
                                         const std::vector<SampleIndices>& draws, std::size_t k,
                                         std::uint64_t seed, std::size_t first) {
    std::vector<std::optional<FittedPredictor>> slots(draws.size());
    parallel_for(draws.size(), [&](std::size_t i) {
        Rng stream = tree_stream(seed, k, first + i);
        slots[i].emplace(fit_base(spec, data, draws[i], stream));
    });
    std::vector<FittedPredictor> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace

FittedEnsemble fit_ensemble(const PredictorSpec& spec, const Dataset& data, std::size_t k,
                            std::size_t m, SamplingMode mode, std::uint64_t seed) {
    validate(spec);
    require(m >= 1, ErrorKind::InvalidParameter, "ensemble size must be >= 1");
    FittedEnsemble ens{spec, {}, {}, k, mode, seed};
    ens.indices = draw_ensemble_indices(data.n(), k, m, mode, seed);
    ens.members = fit_members(spec, data, ens.indices, k, seed, 0);
    return ens;
}

Eigen::MatrixXd member_predictions(const FittedEnsemble& ens, const Eigen::MatrixXd& x,
                                   std::optional<std::size_t> count) {
    const std::size_t m = count.value_or(ens.size());
    require(m >= 1 && m <= ens.size(), ErrorKind::InvalidParameter,
            "member count " + std::to_string(m) + " outside [1, " + std::to_string(ens.size()) + "]");
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(m));
    parallel_for(m, [&](std::size_t l) {
        out.col(static_cast<Eigen::Index>(l)) = ens.members[l].predict(x);
    });
    return out;
}

Eigen::VectorXd predict_ensemble(const FittedEnsemble& ens, const Eigen::MatrixXd& x,
                                 std::optional<std::size_t> use_first) {
    require(!use_first || *use_first >= 1, ErrorKind::InvalidParameter, "use_first must be >= 1");
    const Eigen::MatrixXd preds = member_predictions(ens, x, use_first);
    return preds.rowwise().mean();
}

FittedEnsemble extend_ensemble(const FittedEnsemble& ens, const Dataset& data, std::size_t extra,
                               std::uint64_t seed) {
    require(extra >= 1, ErrorKind::InvalidParameter, "extend_ensemble needs extra >= 1");
    require(ens.k >= 1, ErrorKind::InvalidParameter, "cannot extend a k = 0 ensemble");
    FittedEnsemble out = ens;
    const std::size_t first = ens.size();
    auto draws = draw_ensemble_indices(data.n(), ens.k, extra, ens.mode, seed, first);
    auto members = fit_members(ens.spec, data, draws, ens.k, seed, first);
    out.indices.insert(out.indices.end(), std::make_move_iterator(draws.begin()),
                       std::make_move_iterator(draws.end()));
    out.members.insert(out.members.end(), std::make_move_iterator(members.begin()),
                       std::make_move_iterator(members.end()));
    return out;
}

} // namespace ecv
