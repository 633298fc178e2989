#include "ecv/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecv/error.hpp"

namespace ecv {

namespace {

// Keeps ceil() results representable before the cast.
constexpr double kMaxEnsemble = 1e15;

std::size_t ceil_count(double value) {
    if (!(value > 1.0)) return 1;
    return static_cast<std::size_t>(std::ceil(std::min(value, kMaxEnsemble)));
}

double floor_tolerance(double delta, std::size_t n) {
    return std::max(delta, 1.0 / std::sqrt(static_cast<double>(n)));
}

} // namespace

std::string to_string(SelectionRule rule) {
    return rule == SelectionRule::Additive ? "additive" : "multiplicative";
}

SelectionRule parse_selection_rule(const std::string& name) {
    if (name == "additive") return SelectionRule::Additive;
    if (name == "multiplicative") return SelectionRule::Multiplicative;
    fail(ErrorKind::InvalidParameter, "unknown selection rule '" + name + "'");
}

void EcvConfig::validate() const {
    require(nu > 0.0 && nu < 1.0, ErrorKind::InvalidParameter, "nu must lie in (0, 1)");
    require(m0 >= 2, ErrorKind::InvalidParameter, "m0 must be >= 2");
    require(std::isfinite(delta) && delta > 0.0, ErrorKind::InvalidParameter, "delta must be > 0");
    require(!m_max || *m_max >= 1, ErrorKind::InvalidParameter, "m_max must be >= 1");
    require(!zeta || (std::isfinite(*zeta) && *zeta > 0.0), ErrorKind::InvalidParameter,
            "zeta must be > 0");
    centering.validate();
}

std::vector<std::size_t> build_grid(std::size_t n, double nu) {
    require(n >= 3, ErrorKind::InvalidParameter, "grid needs n >= 3");
    require(nu > 0.0 && nu < 1.0, ErrorKind::InvalidParameter, "nu must lie in (0, 1)");
    const double nd = static_cast<double>(n);
    // The small slack keeps exact powers such as 1000^(1/3) from flooring one low.
    const auto k0 = static_cast<std::size_t>(std::floor(std::pow(nd, nu) * (1.0 + 1e-12)));
    require(k0 >= 1, ErrorKind::InvalidParameter, "grid unit floor(n^nu) is zero");
    const double cap = nd * (1.0 - 1.0 / std::log(nd));
    const auto steps = static_cast<std::size_t>(std::floor(cap / static_cast<double>(k0)));
    std::vector<std::size_t> grid;
    grid.reserve(steps + 1);
    for (std::size_t s = 0; s <= steps; ++s) grid.push_back(s * k0);
    return grid;
}

std::size_t select_k(std::span<const std::size_t> ks, std::span<const std::optional<double>> values) {
    require(ks.size() == values.size(), ErrorKind::DimensionMismatch, "grid/value length mismatch");
    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < ks.size(); ++r) {
        if (!values[r] || !std::isfinite(*values[r])) continue;
        if (!best || *values[r] < *values[*best] ||
            (*values[r] == *values[*best] && ks[r] < ks[*best]))
            best = r;
    }
    require(best.has_value(), ErrorKind::TuningFailed, "every grid row is missing");
    return *best;
}

std::size_t select_k(const RiskSurface& surface, EnsembleSize target) {
    std::vector<std::size_t> ks;
    std::vector<std::optional<double>> values;
    for (std::size_t r = 0; r < surface.rows.size(); ++r) {
        ks.push_back(surface.rows[r].k);
        values.push_back(surface.estimate(r, target));
    }
    return select_k(ks, values);
}

std::size_t select_m_additive(double r1, double r2, double delta, std::size_t n) {
    require(delta > 0.0, ErrorKind::InvalidParameter, "delta must be > 0");
    require(n >= 1, ErrorKind::InvalidParameter, "n must be >= 1");
    return ceil_count(2.0 / floor_tolerance(delta, n) * (r1 - r2));
}

MSelection select_m_multiplicative(double r1, double r2, double delta, std::size_t n) {
    require(delta > 0.0, ErrorKind::InvalidParameter, "delta must be > 0");
    require(n >= 1, ErrorKind::InvalidParameter, "n must be >= 1");
    const double denom = 2.0 * r2 - r1;
    if (denom <= 1e-12 * std::max(1.0, r1)) {
        return MSelection{select_m_additive(r1, r2, delta, n), false, true};
    }
    return MSelection{ceil_count(2.0 / floor_tolerance(delta, n) * ((r1 - r2) / denom)), false, false};
}

MSelection select_m_budget(double r1, double r2, double delta, std::size_t n, std::size_t m_max) {
    require(delta > 0.0, ErrorKind::InvalidParameter, "delta must be > 0");
    require(m_max >= 1, ErrorKind::InvalidParameter, "m_max must be >= 1");
    (void)n;
    // No gain from averaging: a negative gap would otherwise flip the sign.
    if (r1 <= r2) return MSelection{};
    const double gap = extrapolate(r1, r2, m_max) - extrapolate(r1, r2, EnsembleSize::infinite());
    const double raw = 2.0 * (r1 - r2) / (delta + gap);
    MSelection out;
    out.m = ceil_count(raw);
    if (out.m > m_max) {
        out.m = m_max;
        out.budget_clipped = true;
    }
    return out;
}

BagVerdict should_bag(double null_risk, double best_r1, double best_rmmax, double zeta) {
    require(zeta > 0.0, ErrorKind::InvalidParameter, "zeta must be > 0");
    BagVerdict v;
    v.lhs = best_r1 - best_rmmax;
    v.rhs = zeta * (null_risk - best_r1);
    v.bag = null_risk < best_r1 || v.lhs > v.rhs;
    return v;
}

Eigen::VectorXd TuneResult::predict(const Eigen::MatrixXd& x) const {
    if (!ensemble) return Eigen::VectorXd::Zero(x.rows());
    return predict_ensemble(*ensemble, x);
}

TuneResult ecv_tune(const Dataset& data, const PredictorSpec& spec, const EcvConfig& cfg) {
    cfg.validate();
    validate(spec);
    const std::size_t n = data.n();
    require(n >= 3, ErrorKind::InvalidParameter, "ecv_tune needs n >= 3");

    TuneResult result;
    result.method = "ecv";
    result.grid = cfg.grid ? *cfg.grid : build_grid(n, cfg.nu);
    SurfaceFit fit = fit_surface(data, spec, result.grid, cfg.m0, cfg.mode, cfg.centering, cfg.seed);
    result.surface = std::move(fit.surface);
    const RiskSurface& surface = *result.surface;

    for (const SurfaceRow& row : surface.rows)
        if (row.k > 0) result.base_fits += cfg.m0;

    const EnsembleSize target = cfg.m_max ? EnsembleSize(*cfg.m_max) : EnsembleSize::infinite();
    std::size_t row = select_k(surface, target);

    // Risks used for choosing M, optionally on the null-risk scale.
    const double scale = (cfg.normalize && surface.null_risk > 0.0) ? surface.null_risk : 1.0;
    result.normalized = scale != 1.0;

    if (cfg.zeta && !surface.rows[row].is_null()) {
        std::optional<std::size_t> best_single;
        double best_r1 = 0.0;
        double best_target = 0.0;
        bool have_target = false;
        for (std::size_t r = 0; r < surface.rows.size(); ++r) {
            const SurfaceRow& s = surface.rows[r];
            if (!s.components) continue;
            if (!best_single || s.components->r1 < best_r1) {
                best_single = r;
                best_r1 = s.components->r1;
            }
            const double t = extrapolate(*s.components, target);
            if (!have_target || t < best_target) {
                best_target = t;
                have_target = true;
            }
        }
        const BagVerdict v = should_bag(surface.null_risk, best_r1, best_target, *cfg.zeta);
        result.to_bag = {true, v.bag, surface.null_risk, best_r1, best_target, v.lhs, v.rhs};
        if (!v.bag) {
            result.k_hat = surface.rows[*best_single].k;
            result.m_hat = 1;
            result.estimated_risk = best_r1;
            result.ensemble = fit.ensembles[*best_single]->prefix(1);
            return result;
        }
    }

    const SurfaceRow& chosen = surface.rows[row];
    result.k_hat = chosen.k;
    if (chosen.is_null()) {
        result.m_hat = 1;
        result.estimated_risk = surface.null_risk;
        return result;
    }

    const double r1 = chosen.components->r1 / scale;
    const double r2 = chosen.components->r2 / scale;
    MSelection sel;
    if (cfg.m_max) {
        sel = select_m_budget(r1, r2, cfg.delta, n, *cfg.m_max);
    } else if (cfg.selection == SelectionRule::Multiplicative) {
        sel = select_m_multiplicative(r1, r2, cfg.delta, n);
    } else {
        sel.m = select_m_additive(r1, r2, cfg.delta, n);
    }
    result.m_hat = sel.m;
    result.budget_clipped = sel.budget_clipped;
    result.fallback_to_additive = sel.fallback_to_additive;
    result.estimated_risk = extrapolate(*chosen.components, result.m_hat);

    const FittedEnsemble& base = *fit.ensembles[row];
    if (result.m_hat > base.size()) {
        result.ensemble = extend_ensemble(base, data, result.m_hat - base.size(), cfg.seed);
        result.base_fits += result.m_hat - base.size();
    } else {
        result.ensemble = base.prefix(result.m_hat);
    }
    return result;
}

} // namespace ecv
