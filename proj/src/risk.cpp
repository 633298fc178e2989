#include "ecv/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ecv/error.hpp"
#include "ecv/parallel.hpp"

namespace ecv {

std::string EnsembleSize::to_string() const {
    return is_infinite() ? std::string("inf") : std::to_string(value_);
}

EnsembleSize EnsembleSize::parse(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "infinity") return infinite();
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == text.size() && !text.empty() && text[0] != '-' && v >= 1,
            ErrorKind::InvalidParameter, "invalid ensemble size '" + text + "'");
    return EnsembleSize(static_cast<std::size_t>(v));
}

void CenteringSpec::validate() const {
    require(std::isfinite(mom_exponent) && mom_exponent > 0.0, ErrorKind::InvalidParameter,
            "MOM exponent A must be > 0");
}

std::string to_string(CenteringMethod method) {
    return method == CenteringMethod::Avg ? "avg" : "mom";
}

CenteringMethod parse_centering_method(const std::string& name) {
    if (name == "avg") return CenteringMethod::Avg;
    if (name == "mom") return CenteringMethod::Mom;
    fail(ErrorKind::InvalidParameter, "unknown centering method '" + name + "'");
}

Eigen::VectorXd oob_squared_errors(const FittedPredictor& member, const Dataset& data,
                                   std::span<const std::size_t> oob_rows) {
    require(!oob_rows.empty(), ErrorKind::OobExhausted, "out-of-bag set is empty");
    const Dataset oob = data.rows(oob_rows);
    return (oob.response - member.predict(oob.features)).array().square().matrix();
}

std::size_t mom_block_count(std::size_t count, std::size_t n, double exponent) {
    const double raw = std::ceil(8.0 * exponent * std::log(static_cast<double>(std::max<std::size_t>(n, 1))));
    const std::size_t cap = std::max<std::size_t>(1, count / 2);
    if (!(raw >= 1.0)) return 1;
    return std::min(cap, static_cast<std::size_t>(raw));
}

Rng center_stream(std::uint64_t seed, std::size_t k, std::size_t call) {
    return Rng(seed, StreamPurpose::Center, {k, call});
}

double center(std::span<const double> errors, const CenteringSpec& spec, std::size_t n, Rng& stream) {
    require(!errors.empty(), ErrorKind::OobExhausted, "cannot center an empty error set");
    const auto mean_of = [](std::span<const double> v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    if (spec.method == CenteringMethod::Avg) return mean_of(errors);

    spec.validate();
    const std::size_t blocks = mom_block_count(errors.size(), n, spec.mom_exponent);
    if (blocks == 1) return mean_of(errors);

    std::vector<double> shuffled(errors.begin(), errors.end());
    std::shuffle(shuffled.begin(), shuffled.end(), stream);

    // Contiguous blocks whose sizes differ by at most one.
    const std::size_t base = shuffled.size() / blocks;
    const std::size_t larger = shuffled.size() % blocks;
    std::vector<double> means;
    means.reserve(blocks);
    std::size_t at = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t len = base + (b < larger ? 1 : 0);
        means.push_back(mean_of(std::span<const double>(shuffled).subspan(at, len)));
        at += len;
    }
    std::sort(means.begin(), means.end());
    const std::size_t mid = blocks / 2;
    return blocks % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

RiskComponents estimate_components(const FittedEnsemble& ens, const Dataset& data,
                                   const CenteringSpec& centering, std::uint64_t seed) {
    const std::size_t m0 = ens.size();
    require(m0 >= 2, ErrorKind::InvalidParameter, "risk components need at least two members");
    require(ens.indices.size() == m0, ErrorKind::InvalidParameter, "ensemble indices misaligned");
    for (const auto& idx : ens.indices)
        require(idx.n == data.n(), ErrorKind::InvalidParameter,
                "ensemble was not fitted on this dataset");

    const Eigen::MatrixXd preds = member_predictions(ens, data.features);
    const Eigen::VectorXd& y = data.response;
    const std::size_t n = data.n();

    struct Cell {
        bool used = false;
        double value = 0.0;
        std::size_t rows = 0;
    };

    std::vector<Cell> singles(m0);
    parallel_for(m0, [&](std::size_t l) {
        const auto& oob = ens.indices[l].oob;
        if (oob.empty()) return;
        std::vector<double> err(oob.size());
        for (std::size_t j = 0; j < oob.size(); ++j) {
            const auto i = static_cast<Eigen::Index>(oob[j]);
            const double r = y(i) - preds(i, static_cast<Eigen::Index>(l));
            err[j] = r * r;
        }
        Rng stream = center_stream(seed, ens.k, l);
        singles[l] = {true, center(err, centering, n, stream), oob.size()};
    });

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(m0 * (m0 - 1) / 2);
    for (std::size_t a = 0; a < m0; ++a)
        for (std::size_t b = a + 1; b < m0; ++b) pairs.emplace_back(a, b);

    std::vector<Cell> doubles(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t q) {
        const auto [a, b] = pairs[q];
        const auto rows = pair_union_oob(ens.indices[a], ens.indices[b]);
        if (rows.empty()) return;
        std::vector<double> err(rows.size());
        const auto ca = static_cast<Eigen::Index>(a);
        const auto cb = static_cast<Eigen::Index>(b);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto i = static_cast<Eigen::Index>(rows[j]);
            const double r = y(i) - 0.5 * (preds(i, ca) + preds(i, cb));
            err[j] = r * r;
        }
        Rng stream = center_stream(seed, ens.k, m0 + q);
        doubles[q] = {true, center(err, centering, n, stream), rows.size()};
    });

    RiskComponents rc;
    rc.k = ens.k;
    rc.m0 = m0;
    rc.oob_min = n;
    std::size_t used_sets = 0;
    double total_rows = 0.0;
    const auto accumulate_cells = [&](const std::vector<Cell>& cells, double& out,
                                      std::size_t& used) {
        double sum = 0.0;
        used = 0;
        for (const Cell& c : cells) {
            if (!c.used) continue;
            sum += c.value;
            ++used;
            rc.oob_min = std::min(rc.oob_min, c.rows);
            total_rows += static_cast<double>(c.rows);
        }
        if (used > 0) out = sum / static_cast<double>(used);
        used_sets += used;
    };

    std::size_t used_singles = 0;
    accumulate_cells(singles, rc.r1, used_singles);
    accumulate_cells(doubles, rc.r2, rc.used_pairs);
    rc.skipped_pairs = pairs.size() - rc.used_pairs;
    require(used_singles > 0 && rc.used_pairs > 0, ErrorKind::OobExhausted,
            "no out-of-bag rows left for any member pair at k = " + std::to_string(ens.k));
    rc.oob_mean = total_rows / static_cast<double>(used_sets);
    return rc;
}

double extrapolate(double r1, double r2, EnsembleSize m) {
    if (m.is_infinite()) return 2.0 * r2 - r1;
    require(m.value() >= 1, ErrorKind::InvalidParameter, "ensemble size must be >= 1");
    const double inv = 1.0 / static_cast<double>(m.value());
    return -(1.0 - 2.0 * inv) * r1 + 2.0 * (1.0 - inv) * r2;
}

double extrapolate(const RiskComponents& rc, EnsembleSize m) { return extrapolate(rc.r1, rc.r2, m); }

Decomposition decomposition_oracle(const FittedEnsemble& ens, const Dataset& eval_data,
                                   std::size_t m) {
    require(m >= 2, ErrorKind::InvalidParameter, "decomposition needs M >= 2");
    require(ens.size() >= m, ErrorKind::InvalidParameter, "ensemble has fewer than M members");
    require(eval_data.n() >= 1, ErrorKind::InvalidParameter, "empty evaluation data");

    const Eigen::MatrixXd preds = member_predictions(ens, eval_data.features, m);
    const Eigen::VectorXd& y = eval_data.response;
    const auto risk = [&](const Eigen::VectorXd& f) { return (y - f).squaredNorm() / static_cast<double>(y.size()); };

    Decomposition d;
    d.lhs = risk(preds.rowwise().mean());
    for (Eigen::Index l = 0; l < preds.cols(); ++l) d.a1 += risk(preds.col(l));
    d.a1 /= static_cast<double>(m);

    double pair_sum = 0.0;
    for (Eigen::Index a = 0; a < preds.cols(); ++a)
        for (Eigen::Index b = a + 1; b < preds.cols(); ++b)
            pair_sum += risk(0.5 * (preds.col(a) + preds.col(b)));
    // Each unordered pair stands for both orderings.
    d.a2 = 2.0 * pair_sum / static_cast<double>(m * (m - 1));
    d.rhs = extrapolate(d.a1, d.a2, m);
    return d;
}

std::optional<double> RiskSurface::estimate(std::size_t row, EnsembleSize m) const {
    const SurfaceRow& r = rows.at(row);
    if (r.is_null()) return null_risk;
    if (!r.components) return std::nullopt;
    return extrapolate(*r.components, m);
}

SurfaceFit fit_surface(const Dataset& data, const PredictorSpec& spec,
                       std::span<const std::size_t> grid, std::size_t m0, SamplingMode mode,
                       const CenteringSpec& centering, std::uint64_t seed) {
    validate(spec);
    centering.validate();
    require(m0 >= 2, ErrorKind::InvalidParameter, "M0 must be >= 2");
    require(!grid.empty(), ErrorKind::InvalidParameter, "empty subsample grid");
    require(std::is_sorted(grid.begin(), grid.end()) &&
                std::adjacent_find(grid.begin(), grid.end()) == grid.end(),
            ErrorKind::InvalidParameter, "grid must be strictly increasing");
    require(grid.back() <= data.n(), ErrorKind::InvalidParameter, "grid exceeds n");

    SurfaceFit out;
    out.surface.n = data.n();
    out.surface.null_risk = data.response.squaredNorm() / static_cast<double>(data.n());
    out.surface.rows.resize(grid.size());
    out.ensembles.resize(grid.size());

    for (std::size_t r = 0; r < grid.size(); ++r) {
        SurfaceRow& row = out.surface.rows[r];
        row.k = grid[r];
        if (row.k == 0) continue;
        try {
            FittedEnsemble ens = fit_ensemble(spec, data, row.k, m0, mode, seed);
            row.components = estimate_components(ens, data, centering, seed);
            out.ensembles[r] = std::move(ens);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OobExhausted && e.kind() != ErrorKind::InvalidParameter)
                throw;
            row.components.reset();
            row.missing_reason = std::string(error_kind_name(e.kind())) + ": " + e.what();
        }
    }
    return out;
}

RiskSurface risk_surface(const Dataset& data, const PredictorSpec& spec,
                         std::span<const std::size_t> grid, std::size_t m0, SamplingMode mode,
                         const CenteringSpec& centering, std::uint64_t seed) {
    return fit_surface(data, spec, grid, m0, mode, centering, seed).surface;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_surface_csv(const std::filesystem::path& path, const RiskSurface& surface,
                       std::span<const EnsembleSize> m_list,
                       const std::vector<std::optional<double>>* test_risk) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << "k,M,estimate,oob_min,oob_mean,skipped_pairs";
    if (test_risk) out << ",test_risk";
    out << '\n';
    std::size_t cell = 0;
    for (std::size_t r = 0; r < surface.rows.size(); ++r) {
        const SurfaceRow& row = surface.rows[r];
        for (EnsembleSize m : m_list) {
            const auto est = surface.estimate(r, m);
            out << row.k << ',' << m.to_string() << ',' << (est ? format_double(*est) : "NA") << ',';
            if (row.is_null()) {
                out << surface.n << ',' << format_double(static_cast<double>(surface.n)) << ",0";
            } else if (row.components) {
                out << row.components->oob_min << ',' << format_double(row.components->oob_mean)
                    << ',' << row.components->skipped_pairs;
            } else {
                out << "NA,NA,NA";
            }
            if (test_risk) {
                const auto& t = test_risk->at(cell);
                out << ',' << (t ? format_double(*t) : "NA");
            }
            out << '\n';
            ++cell;
        }
    }
    require(out.good(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

} // namespace ecv
