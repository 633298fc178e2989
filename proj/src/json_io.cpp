#include "ecv/json_io.hpp"

#include <algorithm>
#include <cstring>

#include "ecv/error.hpp"

namespace ecv {

namespace {

template <class T>
T get_as(const Json& j, const char* key, const std::string& context) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidParameter, context + "." + key + ": " + e.what());
    }
}

template <class T>
void read_if(const Json& j, const char* key, T& out, const std::string& context) {
    if (j.contains(key)) out = get_as<T>(j, key, context);
}

} // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    require(j.is_object(), ErrorKind::InvalidParameter, context + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        require(known, ErrorKind::InvalidParameter, "unknown key '" + key + "' in " + context);
    }
}

Json to_json(const SyntheticSpec& spec) {
    return Json{{"model", to_string(spec.model)}, {"n", spec.n},         {"p", spec.p},
                {"rho_ar", spec.rho_ar},          {"sigma", spec.sigma}, {"seed", spec.seed}};
}

SyntheticSpec synthetic_spec_from_json(const Json& j, SyntheticSpec spec) {
    const std::string ctx = "synthetic";
    reject_unknown_keys(j, {"model", "n", "p", "rho_ar", "sigma", "seed"}, ctx);
    if (j.contains("model")) spec.model = parse_synthetic_model(get_as<std::string>(j, "model", ctx));
    read_if(j, "n", spec.n, ctx);
    read_if(j, "p", spec.p, ctx);
    read_if(j, "rho_ar", spec.rho_ar, ctx);
    read_if(j, "sigma", spec.sigma, ctx);
    read_if(j, "seed", spec.seed, ctx);
    spec.validate();
    return spec;
}

Json to_json(const PredictorSpec& spec) {
    Json j{{"kind", predictor_name(spec)}};
    if (const auto* s = std::get_if<RidgeSpec>(&spec)) j["lambda"] = s->lambda;
    if (const auto* s = std::get_if<KnnSpec>(&spec)) j["neighbors"] = s->neighbors;
    if (const auto* s = std::get_if<TreeSpec>(&spec)) {
        j["min_node_size"] = s->min_node_size;
        j["feature_fraction"] = s->feature_fraction;
        j["max_depth"] = s->max_depth ? Json(*s->max_depth) : Json(nullptr);
    }
    return j;
}

PredictorSpec predictor_spec_from_json(const Json& j) {
    const std::string ctx = "predictor";
    require(j.is_object() && j.contains("kind"), ErrorKind::InvalidParameter,
            "predictor needs a 'kind'");
    const auto kind = get_as<std::string>(j, "kind", ctx);
    PredictorSpec spec;
    if (kind == "null") {
        reject_unknown_keys(j, {"kind"}, ctx);
        spec = NullSpec{};
    } else if (kind == "ridge") {
        reject_unknown_keys(j, {"kind", "lambda"}, ctx);
        RidgeSpec s;
        read_if(j, "lambda", s.lambda, ctx);
        spec = s;
    } else if (kind == "ridgeless") {
        reject_unknown_keys(j, {"kind"}, ctx);
        spec = RidgelessSpec{};
    } else if (kind == "knn") {
        reject_unknown_keys(j, {"kind", "neighbors"}, ctx);
        KnnSpec s;
        read_if(j, "neighbors", s.neighbors, ctx);
        spec = s;
    } else if (kind == "tree") {
        reject_unknown_keys(j, {"kind", "min_node_size", "feature_fraction", "max_depth"}, ctx);
        TreeSpec s;
        read_if(j, "min_node_size", s.min_node_size, ctx);
        read_if(j, "feature_fraction", s.feature_fraction, ctx);
        if (j.contains("max_depth") && !j.at("max_depth").is_null())
            s.max_depth = get_as<std::size_t>(j, "max_depth", ctx);
        spec = s;
    } else {
        fail(ErrorKind::InvalidParameter, "unknown predictor kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

Json to_json(const CenteringSpec& spec) {
    return Json{{"method", to_string(spec.method)}, {"A", spec.mom_exponent}};
}

Json to_json(const EcvConfig& cfg) {
    Json j{{"nu", cfg.nu},
           {"m0", cfg.m0},
           {"delta", cfg.delta},
           {"centering", to_json(cfg.centering)},
           {"mode", to_string(cfg.mode)},
           {"m_max", cfg.m_max ? Json(*cfg.m_max) : Json(nullptr)},
           {"zeta", cfg.zeta ? Json(*cfg.zeta) : Json(nullptr)},
           {"selection", to_string(cfg.selection)},
           {"normalize", cfg.normalize},
           {"grid", cfg.grid ? Json(*cfg.grid) : Json(nullptr)},
           {"seed", cfg.seed}};
    return j;
}

EcvConfig ecv_config_from_json(const Json& j, EcvConfig cfg) {
    const std::string ctx = "ecv";
    reject_unknown_keys(j, {"nu", "m0", "delta", "centering", "mode", "m_max", "zeta", "selection",
                            "normalize", "grid", "seed"},
                        ctx);
    read_if(j, "nu", cfg.nu, ctx);
    read_if(j, "m0", cfg.m0, ctx);
    read_if(j, "delta", cfg.delta, ctx);
    if (j.contains("centering")) {
        const Json& c = j.at("centering");
        reject_unknown_keys(c, {"method", "A"}, ctx + ".centering");
        if (c.contains("method"))
            cfg.centering.method = parse_centering_method(get_as<std::string>(c, "method", ctx));
        read_if(c, "A", cfg.centering.mom_exponent, ctx + ".centering");
    }
    if (j.contains("mode")) cfg.mode = parse_sampling_mode(get_as<std::string>(j, "mode", ctx));
    if (j.contains("m_max"))
        cfg.m_max = j.at("m_max").is_null() ? std::nullopt
                                            : std::optional(get_as<std::size_t>(j, "m_max", ctx));
    if (j.contains("zeta"))
        cfg.zeta = j.at("zeta").is_null() ? std::nullopt
                                          : std::optional(get_as<double>(j, "zeta", ctx));
    if (j.contains("selection"))
        cfg.selection = parse_selection_rule(get_as<std::string>(j, "selection", ctx));
    read_if(j, "normalize", cfg.normalize, ctx);
    if (j.contains("grid"))
        cfg.grid = j.at("grid").is_null()
                       ? std::nullopt
                       : std::optional(get_as<std::vector<std::size_t>>(j, "grid", ctx));
    read_if(j, "seed", cfg.seed, ctx);
    cfg.validate();
    return cfg;
}

Json to_json(const TuneResult& result) {
    Json j;
    j["method"] = result.method;
    j["k_hat"] = result.k_hat;
    j["m_hat"] = result.m_hat;
    j["estimated_risk"] = result.estimated_risk;
    j["budget_clipped"] = result.budget_clipped;
    j["fallback_to_additive"] = result.fallback_to_additive;
    j["normalized"] = result.normalized;
    j["base_fits"] = result.base_fits;
    j["null_predictor"] = !result.ensemble.has_value();
    j["to_bag"] = Json{{"evaluated", result.to_bag.evaluated},
                       {"bag", result.to_bag.bag},
                       {"null_risk", result.to_bag.null_risk},
                       {"best_r1", result.to_bag.best_r1},
                       {"best_rmmax", result.to_bag.best_rmmax},
                       {"lhs", result.to_bag.lhs},
                       {"rhs", result.to_bag.rhs}};
    j["grid"] = result.grid;
    if (result.surface) {
        const RiskSurface& s = *result.surface;
        j["null_risk"] = s.null_risk;
        Json rows = Json::array();
        for (const SurfaceRow& row : s.rows) {
            Json r{{"k", row.k}};
            if (row.components) {
                const RiskComponents& c = *row.components;
                r["r1"] = c.r1;
                r["r2"] = c.r2;
                r["r_inf"] = extrapolate(c, EnsembleSize::infinite());
                r["oob_min"] = c.oob_min;
                r["oob_mean"] = c.oob_mean;
                r["skipped_pairs"] = c.skipped_pairs;
            } else if (row.is_null()) {
                r["null_risk"] = s.null_risk;
            } else {
                r["missing"] = row.missing_reason;
            }
            rows.push_back(std::move(r));
        }
        j["components"] = std::move(rows);
    }
    if (result.validation) {
        const ErrorTable& t = *result.validation;
        j["validation_m_max"] = t.m_max;
        Json rows = Json::array();
        for (std::size_t r = 0; r < t.ks.size(); ++r) {
            Json vals = Json::array();
            for (std::size_t m = 1; m <= t.m_max; ++m) {
                const auto& v = t.at(r, m);
                vals.push_back(v ? Json(*v) : Json(nullptr));
            }
            rows.push_back(Json{{"k", t.ks[r]}, {"errors", std::move(vals)}});
        }
        j["validation"] = std::move(rows);
    }
    return j;
}

} // namespace ecv
