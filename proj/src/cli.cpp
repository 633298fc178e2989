#include "ecv/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecv/baselines.hpp"
#include "ecv/dataset.hpp"
#include "ecv/error.hpp"
#include "ecv/json_io.hpp"
#include "ecv/parallel.hpp"
#include "ecv/predictors.hpp"
#include "ecv/risk.hpp"
#include "ecv/tuning.hpp"

namespace ecv {

namespace fs = std::filesystem;

namespace {

// Flags of one subcommand. Values are only applied when the flag
// was given, so config-file values survive unless overridden.
struct Flags {
    std::string config_path;
    std::string out_dir = ".";
    std::size_t threads = 0;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;

    // data
    std::string train_path;
    std::string test_path;
    std::string response = "-1";
    bool no_header = false;
    CLI::Option* response_opt = nullptr;
    CLI::Option* no_header_opt = nullptr;

    // synthetic
    std::string model = "linear";
    std::size_t n = 0;
    std::size_t p = 0;
    double rho = 0.0;
    double sigma = 0.0;
    std::size_t n_test = 2000;
    CLI::Option *model_opt = nullptr, *n_opt = nullptr, *p_opt = nullptr, *rho_opt = nullptr,
                *sigma_opt = nullptr, *n_test_opt = nullptr;

    // predictor
    std::string predictor = "ridge";
    double lambda = 0.1;
    std::size_t neighbors = 5;
    std::size_t min_node_size = 5;
    double feature_fraction = 1.0 / 3.0;
    std::size_t max_depth = 0;
    CLI::Option *predictor_opt = nullptr, *lambda_opt = nullptr, *neighbors_opt = nullptr,
                *min_node_opt = nullptr, *ff_opt = nullptr, *max_depth_opt = nullptr;

    // ecv
    double nu = 0.5;
    std::size_t m0 = 10;
    double delta = 0.05;
    std::string centering = "avg";
    double mom_a = 1.0;
    std::string mode = "bagging";
    std::size_t m_max = 0;
    double zeta = 0.0;
    std::string selection = "additive";
    bool normalize = false;
    std::string grid;
    CLI::Option *nu_opt = nullptr, *m0_opt = nullptr, *delta_opt = nullptr,
                *centering_opt = nullptr, *mom_a_opt = nullptr, *mode_opt = nullptr,
                *m_max_opt = nullptr, *zeta_opt = nullptr, *selection_opt = nullptr,
                *normalize_opt = nullptr, *grid_opt = nullptr;

    // surface / compare
    std::string m_list = "1,2,5,10,20,50,inf";
    std::string with_test;
    double alpha = 5.0 / 6.0;
    std::size_t folds = 5;
    std::string metric = "nmse";
    bool warmup = false;
    std::string sizes;
    CLI::Option *alpha_opt = nullptr, *folds_opt = nullptr, *metric_opt = nullptr,
                *warmup_opt = nullptr;
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(item, &pos);
            require(pos == item.size() && item[0] != '-', ErrorKind::InvalidParameter,
                    "bad " + what + " entry '" + item + "'");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            fail(ErrorKind::InvalidParameter, "bad " + what + " entry '" + item + "'");
        }
    }
    return out;
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open config '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, "config '" + path + "': " + e.what());
    }
    reject_unknown_keys(j, {"synthetic", "predictor", "ecv", "baseline", "data", "seed"}, "config");
    return j;
}

std::uint64_t resolve_seed(const Flags& f, const Json& config) {
    if (given(f.seed_opt)) return f.seed;
    if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
    if (const char* env = std::getenv("ECV_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::logic_error&) {
            fail(ErrorKind::InvalidParameter, std::string("ECV_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--out", f.out_dir, "Output directory");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    f.seed_opt = cmd->add_option("--seed", f.seed, "Master seed (fallback: ECV_SEED)");
}

void add_data(CLI::App* cmd, Flags& f, bool need_test) {
    cmd->add_option("--train", f.train_path, "Training CSV")->required();
    auto* test = cmd->add_option("--test", f.test_path, "Test CSV");
    if (need_test) test->required();
    f.response_opt = cmd->add_option("--response", f.response,
                                     "Response column: header name or index (-1 = last)");
    f.no_header_opt = cmd->add_flag("--no-header", f.no_header, "CSV files have no header row");
}

void add_predictor(CLI::App* cmd, Flags& f) {
    f.predictor_opt = cmd->add_option("--predictor", f.predictor, "null|ridge|ridgeless|knn|tree");
    f.lambda_opt = cmd->add_option("--lambda", f.lambda, "Ridge penalty");
    f.neighbors_opt = cmd->add_option("--neighbors", f.neighbors, "kNN neighbours");
    f.min_node_opt = cmd->add_option("--min-node-size", f.min_node_size, "Tree minimum node size");
    f.ff_opt = cmd->add_option("--feature-fraction", f.feature_fraction,
                               "Tree share of features tried per split");
    f.max_depth_opt = cmd->add_option("--max-depth", f.max_depth, "Tree depth limit");
}

void add_ecv(CLI::App* cmd, Flags& f) {
    f.nu_opt = cmd->add_option("--nu", f.nu, "Grid unit exponent, k0 = floor(n^nu)");
    f.m0_opt = cmd->add_option("--m0", f.m0, "Members fitted per k for estimation");
    f.delta_opt = cmd->add_option("--delta", f.delta, "Optimality tolerance");
    f.centering_opt = cmd->add_option("--centering", f.centering, "avg|mom");
    f.mom_a_opt = cmd->add_option("--mom-a", f.mom_a, "MOM exponent A (eta = n^-A)");
    f.mode_opt = cmd->add_option("--mode", f.mode, "bagging|subagging");
    f.m_max_opt = cmd->add_option("--m-max", f.m_max, "Ensemble-size budget");
    f.zeta_opt = cmd->add_option("--zeta", f.zeta, "To-bag improvement factor");
    f.selection_opt = cmd->add_option("--selection", f.selection, "additive|multiplicative");
    f.normalize_opt = cmd->add_flag("--normalize", f.normalize, "Scale risks by the null risk");
    f.grid_opt = cmd->add_option("--grid", f.grid, "Explicit comma-separated k grid");
}

CsvOptions csv_options(const Flags& f, const Json& config) {
    CsvOptions opts;
    if (config.contains("data")) {
        const Json& d = config.at("data");
        reject_unknown_keys(d, {"response", "header"}, "config.data");
        if (d.contains("header")) opts.header = d.at("header").get<bool>();
        if (d.contains("response")) {
            const Json& r = d.at("response");
            if (r.is_string()) opts.response = r.get<std::string>();
            else opts.response = r.get<long>();
        }
    }
    if (given(f.no_header_opt)) opts.header = !f.no_header;
    if (given(f.response_opt)) {
        try {
            std::size_t pos = 0;
            const long idx = std::stol(f.response, &pos);
            if (pos == f.response.size()) opts.response = idx;
            else opts.response = f.response;
        } catch (const std::logic_error&) {
            opts.response = f.response;
        }
    }
    return opts;
}

PredictorSpec resolve_predictor(const Flags& f, const Json& config) {
    Json j = config.contains("predictor") ? config.at("predictor") : Json{{"kind", "ridge"}};
    require(j.is_object(), ErrorKind::InvalidParameter, "config.predictor must be an object");
    if (given(f.predictor_opt) && j.value("kind", std::string()) != f.predictor)
        j = Json{{"kind", f.predictor}};
    const std::string kind = j.value("kind", std::string("ridge"));
    if (given(f.lambda_opt)) {
        require(kind == "ridge", ErrorKind::InvalidParameter, "--lambda applies to ridge only");
        j["lambda"] = f.lambda;
    }
    if (given(f.neighbors_opt)) {
        require(kind == "knn", ErrorKind::InvalidParameter, "--neighbors applies to knn only");
        j["neighbors"] = f.neighbors;
    }
    if (given(f.min_node_opt) || given(f.ff_opt) || given(f.max_depth_opt)) {
        require(kind == "tree", ErrorKind::InvalidParameter, "tree flags need --predictor tree");
        if (given(f.min_node_opt)) j["min_node_size"] = f.min_node_size;
        if (given(f.ff_opt)) j["feature_fraction"] = f.feature_fraction;
        if (given(f.max_depth_opt)) j["max_depth"] = f.max_depth;
    }
    return predictor_spec_from_json(j);
}

EcvConfig resolve_ecv(const Flags& f, const Json& config, std::uint64_t seed) {
    EcvConfig cfg;
    if (config.contains("ecv")) cfg = ecv_config_from_json(config.at("ecv"));
    if (given(f.nu_opt)) cfg.nu = f.nu;
    if (given(f.m0_opt)) cfg.m0 = f.m0;
    if (given(f.delta_opt)) cfg.delta = f.delta;
    if (given(f.centering_opt)) cfg.centering.method = parse_centering_method(f.centering);
    if (given(f.mom_a_opt)) cfg.centering.mom_exponent = f.mom_a;
    if (given(f.mode_opt)) cfg.mode = parse_sampling_mode(f.mode);
    if (given(f.m_max_opt)) cfg.m_max = f.m_max;
    if (given(f.zeta_opt)) cfg.zeta = f.zeta;
    if (given(f.selection_opt)) cfg.selection = parse_selection_rule(f.selection);
    if (given(f.normalize_opt)) cfg.normalize = f.normalize;
    if (given(f.grid_opt)) cfg.grid = parse_size_list(f.grid, "grid");
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    require(out.good(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

fs::path prepare_out(const Flags& f) {
    const fs::path dir(f.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
    return dir;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    const Json config = load_config(f.config_path);
    SyntheticSpec spec;
    if (config.contains("synthetic")) spec = synthetic_spec_from_json(config.at("synthetic"));
    if (given(f.model_opt)) spec.model = parse_synthetic_model(f.model);
    if (given(f.n_opt)) spec.n = f.n;
    if (given(f.p_opt)) spec.p = f.p;
    if (given(f.rho_opt)) spec.rho_ar = f.rho;
    if (given(f.sigma_opt)) spec.sigma = f.sigma;
    spec.seed = resolve_seed(f, config);
    spec.validate();
    require(f.n_test >= 1, ErrorKind::InvalidParameter, "--n-test must be >= 1");

    // One draw of n + n_test rows; the first n rows do not depend on n_test.
    SyntheticSpec all = spec;
    all.n = spec.n + f.n_test;
    const Dataset data = simulate(all);
    std::vector<std::size_t> train_ids(spec.n);
    std::vector<std::size_t> test_ids(f.n_test);
    std::iota(train_ids.begin(), train_ids.end(), std::size_t{0});
    std::iota(test_ids.begin(), test_ids.end(), spec.n);

    const fs::path dir = prepare_out(f);
    write_csv(dir / "train.csv", data.rows(train_ids));
    write_csv(dir / "test.csv", data.rows(test_ids));
    Json provenance{{"command", "simulate"}, {"synthetic", to_json(spec)}, {"n_test", f.n_test}};
    write_json(dir / "run_config.json", provenance);
    out << "wrote " << (dir / "train.csv").string() << " (" << spec.n << " rows) and "
        << (dir / "test.csv").string() << " (" << f.n_test << " rows)\n";
    return 0;
}

std::vector<EnsembleSize> parse_m_list(const std::string& text) {
    std::vector<EnsembleSize> out;
    for (const auto& item : split_list(text)) out.push_back(EnsembleSize::parse(item));
    require(!out.empty(), ErrorKind::InvalidParameter, "empty --m-list");
    return out;
}

Json provenance(const std::string& command, const PredictorSpec& spec, const EcvConfig& cfg,
                const Flags& f) {
    return Json{{"command", command},
                {"train", f.train_path},
                {"test", f.test_path},
                {"predictor", to_json(spec)},
                {"ecv", to_json(cfg)}};
}

int cmd_tune(const Flags& f, std::ostream& out) {
    const Json config = load_config(f.config_path);
    const CsvOptions csv = csv_options(f, config);
    const Dataset train = load_csv(f.train_path, csv);
    const PredictorSpec spec = resolve_predictor(f, config);
    const EcvConfig cfg = resolve_ecv(f, config, resolve_seed(f, config));

    const TuneResult result = ecv_tune(train, spec, cfg);
    Json j = to_json(result);
    if (!f.test_path.empty()) {
        const Dataset test = load_csv(f.test_path, csv);
        const Eigen::VectorXd pred = result.predict(test.features);
        j["test_mse"] = mean_squared_error(pred, test.response);
        j["test_nmse"] = nmse(pred, test.response);
    }

    const fs::path dir = prepare_out(f);
    write_json(dir / "tune.json", j);
    std::vector<EnsembleSize> m_list = parse_m_list(f.m_list);
    if (cfg.m_max && std::find(m_list.begin(), m_list.end(), EnsembleSize(*cfg.m_max)) == m_list.end())
        m_list.push_back(*cfg.m_max);
    write_surface_csv(dir / "surface.csv", *result.surface, m_list);
    write_json(dir / "run_config.json", provenance("tune", spec, cfg, f));
    out << "k_hat=" << result.k_hat << " m_hat=" << result.m_hat
        << " estimated_risk=" << format_double(result.estimated_risk) << '\n';
    return 0;
}

int cmd_surface(const Flags& f, std::ostream& out) {
    const Json config = load_config(f.config_path);
    const CsvOptions csv = csv_options(f, config);
    const Dataset train = load_csv(f.train_path, csv);
    const PredictorSpec spec = resolve_predictor(f, config);
    const EcvConfig cfg = resolve_ecv(f, config, resolve_seed(f, config));
    const std::vector<EnsembleSize> m_list = parse_m_list(f.m_list);

    const std::vector<std::size_t> grid = cfg.grid ? *cfg.grid : build_grid(train.n(), cfg.nu);
    SurfaceFit fit = fit_surface(train, spec, grid, cfg.m0, cfg.mode, cfg.centering, cfg.seed);

    std::optional<std::vector<std::optional<double>>> test_risk;
    if (!f.with_test.empty()) {
        const Dataset test = load_csv(f.with_test, csv);
        std::size_t largest = 0;
        for (EnsembleSize m : m_list)
            if (!m.is_infinite()) largest = std::max(largest, m.value());
        test_risk.emplace();
        for (std::size_t r = 0; r < grid.size(); ++r) {
            std::optional<Eigen::MatrixXd> preds;
            if (fit.ensembles[r] && largest > 0) {
                FittedEnsemble ens = *fit.ensembles[r];
                if (largest > ens.size())
                    ens = extend_ensemble(ens, train, largest - ens.size(), cfg.seed);
                preds = member_predictions(ens, test.features, largest);
            }
            for (EnsembleSize m : m_list) {
                if (grid[r] == 0) {
                    test_risk->push_back(test.response.squaredNorm() /
                                         static_cast<double>(test.n()));
                } else if (m.is_infinite()) {
                    test_risk->push_back(std::nullopt);
                } else if (preds) {
                    const Eigen::VectorXd mean =
                        preds->leftCols(static_cast<Eigen::Index>(m.value())).rowwise().mean();
                    test_risk->push_back(mean_squared_error(mean, test.response));
                } else {
                    test_risk->push_back(std::nullopt);
                }
            }
        }
    }

    const fs::path dir = prepare_out(f);
    write_surface_csv(dir / "surface.csv", fit.surface, m_list, test_risk ? &*test_risk : nullptr);
    Json prov = provenance("surface", spec, cfg, f);
    prov["m_list"] = f.m_list;
    prov["with_test"] = f.with_test;
    write_json(dir / "run_config.json", prov);
    out << "wrote " << (dir / "surface.csv").string() << " (" << grid.size() * m_list.size()
        << " rows)\n";
    return 0;
}

int cmd_compare(const Flags& f, std::ostream& out) {
    const Json config = load_config(f.config_path);
    const CsvOptions csv = csv_options(f, config);
    const Dataset train_all = load_csv(f.train_path, csv);
    const Dataset test = load_csv(f.test_path, csv);
    const PredictorSpec spec = resolve_predictor(f, config);
    const std::uint64_t seed = resolve_seed(f, config);
    EcvConfig cfg = resolve_ecv(f, config, seed);

    double alpha = f.alpha;
    std::size_t folds = f.folds;
    std::size_t m_max = cfg.m_max.value_or(50);
    std::string metric = f.metric;
    bool warmup = f.warmup;
    if (config.contains("baseline")) {
        const Json& b = config.at("baseline");
        reject_unknown_keys(b, {"alpha", "folds", "m_max", "metric", "warmup"}, "config.baseline");
        if (b.contains("alpha") && !given(f.alpha_opt)) alpha = b.at("alpha").get<double>();
        if (b.contains("folds") && !given(f.folds_opt)) folds = b.at("folds").get<std::size_t>();
        if (b.contains("m_max") && !given(f.m_max_opt)) m_max = b.at("m_max").get<std::size_t>();
        if (b.contains("metric") && !given(f.metric_opt)) metric = b.at("metric").get<std::string>();
        if (b.contains("warmup") && !given(f.warmup_opt)) warmup = b.at("warmup").get<bool>();
    }
    cfg.m_max = m_max;

    std::vector<std::size_t> sizes = parse_size_list(f.sizes, "sizes");
    const bool sweep = !sizes.empty();
    if (!sweep) sizes.push_back(train_all.n());

    const fs::path dir = prepare_out(f);
    CompareOptions options{parse_metric(metric), warmup};
    Json prov = provenance("compare", spec, cfg, f);
    prov["baseline"] = Json{{"alpha", alpha}, {"folds", folds}, {"m_max", m_max},
                            {"metric", metric}, {"warmup", warmup}};
    prov["sizes"] = sizes;
    for (std::size_t size : sizes) {
        require(size >= 3 && size <= train_all.n(), ErrorKind::InvalidParameter,
                "sweep size " + std::to_string(size) + " outside [3, " +
                    std::to_string(train_all.n()) + "]");
        std::vector<std::size_t> ids(size);
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        const Dataset train = train_all.rows(ids);
        const std::vector<std::size_t> grid = cfg.grid ? *cfg.grid : build_grid(train.n(), cfg.nu);

        BaselineSpec split{SampleSplit{alpha}, m_max, grid, seed};
        BaselineSpec kfold{KFold{folds}, m_max, grid, seed};
        const ComparisonReport report = compare(train, test, spec, cfg, {split, kfold}, options);
        const fs::path file =
            sweep ? dir / ("compare_n" + std::to_string(size) + ".csv") : dir / "compare.csv";
        write_comparison_csv(file, report);
        out << "wrote " << file.string() << '\n';
    }
    write_json(dir / "run_config.json", prov);
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Extrapolated cross-validation for bagged and subagged ensembles", "ecv"};
    app.require_subcommand(1);
    // One flag set per subcommand so each keeps its own "was given" options.
    Flags sim_f, tune_f, surface_f, compare_f;

    auto* simulate_cmd = app.add_subcommand("simulate", "Generate synthetic train/test CSVs");
    add_common(simulate_cmd, sim_f);
    sim_f.model_opt = simulate_cmd->add_option("--model", sim_f.model, "linear|quad|tanh");
    sim_f.n_opt = simulate_cmd->add_option("--n", sim_f.n, "Training rows");
    sim_f.p_opt = simulate_cmd->add_option("--p", sim_f.p, "Features");
    sim_f.rho_opt = simulate_cmd->add_option("--rho", sim_f.rho, "AR(1) correlation");
    sim_f.sigma_opt = simulate_cmd->add_option("--sigma", sim_f.sigma, "Noise standard deviation");
    sim_f.n_test_opt = simulate_cmd->add_option("--n-test", sim_f.n_test, "Test rows");

    auto* tune_cmd = app.add_subcommand("tune", "Tune (k, M) by extrapolated cross-validation");
    add_common(tune_cmd, tune_f);
    add_data(tune_cmd, tune_f, false);
    add_predictor(tune_cmd, tune_f);
    add_ecv(tune_cmd, tune_f);
    tune_cmd->add_option("--m-list", tune_f.m_list, "Ensemble sizes exported in surface.csv");

    auto* surface_cmd = app.add_subcommand("surface", "Export the extrapolated risk surface");
    add_common(surface_cmd, surface_f);
    add_data(surface_cmd, surface_f, false);
    add_predictor(surface_cmd, surface_f);
    add_ecv(surface_cmd, surface_f);
    surface_cmd->add_option("--m-list", surface_f.m_list, "Ensemble sizes, e.g. 1,2,5,10,inf");
    surface_cmd->add_option("--with-test", surface_f.with_test, "Test CSV for a held-out risk column");

    auto* compare_cmd = app.add_subcommand("compare", "Compare ECV with split and K-fold CV");
    add_common(compare_cmd, compare_f);
    add_data(compare_cmd, compare_f, true);
    add_predictor(compare_cmd, compare_f);
    add_ecv(compare_cmd, compare_f);
    compare_f.alpha_opt = compare_cmd->add_option("--alpha", compare_f.alpha, "Training share of the split");
    compare_f.folds_opt = compare_cmd->add_option("--folds", compare_f.folds, "K for K-fold CV");
    compare_f.metric_opt = compare_cmd->add_option("--metric", compare_f.metric, "nmse|mse");
    compare_f.warmup_opt = compare_cmd->add_flag("--warmup", compare_f.warmup, "Untimed warm-up run per method");
    compare_cmd->add_option("--sizes", compare_f.sizes, "Comma-separated training sizes to sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(sim_f, out);
        if (tune_cmd->parsed()) {
            set_thread_count(tune_f.threads);
            return cmd_tune(tune_f, out);
        }
        if (surface_cmd->parsed()) {
            set_thread_count(surface_f.threads);
            return cmd_surface(surface_f, out);
        }
        if (compare_cmd->parsed()) {
            set_thread_count(compare_f.threads);
            return cmd_compare(compare_f, out);
        }
    } catch (const Error& e) {
        err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid-parameter: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace ecv
