#include "ecv/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ecv/error.hpp"
#include "ecv/rng.hpp"

namespace ecv {

Dataset Dataset::make(Eigen::MatrixXd features, Eigen::VectorXd response) {
    require(features.rows() == response.size(), ErrorKind::DimensionMismatch,
            "features have " + std::to_string(features.rows()) + " rows but response has " +
                std::to_string(response.size()) + " entries");
    require(features.allFinite() && response.allFinite(), ErrorKind::InvalidParameter,
            "dataset contains non-finite values");
    return Dataset{std::move(features), std::move(response)};
}

Dataset Dataset::rows(std::span<const std::size_t> ids) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(ids.size()), features.cols());
    out.response.resize(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(ids[r]);
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(src);
        out.response(static_cast<Eigen::Index>(r)) = response(src);
    }
    return out;
}

std::string to_string(SyntheticModel model) {
    switch (model) {
        case SyntheticModel::Linear: return "linear";
        case SyntheticModel::Quad: return "quad";
        case SyntheticModel::Tanh: return "tanh";
    }
    return "linear";
}

SyntheticModel parse_synthetic_model(const std::string& name) {
    if (name == "linear") return SyntheticModel::Linear;
    if (name == "quad") return SyntheticModel::Quad;
    if (name == "tanh") return SyntheticModel::Tanh;
    fail(ErrorKind::InvalidParameter, "unknown synthetic model '" + name + "'");
}

void SyntheticSpec::validate() const {
    require(n >= 1, ErrorKind::InvalidParameter, "n must be >= 1");
    require(p >= 1, ErrorKind::InvalidParameter, "p must be >= 1");
    require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::InvalidParameter,
            "sigma must be >= 0");
    require(std::abs(rho_ar) < 1.0, ErrorKind::InvalidParameter, "|rho_ar| must be < 1");
}

Eigen::MatrixXd ar1_covariance(std::size_t p, double rho) {
    require(p >= 1, ErrorKind::InvalidParameter, "p must be >= 1");
    require(std::abs(rho) < 1.0, ErrorKind::InvalidParameter, "|rho| must be < 1");
    const auto dim = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd sigma(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    return sigma;
}

SortedEigen sorted_eigen(const Eigen::MatrixXd& sym) {
    require(sym.rows() == sym.cols(), ErrorKind::DimensionMismatch, "matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    require(solver.info() == Eigen::Success, ErrorKind::Numeric,
            "symmetric eigensolver did not converge");

    const Eigen::Index dim = sym.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

    SortedEigen out;
    out.values.resize(dim);
    out.vectors.resize(dim, dim);
    const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Eigen::Index src = order[static_cast<std::size_t>(c)];
        out.values(c) = values(src);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (std::abs(v(i)) > 1e-10 * scale) {
                if (v(i) < 0) v = -v;
                break;
            }
        }
        out.vectors.col(c) = v;
    }
    return out;
}

Eigen::VectorXd signal_beta(const Eigen::MatrixXd& sigma) {
    constexpr Eigen::Index kTop = 5;
    require(sigma.rows() >= kTop, ErrorKind::InvalidParameter,
            "signal_beta needs p >= 5, got p = " + std::to_string(sigma.rows()));
    const SortedEigen eig = sorted_eigen(sigma);
    return eig.vectors.leftCols(kTop).rowwise().mean();
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sym) {
    const SortedEigen eig = sorted_eigen(sym);
    const Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * root.asDiagonal() * eig.vectors.transpose();
}

Eigen::VectorXd synthetic_mean(SyntheticModel model, const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& beta, double trace_over_p) {
    const Eigen::VectorXd index = x * beta;
    switch (model) {
        case SyntheticModel::Linear: return index;
        case SyntheticModel::Quad:
            return index + (index.array().square() - trace_over_p).matrix();
        case SyntheticModel::Tanh: return index.array().tanh().matrix();
    }
    return index;
}

Dataset simulate(const SyntheticSpec& spec) {
    spec.validate();
    const Eigen::MatrixXd sigma = ar1_covariance(spec.p, spec.rho_ar);
    const Eigen::VectorXd beta = signal_beta(sigma);
    const Eigen::MatrixXd root = symmetric_sqrt(sigma);

    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    Eigen::MatrixXd z(n, p);
    Rng feature_stream(spec.seed, StreamPurpose::Simulate, {0});
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = feature_stream.normal();
    Eigen::MatrixXd x = z * root;

    Eigen::VectorXd y = synthetic_mean(spec.model, x, beta, sigma.trace() / static_cast<double>(p));
    if (spec.sigma > 0.0) {
        Rng noise_stream(spec.seed, StreamPurpose::Simulate, {1});
        for (Eigen::Index i = 0; i < n; ++i) y(i) += spec.sigma * noise_stream.normal();
    }
    return Dataset::make(std::move(x), std::move(y));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double parse_cell(const std::string& raw, std::size_t line_no, std::size_t column) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        fail(ErrorKind::Parse, "non-numeric cell '" + cell + "' at line " +
                                   std::to_string(line_no) + ", column " +
                                   std::to_string(column + 1));
    }
    return value;
}

} // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::size_t width = 0;
    if (options.header) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) break;
        }
        require(!trim(line).empty(), ErrorKind::Parse, "'" + path.string() + "' is empty");
        for (auto& h : split_fields(line)) header.push_back(trim(h));
        width = header.size();
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (width == 0) width = fields.size();
        require(fields.size() == width, ErrorKind::Parse,
                "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(width));
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) row[c] = parse_cell(fields[c], line_no, c);
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), ErrorKind::Parse, "'" + path.string() + "' has no data rows");
    require(width >= 2, ErrorKind::Parse, "need at least one feature and one response column");

    std::size_t response = 0;
    if (const auto* name = std::get_if<std::string>(&options.response)) {
        require(options.header, ErrorKind::InvalidParameter,
                "response column given by name but the file has no header");
        const auto it = std::find(header.begin(), header.end(), *name);
        require(it != header.end(), ErrorKind::Parse, "response column '" + *name + "' not found");
        response = static_cast<std::size_t>(it - header.begin());
    } else {
        const long idx = std::get<long>(options.response);
        const long w = static_cast<long>(width);
        require(idx >= -w && idx < w, ErrorKind::Parse,
                "response column index " + std::to_string(idx) + " out of range");
        response = static_cast<std::size_t>(idx < 0 ? idx + w : idx);
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(width - 1);
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        Eigen::Index j = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == response) y(i) = row[c];
            else x(i, j++) = row[c];
        }
    }
    return Dataset::make(std::move(x), std::move(y));
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    char buf[32];
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,",
                          data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", data.response(static_cast<Eigen::Index>(i)));
        out << buf;
    }
    require(out.good(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

Split train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::InvalidParameter,
            "test_fraction must lie in (0, 1)");
    const std::size_t n = data.n();
    const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
    require(n_test >= 1 && n_test < n, ErrorKind::InvalidParameter,
            "split of " + std::to_string(n) + " rows at fraction " + std::to_string(test_fraction) +
                " leaves an empty part");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng stream(seed, StreamPurpose::Split);
    std::shuffle(perm.begin(), perm.end(), stream);

    std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return Split{data.rows(train), data.rows(test)};
}

double mean_squared_error(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth) {
    require(predictions.size() == truth.size(), ErrorKind::DimensionMismatch,
            "prediction and truth lengths differ");
    require(truth.size() >= 1, ErrorKind::InvalidParameter, "empty evaluation set");
    return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

double nmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth) {
    require(predictions.size() == truth.size(), ErrorKind::DimensionMismatch,
            "prediction and truth lengths differ");
    require(truth.size() >= 2, ErrorKind::InvalidParameter, "nmse needs at least two points");
    const double variance = (truth.array() - truth.mean()).square().mean();
    require(variance > 0.0, ErrorKind::DivisionByZero, "truth is constant; nmse undefined");
    return mean_squared_error(predictions, truth) / variance;
}

} // namespace ecv
