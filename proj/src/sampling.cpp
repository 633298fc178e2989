#include "ecv/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "ecv/error.hpp"
#include "ecv/parallel.hpp"

namespace ecv {

std::string to_string(SamplingMode mode) {
    return mode == SamplingMode::Bagging ? "bagging" : "subagging";
}

SamplingMode parse_sampling_mode(const std::string& name) {
    if (name == "bagging") return SamplingMode::Bagging;
    if (name == "subagging") return SamplingMode::Subagging;
    fail(ErrorKind::InvalidParameter, "unknown sampling mode '" + name + "'");
}

SampleIndices draw_indices(std::size_t n, std::size_t k, SamplingMode mode, Rng& stream) {
    require(k >= 1 && k <= n, ErrorKind::InvalidParameter,
            "subsample size k = " + std::to_string(k) + " must lie in [1, n = " +
                std::to_string(n) + "]");
    SampleIndices out;
    out.n = n;
    out.k = k;
    out.draws.reserve(k);

    if (mode == SamplingMode::Bagging) {
        for (std::size_t i = 0; i < k; ++i) out.draws.push_back(stream.below(n));
        std::sort(out.draws.begin(), out.draws.end());
        out.distinct = out.draws;
        out.distinct.erase(std::unique(out.distinct.begin(), out.distinct.end()),
                           out.distinct.end());
    } else {
        // Partial Fisher-Yates over a lazily materialized permutation.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + stream.below(n - i);
            std::swap(perm[i], perm[j]);
        }
        out.draws.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(out.draws.begin(), out.draws.end());
        out.distinct = out.draws;
    }

    out.oob.reserve(n - out.distinct.size());
    auto it = out.distinct.begin();
    for (std::size_t row = 0; row < n; ++row) {
        if (it != out.distinct.end() && *it == row) ++it;
        else out.oob.push_back(row);
    }
    return out;
}

std::vector<std::size_t> pair_union_oob(const SampleIndices& a, const SampleIndices& b) {
    require(a.n == b.n, ErrorKind::InvalidParameter, "index draws come from different n");
    std::vector<std::size_t> out;
    std::set_intersection(a.oob.begin(), a.oob.end(), b.oob.begin(), b.oob.end(),
                          std::back_inserter(out));
    return out;
}

std::size_t overlap_count(const SampleIndices& a, const SampleIndices& b) {
    std::size_t count = 0;
    for (std::size_t id : b.draws)
        if (std::binary_search(a.distinct.begin(), a.distinct.end(), id)) ++count;
    return count;
}

OverlapSummary overlap_stats(std::size_t n, std::size_t k, SamplingMode mode, std::size_t trials,
                             std::uint64_t seed) {
    require(trials >= 1, ErrorKind::InvalidParameter, "trials must be >= 1");
    // Welford accumulation in trial order.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng stream(seed, StreamPurpose::Overlap, {t});
        const auto a = draw_indices(n, k, mode, stream);
        const auto b = draw_indices(n, k, mode, stream);
        const auto x = static_cast<double>(overlap_count(a, b));
        const double delta = x - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (x - mean);
    }
    OverlapSummary out;
    out.mean_overlap = mean;
    out.var_overlap = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
    out.trials = trials;
    return out;
}

Rng draw_stream(std::uint64_t master_seed, std::size_t k, std::size_t index) {
    return Rng(master_seed, StreamPurpose::Draw, {k, index});
}

std::vector<SampleIndices> draw_ensemble_indices(std::size_t n, std::size_t k, std::size_t count,
                                                 SamplingMode mode, std::uint64_t master_seed,
                                                 std::size_t first) {
    require(count >= 1, ErrorKind::InvalidParameter, "ensemble size must be >= 1");
    std::vector<SampleIndices> out(count);
    parallel_for(count, [&](std::size_t i) {
        Rng stream = draw_stream(master_seed, k, first + i);
        out[i] = draw_indices(n, k, mode, stream);
    });
    return out;
}

} // namespace ecv
