#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ecv/rng.hpp"

namespace ecv {

/// Bagging draws with replacement, subagging without.
enum class SamplingMode { Bagging, Subagging };

std::string to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(const std::string& name);

/// One index draw I of size k from [0, n) together with its out-of-bag
/// complement.
struct SampleIndices {
    std::vector<std::size_t> draws;     // sorted; repeats allowed only under bagging
    std::vector<std::size_t> distinct;  // sorted, unique
    std::vector<std::size_t> oob;       // sorted, [0, n) \ distinct
    std::size_t n = 0;
    std::size_t k = 0;
};

/// Uniform draw of k row ids out of n.
SampleIndices draw_indices(std::size_t n, std::size_t k, SamplingMode mode, Rng& stream);

/// Rows used by neither a nor b.
std::vector<std::size_t> pair_union_oob(const SampleIndices& a, const SampleIndices& b);

/// Number of b's draws that land in a's distinct ids. For subagging this is
/// |a ∩ b|.
std::size_t overlap_count(const SampleIndices& a, const SampleIndices& b);

struct OverlapSummary {
    double mean_overlap = 0.0;
    double var_overlap = 0.0;  // unbiased sample variance
    std::size_t trials = 0;
};

/// Monte-Carlo summary of overlap_count over independent pairs of draws.
OverlapSummary overlap_stats(std::size_t n, std::size_t k, SamplingMode mode, std::size_t trials,
                             std::uint64_t seed);

/// The substream used for draw `index` of an ensemble at subsample size k.
Rng draw_stream(std::uint64_t master_seed, std::size_t k, std::size_t index);

/// Draws [first, first + count) of the ensemble keyed by (master_seed, k).
std::vector<SampleIndices> draw_ensemble_indices(std::size_t n, std::size_t k, std::size_t count,
                                                 SamplingMode mode, std::uint64_t master_seed,
                                                 std::size_t first = 0);

} // namespace ecv
