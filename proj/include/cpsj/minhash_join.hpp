#pragma once

#include "cpsj/core.hpp"
#include "cpsj/cpsjoin.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace cpsj {

/// Linear cost model for the splitting step: each pair inside a bucket
/// costs one sketch comparison, each record costs one hash per function.
struct SplitCostModel {
    double per_estimate = 1.0;
    double per_hash = 1.0;
};

struct MinHashJoinParams {
    double lambda = 0.5;
    double phi = 0.9;
    std::optional<std::size_t> k;  // auto-selected from {2..10} when empty
    std::optional<std::size_t> repetitions;  // from the recall formula when empty
    std::size_t sketch_words = 8;
    double delta = 0.05;
    std::size_t t = 128;
    std::uint64_t seed = 0;
    SplitCostModel cost;

    std::function<bool(const std::vector<ResultPair>&)> stop_when;
};

inline constexpr std::size_t kMinAutoK = 2;
inline constexpr std::size_t kMaxAutoK = 10;

/// Bucket key of every record for one repetition: the concatenation of k
/// MinHash values hashed to 64 bits.
///
/// With an embedding, the k functions are k positions of [t] drawn with
/// replacement, so a pair with Braun-Blanquet similarity s collides with
/// probability exactly s^k. Without one, k fresh MinHash functions are
/// evaluated on the raw records.
std::vector<std::uint64_t> bucket_keys(const Dataset& ds, const PreparedInput& input, std::size_t k,
                                       std::uint64_t rep_seed);

/// Estimated cost of one splitting step with k functions.
double split_cost(const Dataset& ds, const PreparedInput& input, std::size_t k, std::uint64_t seed,
                  const SplitCostModel& model = {});

/// argmin of split_cost over k in {2..10}; ties go to the smaller k.
std::size_t choose_k(const Dataset& ds, const PreparedInput& input, std::uint64_t seed, const SplitCostModel& model = {});

/// ⌈ln(1/(1−φ)) / λ^k⌉, at least 1.
std::size_t repetitions_for_recall(double lambda, std::size_t k, double phi);

struct MinHashJoinOutput : JoinOutput {
    std::size_t k = 0;
};

MinHashJoinOutput minhash_join(const Dataset& ds, const PreparedInput& input, const MinHashJoinParams& params);

}  // namespace cpsj
