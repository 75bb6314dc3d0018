#pragma once

#include "cpsj/core.hpp"
#include "cpsj/cpsjoin.hpp"

#include <cstdint>
#include <vector>

namespace cpsj {

/// Tokens ranked by ascending document frequency, ties by token id.
struct FrequencyOrder {
    std::vector<TokenId> by_rank;  // by_rank[r] = token with rank r
    std::vector<std::uint32_t> rank;  // rank[token]
};

FrequencyOrder frequency_order(const Dataset& ds);

/// Jaccard probing prefix |x| − ⌈λ|x|⌉ + 1.
std::size_t prefix_length(std::size_t size, double lambda);

/// Exact prefix-filtering join. pre_candidates counts every postings hit
/// that survives the size filter; candidates counts distinct pairs sent to
/// verification.
JoinOutput allpairs_join(const Dataset& ds, double lambda);

/// Verifies all C(n, 2) pairs.
std::vector<ResultPair> naive_join(const Dataset& ds, double lambda);

}  // namespace cpsj
