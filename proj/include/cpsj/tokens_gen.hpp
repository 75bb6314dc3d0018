#pragma once

#include "cpsj/core.hpp"

#include <cstdint>
#include <vector>

namespace cpsj {

struct PlantedLevel {
    double similarity = 0.0;  // λ′ in (0, 1]
    std::size_t pairs = 0;
};

/// Synthetic TOKENS-style data: a small universe where every token sits in
/// up to `cap` sets.
struct TokensGenSpec {
    std::uint32_t d = 1000;
    std::uint32_t cap = 1000;
    std::size_t n_background = 2400;
    std::vector<PlantedLevel> planted;
    double background_similarity = 0.2;
    std::uint64_t seed = 0;
};

struct PlantedPair {
    RecordId a = 0;
    RecordId b = 0;
    double level = 0.0;
};

struct GeneratedDataset {
    Dataset dataset;
    std::vector<PlantedPair> planted;  // ids in `dataset`
};

/// round(2λ′/(1+λ′) · d): two random sets of this size have expected Jaccard λ′.
std::size_t planted_set_size(double level, std::uint32_t d);

/// round(2λ′s/(1+λ′)) shared tokens, which puts o/(2s−o) at ≈ λ′.
std::size_t planted_overlap(double level, std::size_t set_size);

/// Planted pairs are drawn first, then background sets, each token chosen
/// uniformly among those still used by fewer than `cap` sets. Record order
/// is shuffled and the result preprocessed like a loaded file (a λ′ = 1
/// pair collapses to one record). Throws std::invalid_argument when the cap
/// leaves too few tokens for a set.
GeneratedDataset generate_tokens(const TokensGenSpec& spec);

/// d = 1000, cap = 1000, 2400 background sets, 20 planted pairs for each
/// λ′ in {0.55, 0.65, 0.75, 0.85, 0.95}.
TokensGenSpec tokens_mini_spec(std::uint64_t seed);

/// `n` uniformly random sets of `set_size` distinct tokens from [universe).
Dataset generate_uniform(std::size_t n, std::size_t set_size, std::uint32_t universe, std::uint64_t seed);

/// 10,000 sets of 10 tokens over a 200-token universe.
Dataset uniform_mini(std::uint64_t seed);

}  // namespace cpsj
