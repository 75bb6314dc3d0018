#pragma once

#include "cpsj/core.hpp"
#include "cpsj/hashing.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cpsj {

/// t independent MinHash functions defining the embedding
/// f(x) = {(i, h_i(x)) : i in [t]}.
///
/// t = 128 is the default used by the joins; t = 64 is usually enough for
/// Jaccard thresholds >= 0.5.
class EmbeddingParams {
public:
    static constexpr std::size_t kDefaultSize = 128;

    explicit EmbeddingParams(std::size_t t = kDefaultSize, std::uint64_t seed = 0);

    std::size_t size() const { return fns_.size(); }
    std::uint64_t seed() const { return seed_; }
    const MinHashFunction& fn(std::size_t i) const { return fns_[i]; }

private:
    std::uint64_t seed_;
    std::vector<MinHashFunction> fns_;
};

/// Exactly t pairs (i, h_i(x)). Throws on an empty record.
std::vector<std::pair<std::uint32_t, TokenId>> embed_record(const EmbeddingParams& params, std::span<const TokenId> x);

/// Embedded records, row-major n × t.
///
/// `value(r, i)` is h_i of the original record; `token(r, i)` is the dense
/// id of the pair (i, h_i), assigned first-seen. Row r corresponds to
/// original record `origin[r]`.
class EmbeddedDataset {
public:
    EmbeddedDataset() = default;
    EmbeddedDataset(std::size_t t, std::vector<TokenId> values, std::vector<RecordId> origin);

    std::size_t size() const { return origin_.size(); }
    std::size_t t() const { return t_; }
    std::uint32_t universe() const { return universe_; }

    TokenId value(std::size_t r, std::size_t i) const { return values_[r * t_ + i]; }
    std::span<const TokenId> values(std::size_t r) const { return {values_.data() + r * t_, t_}; }
    std::uint32_t token(std::size_t r, std::size_t i) const { return tokens_[r * t_ + i]; }
    /// Dense tokens of row r, sorted ascending (a Record-shaped view of f(x)).
    std::span<const TokenId> sorted_tokens(std::size_t r) const { return {sorted_.data() + r * t_, t_}; }
    RecordId origin(std::size_t r) const { return origin_[r]; }

    /// Concatenation; dense tokens are recomputed over the union.
    static EmbeddedDataset concat(const EmbeddedDataset& a, const EmbeddedDataset& b);

private:
    void build_tokens();

    std::size_t t_ = 0;
    std::uint32_t universe_ = 0;
    std::vector<TokenId> values_;
    std::vector<std::uint32_t> tokens_;
    std::vector<TokenId> sorted_;
    std::vector<RecordId> origin_;
};

EmbeddedDataset embed_dataset(const EmbeddingParams& params, const Dataset& ds);

}  // namespace cpsj
