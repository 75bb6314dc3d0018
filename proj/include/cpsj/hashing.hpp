#pragma once

#include "cpsj/core.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace cpsj {

/// Simple tabulation ("Zobrist") hashing from 32 to 64 bits with 8-bit
/// characters: four 256-entry tables, one per key byte.
class ZobristTable {
public:
    using Tables = std::array<std::array<std::uint64_t, 256>, 4>;

    /// Tables filled from std::mt19937_64(seed).
    explicit ZobristTable(std::uint64_t seed);
    explicit ZobristTable(const Tables& tables) : tables_(tables) {}

    std::uint64_t operator()(std::uint32_t key) const {
        return tables_[0][key & 0xffU] ^ tables_[1][(key >> 8) & 0xffU] ^ tables_[2][(key >> 16) & 0xffU] ^
               tables_[3][key >> 24];
    }

    const Tables& tables() const { return tables_; }

private:
    Tables tables_;
};

inline std::uint64_t zobrist_hash(const ZobristTable& table, std::uint32_t key) { return table(key); }

/// h(x) = argmin_{j in x} g(j); ties go to the smaller token.
class MinHashFunction {
public:
    explicit MinHashFunction(std::uint64_t seed) : g_(seed) {}
    explicit MinHashFunction(ZobristTable g) : g_(std::move(g)) {}

    /// Throws std::invalid_argument on an empty record.
    TokenId operator()(std::span<const TokenId> x) const;

    const ZobristTable& table() const { return g_; }

private:
    ZobristTable g_;
};

inline TokenId minhash(const MinHashFunction& fn, std::span<const TokenId> x) { return fn(x); }

/// A 1-bit minwise sketch of 64·ℓ bits.
struct Sketch {
    std::vector<std::uint64_t> words;

    std::size_t bits() const { return words.size() * 64; }
    bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1U; }
    friend bool operator==(const Sketch&, const Sketch&) = default;
};

/// 64·ℓ MinHash functions plus 64·ℓ one-bit hash functions, all derived
/// from one seed. Bit i of a sketch is the low bit of bit_fns[i](h_i(x)).
class SketchFamily {
public:
    SketchFamily(std::size_t words, std::uint64_t seed);

    std::size_t words() const { return words_; }
    std::size_t bits() const { return words_ * 64; }
    std::uint64_t seed() const { return seed_; }

    Sketch build(std::span<const TokenId> x) const;
    /// Writes the sketch of x into `out` (exactly words() words).
    void build_into(std::span<const TokenId> x, std::span<std::uint64_t> out) const;

private:
    std::size_t words_;
    std::uint64_t seed_;
    std::vector<MinHashFunction> minhash_fns_;
    std::vector<ZobristTable> bit_fns_;
};

inline Sketch build_sketch(const SketchFamily& family, std::span<const TokenId> x) { return family.build(x); }

/// Sketches for every record of a dataset, stored contiguously.
class SketchSet {
public:
    SketchSet() = default;
    SketchSet(const SketchFamily& family, const Dataset& ds);
    SketchSet(std::size_t words, std::vector<std::uint64_t> data);

    std::size_t words() const { return words_; }
    std::size_t size() const { return words_ == 0 ? 0 : data_.size() / words_; }
    std::span<const std::uint64_t> operator[](std::size_t i) const {
        return {data_.data() + i * words_, words_};
    }

    /// Appends another set with the same word count.
    void append(const SketchSet& other);

private:
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// max(0, 2·p̂ − 1) where p̂ is the fraction of matching bits.
/// Throws std::invalid_argument on length mismatch.
double estimate_similarity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);
inline double estimate_similarity(const Sketch& a, const Sketch& b) { return estimate_similarity(a.words, b.words); }

/// Matching-bit count at and above which a pair passes the sketch filter.
struct SketchThreshold {
    double lambda_hat = 0.0;
    std::size_t min_matches = 0;
    std::size_t bits = 0;

    bool passes(std::size_t hamming) const { return bits - hamming >= min_matches; }
};

/// Largest λ̂ with P[estimate < λ̂] < δ for a pair at similarity exactly λ,
/// where matching bits ~ Binomial(m, (1+λ)/2). Exact CDF evaluation.
SketchThreshold calibrate_sketch_threshold(double lambda, double delta, std::size_t bits);
inline double calibrate_threshold(double lambda, double delta, std::size_t bits) {
    return calibrate_sketch_threshold(lambda, delta, bits).lambda_hat;
}

/// P[X < c] for X ~ Binomial(n, p), summed in log space.
double binomial_cdf_below(std::size_t n, double p, std::size_t c);

}  // namespace cpsj
