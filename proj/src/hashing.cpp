#include "cpsj/hashing.hpp"

#include "cpsj/random.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cpsj {

ZobristTable::ZobristTable(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& sub : tables_) {
        for (auto& entry : sub) {
            entry = rng();
        }
    }
}

TokenId MinHashFunction::operator()(std::span<const TokenId> x) const {
    if (x.empty()) {
        throw std::invalid_argument("minhash of an empty record");
    }
    TokenId best = x[0];
    std::uint64_t best_hash = g_(x[0]);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const auto h = g_(x[i]);
        // Records are sorted, so the strict comparison keeps the smaller token on ties.
        if (h < best_hash || (h == best_hash && x[i] < best)) {
            best_hash = h;
            best = x[i];
        }
    }
    return best;
}

SketchFamily::SketchFamily(std::size_t words, std::uint64_t seed) : words_(words), seed_(seed) {
    if (words == 0) {
        throw std::invalid_argument("sketch needs at least one word");
    }
    const auto n = bits();
    minhash_fns_.reserve(n);
    bit_fns_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        minhash_fns_.emplace_back(derive_seed(seed, 1, i));
        bit_fns_.emplace_back(derive_seed(seed, 2, i));
    }
}

void SketchFamily::build_into(std::span<const TokenId> x, std::span<std::uint64_t> out) const {
    if (out.size() != words_) {
        throw std::invalid_argument("sketch buffer has wrong length");
    }
    for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = 0;
        for (std::size_t b = 0; b < 64; ++b) {
            const auto i = w * 64 + b;
            const auto bit = bit_fns_[i](minhash_fns_[i](x)) & 1U;
            word |= bit << b;
        }
        out[w] = word;
    }
}

Sketch SketchFamily::build(std::span<const TokenId> x) const {
    Sketch s;
    s.words.assign(words_, 0);
    build_into(x, s.words);
    return s;
}

SketchSet::SketchSet(const SketchFamily& family, const Dataset& ds) : words_(family.words()) {
    data_.assign(ds.size() * words_, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        family.build_into(ds.records[i].view(), {data_.data() + i * words_, words_});
    }
}

SketchSet::SketchSet(std::size_t words, std::vector<std::uint64_t> data) : words_(words), data_(std::move(data)) {
    if (words_ == 0 || data_.size() % words_ != 0) {
        throw std::invalid_argument("sketch data is not a whole number of sketches");
    }
}

void SketchSet::append(const SketchSet& other) {
    if (other.size() == 0) {
        return;
    }
    if (size() == 0) {
        *this = other;
        return;
    }
    if (other.words_ != words_) {
        throw std::invalid_argument("cannot append sketches of a different length");
    }
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
    }
    return d;
}

double estimate_similarity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("sketch length mismatch");
    }
    const double m = static_cast<double>(a.size() * 64);
    const double p = (m - static_cast<double>(hamming_distance(a, b))) / m;
    return std::max(0.0, 2.0 * p - 1.0);
}

double binomial_cdf_below(std::size_t n, double p, std::size_t c) {
    if (c == 0) {
        return 0.0;
    }
    if (c > n) {
        return 1.0;
    }
    if (p <= 0.0) {
        return 1.0;
    }
    if (p >= 1.0) {
        return 0.0;
    }
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    // Sum from the largest term down for accuracy.
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(c);
    for (std::size_t j = 0; j < c; ++j) {
        const double jd = static_cast<double>(j);
        logs[j] = log_n_fact - std::lgamma(jd + 1.0) - std::lgamma(static_cast<double>(n - j) + 1.0) + jd * log_p +
                  static_cast<double>(n - j) * log_q;
        max_log = std::max(max_log, logs[j]);
    }
    double sum = 0.0;
    for (const double l : logs) {
        sum += std::exp(l - max_log);
    }
    return std::min(1.0, sum * std::exp(max_log));
}

SketchThreshold calibrate_sketch_threshold(double lambda, double delta, std::size_t bits) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (bits == 0 || bits % 64 != 0) {
        throw std::invalid_argument("sketch bit count must be a positive multiple of 64");
    }
    const double p = (1.0 + lambda) / 2.0;
    // P[X < c] is non-decreasing in c; find the largest c that stays below δ.
    std::size_t lo = 0, hi = bits;
    while (lo < hi) {
        const auto mid = lo + (hi - lo + 1) / 2;
        if (binomial_cdf_below(bits, p, mid) < delta) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const std::size_t c = lo;
    SketchThreshold out;
    out.bits = bits;
    out.lambda_hat = 2.0 * static_cast<double>(c) / static_cast<double>(bits) - 1.0;
    // The estimator is clamped at 0, so a non-positive λ̂ lets everything through.
    out.min_matches = 2 * c <= bits ? 0 : c;
    return out;
}

}  // namespace cpsj
