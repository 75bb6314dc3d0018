#include "cpsj/minhash_join.hpp"

#include "cpsj/random.hpp"
#include "cpsj/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpsj {

namespace {

constexpr std::uint64_t kStreamRepetition = 40;
constexpr std::uint64_t kStreamChooseK = 41;
constexpr std::uint64_t kStreamFunction = 42;

// Sorted (key, record) pairs; equal keys form one bucket.
std::vector<std::pair<std::uint64_t, RecordId>> bucketize(const std::vector<std::uint64_t>& keys) {
    std::vector<std::pair<std::uint64_t, RecordId>> keyed(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        keyed[i] = {keys[i], static_cast<RecordId>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    return keyed;
}

}  // namespace

std::vector<std::uint64_t> bucket_keys(const Dataset& ds, const PreparedInput& input, std::size_t k,
                                       std::uint64_t rep_seed) {
    if (k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    std::vector<std::uint64_t> keys(ds.size(), 0x243f6a8885a308d3ULL);
    if (input.has_embedding) {
        const auto t = input.embedded.t();
        SplitMix64 rng(rep_seed);
        for (std::size_t f = 0; f < k; ++f) {
            const auto pos = rng.below(t);
            for (std::size_t r = 0; r < ds.size(); ++r) {
                keys[r] = mix64(keys[r] ^ input.embedded.value(r, pos)) + f;
            }
        }
    } else {
        for (std::size_t f = 0; f < k; ++f) {
            const MinHashFunction fn(derive_seed(rep_seed, kStreamFunction, f));
            for (std::size_t r = 0; r < ds.size(); ++r) {
                keys[r] = mix64(keys[r] ^ fn(ds.records[r].view())) + f;
            }
        }
    }
    return keys;
}

double split_cost(const Dataset& ds, const PreparedInput& input, std::size_t k, std::uint64_t seed,
                  const SplitCostModel& model) {
    const auto keyed = bucketize(bucket_keys(ds, input, k, seed));
    double pairs = 0.0;
    for (std::size_t lo = 0; lo < keyed.size();) {
        auto hi = lo;
        while (hi < keyed.size() && keyed[hi].first == keyed[lo].first) {
            ++hi;
        }
        const double b = static_cast<double>(hi - lo);
        pairs += b * (b - 1.0) / 2.0;
        lo = hi;
    }
    return pairs * model.per_estimate + static_cast<double>(ds.size() * k) * model.per_hash;
}

std::size_t choose_k(const Dataset& ds, const PreparedInput& input, std::uint64_t seed, const SplitCostModel& model) {
    std::size_t best_k = kMinAutoK;
    double best_cost = 0.0;
    for (std::size_t k = kMinAutoK; k <= kMaxAutoK; ++k) {
        const double cost = split_cost(ds, input, k, derive_seed(seed, kStreamChooseK, k), model);
        if (k == kMinAutoK || cost < best_cost) {
            best_cost = cost;
            best_k = k;
        }
    }
    return best_k;
}

std::size_t repetitions_for_recall(double lambda, std::size_t k, double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw std::invalid_argument("phi must lie in (0, 1)");
    }
    const double reps = std::ceil(std::log(1.0 / (1.0 - phi)) / std::pow(lambda, static_cast<double>(k)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(reps));
}

MinHashJoinOutput minhash_join(const Dataset& ds, const PreparedInput& input, const MinHashJoinParams& params) {
    const Threshold lambda(params.lambda);
    MinHashJoinOutput out;
    out.k = params.k.value_or(0);
    if (ds.size() < 2) {
        return out;
    }
    if (!params.k) {
        out.k = choose_k(ds, input, params.seed, params.cost);
    }
    const auto reps = params.repetitions.value_or(repetitions_for_recall(params.lambda, out.k, params.phi));
    if (reps < 1) {
        throw std::invalid_argument("repetitions must be at least 1");
    }

    const PairVerifier verifier(ds, input.sketches, lambda, params.delta);
    std::vector<RecordId> bucket;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto keyed = bucketize(bucket_keys(ds, input, out.k, derive_seed(params.seed, kStreamRepetition, rep)));
        std::vector<ResultPair> found;
        for (std::size_t lo = 0; lo < keyed.size();) {
            auto hi = lo;
            while (hi < keyed.size() && keyed[hi].first == keyed[lo].first) {
                ++hi;
            }
            if (hi - lo >= 2) {
                bucket.clear();
                for (auto i = lo; i < hi; ++i) {
                    bucket.push_back(keyed[i].second);
                }
                verifier.pairs(bucket, out.counters, found);
            }
            lo = hi;
        }
        out.pairs.insert(out.pairs.end(), found.begin(), found.end());
        out.pairs = dedup_pairs(std::move(out.pairs));
        out.repetitions = rep + 1;
        if (params.stop_when && params.stop_when(out.pairs)) {
            break;
        }
    }
    return out;
}

}  // namespace cpsj
