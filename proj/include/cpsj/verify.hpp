#pragma once

#include "cpsj/core.hpp"
#include "cpsj/hashing.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cpsj {

/// Verification pipeline shared by the randomized joins: size filter,
/// 1-bit sketch filter at a calibrated λ̂, then exact Jaccard.
///
/// When `side` is non-empty only pairs with different tags are looked at
/// (R×S joins run as a tagged self-join).
class PairVerifier {
public:
    PairVerifier(const Dataset& ds, const SketchSet& sketches, Threshold lambda, double delta,
                 std::span<const std::uint8_t> side = {});

    /// Every unordered pair of `members`.
    void pairs(std::span<const RecordId> members, Counters& counters, std::vector<ResultPair>& out) const;

    /// Pairs (x, y) for y in members, y != x.
    void point(RecordId x, std::span<const RecordId> members, Counters& counters, std::vector<ResultPair>& out) const;

    void check(RecordId x, RecordId y, Counters& counters, std::vector<ResultPair>& out) const;

    const SketchThreshold& sketch_threshold() const { return threshold_; }
    Threshold lambda() const { return lambda_; }
    const Dataset& dataset() const { return ds_; }
    const SketchSet& sketches() const { return sketches_; }

private:
    const Dataset& ds_;
    const SketchSet& sketches_;
    Threshold lambda_;
    SketchThreshold threshold_;
    std::span<const std::uint8_t> side_;
};

}  // namespace cpsj
