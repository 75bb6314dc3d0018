#include "cpsj/verify.hpp"

#include <stdexcept>

namespace cpsj {

PairVerifier::PairVerifier(const Dataset& ds, const SketchSet& sketches, Threshold lambda, double delta,
                           std::span<const std::uint8_t> side)
    : ds_(ds),
      sketches_(sketches),
      lambda_(lambda),
      threshold_(calibrate_sketch_threshold(lambda.value(), delta, sketches.words() * 64)),
      side_(side) {
    if (sketches.size() != ds.size()) {
        throw std::invalid_argument("one sketch per record required");
    }
    if (!side.empty() && side.size() != ds.size()) {
        throw std::invalid_argument("side tags must cover every record");
    }
}

void PairVerifier::check(RecordId x, RecordId y, Counters& counters, std::vector<ResultPair>& out) const {
    if (!side_.empty() && side_[x] == side_[y]) {
        return;
    }
    ++counters.pre_candidates;
    const auto& rx = ds_.records[x];
    const auto& ry = ds_.records[y];
    if (!passes_size_filter(rx.size(), ry.size(), lambda_)) {
        return;
    }
    if (!threshold_.passes(hamming_distance(sketches_[x], sketches_[y]))) {
        return;
    }
    ++counters.candidates;
    if (const auto sim = verify_pair(rx.view(), ry.view(), lambda_)) {
        ++counters.results;
        out.push_back(make_pair(x, y, *sim));
    }
}

void PairVerifier::pairs(std::span<const RecordId> members, Counters& counters, std::vector<ResultPair>& out) const {
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            check(members[i], members[j], counters, out);
        }
    }
}

void PairVerifier::point(RecordId x, std::span<const RecordId> members, Counters& counters,
                         std::vector<ResultPair>& out) const {
    for (const auto y : members) {
        if (y != x) {
            check(x, y, counters, out);
        }
    }
}

}  // namespace cpsj
