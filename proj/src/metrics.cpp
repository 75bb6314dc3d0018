#include "cpsj/metrics.hpp"

#include <unordered_set>

namespace cpsj {

namespace {
std::uint64_t key(const ResultPair& p) {
    const auto lo = std::min(p.a, p.b);
    const auto hi = std::max(p.a, p.b);
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
}
}  // namespace

double measure_recall(const std::vector<ResultPair>& output, const std::vector<ResultPair>& oracle) {
    if (oracle.empty()) {
        return 1.0;
    }
    std::unordered_set<std::uint64_t> found;
    found.reserve(output.size());
    for (const auto& p : output) {
        found.insert(key(p));
    }
    std::unordered_set<std::uint64_t> truth;
    truth.reserve(oracle.size());
    std::size_t hit = 0;
    for (const auto& p : oracle) {
        if (truth.insert(key(p)).second && found.count(key(p))) {
            ++hit;
        }
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace cpsj
