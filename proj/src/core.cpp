#include "cpsj/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cpsj {

Dataset Dataset::from_sorted_lists(std::vector<std::vector<TokenId>> lists, std::uint32_t universe) {
    Dataset ds;
    ds.universe = universe;
    ds.token_frequency.assign(universe, 0);
    ds.records.reserve(lists.size());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        auto& tokens = lists[i];
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            if (tokens[k] >= universe) {
                throw std::invalid_argument("token " + std::to_string(tokens[k]) + " outside universe");
            }
            if (k > 0 && tokens[k - 1] >= tokens[k]) {
                throw std::invalid_argument("record " + std::to_string(i) + " is not strictly increasing");
            }
            ++ds.token_frequency[tokens[k]];
        }
        ds.records.push_back(Record{static_cast<RecordId>(i), std::move(tokens)});
    }
    return ds;
}

Threshold::Threshold(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1), got " + std::to_string(lambda));
    }
}

ResultPair make_pair(RecordId x, RecordId y, double similarity) {
    if (x == y) {
        throw std::invalid_argument("self pair");
    }
    return x < y ? ResultPair{x, y, similarity} : ResultPair{y, x, similarity};
}

Counters& Counters::operator+=(const Counters& o) {
    pre_candidates += o.pre_candidates;
    candidates += o.candidates;
    results += o.results;
    max_depth = std::max(max_depth, o.max_depth);
    peak_live_members = std::max(peak_live_members, o.peak_live_members);
    depth_aborts += o.depth_aborts;
    return *this;
}

std::size_t intersection_size(std::span<const TokenId> x, std::span<const TokenId> y) {
    std::size_t i = 0, j = 0, common = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i] == y[j]) {
            ++common;
            ++i;
            ++j;
        } else if (x[i] < y[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return common;
}

double jaccard(std::span<const TokenId> x, std::span<const TokenId> y) {
    if (x.empty() && y.empty()) {
        throw std::invalid_argument("jaccard of two empty sets is undefined");
    }
    const auto common = intersection_size(x, y);
    return static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
}

double braun_blanquet(std::span<const TokenId> x, std::span<const TokenId> y, std::size_t t) {
    if (t == 0 || x.size() != t || y.size() != t) {
        throw std::invalid_argument("braun_blanquet expects two sets of size t");
    }
    return static_cast<double>(intersection_size(x, y)) / static_cast<double>(t);
}

bool passes_size_filter(std::size_t x_size, std::size_t y_size, Threshold lambda) {
    const double l = lambda.value();
    const auto lo = std::min(x_size, y_size);
    const auto hi = std::max(x_size, y_size);
    return static_cast<double>(lo) >= l * static_cast<double>(hi);
}

std::optional<double> verify_pair(std::span<const TokenId> x, std::span<const TokenId> y, Threshold lambda) {
    if (x.empty() && y.empty()) {
        return std::nullopt;
    }
    // J >= λ  <=>  |x∩y| >= λ/(1+λ) · (|x|+|y|)
    const double l = lambda.value();
    const auto total = x.size() + y.size();
    const auto required = static_cast<std::size_t>(std::ceil(l / (1.0 + l) * static_cast<double>(total) - 1e-9));

    std::size_t i = 0, j = 0, common = 0;
    while (i < x.size() && j < y.size()) {
        if (common + std::min(x.size() - i, y.size() - j) < required) {
            return std::nullopt;
        }
        if (x[i] == y[j]) {
            ++common;
            ++i;
            ++j;
        } else if (x[i] < y[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const double sim = static_cast<double>(common) / static_cast<double>(total - common);
    if (sim >= l) {
        return sim;
    }
    return std::nullopt;
}

std::vector<ResultPair> dedup_pairs(std::vector<ResultPair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const ResultPair& p, const ResultPair& q) {
        return p.a != q.a ? p.a < q.a : p.b < q.b;
    });
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

}  // namespace cpsj
