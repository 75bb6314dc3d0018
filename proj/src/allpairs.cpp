#include "cpsj/allpairs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cpsj {

FrequencyOrder frequency_order(const Dataset& ds) {
    FrequencyOrder order;
    order.by_rank.resize(ds.universe);
    std::iota(order.by_rank.begin(), order.by_rank.end(), TokenId{0});
    std::stable_sort(order.by_rank.begin(), order.by_rank.end(), [&](TokenId a, TokenId b) {
        return ds.token_frequency[a] < ds.token_frequency[b];
    });
    order.rank.resize(ds.universe);
    for (std::uint32_t r = 0; r < ds.universe; ++r) {
        order.rank[order.by_rank[r]] = r;
    }
    return order;
}

std::size_t prefix_length(std::size_t size, double lambda) {
    if (size == 0) {
        throw std::invalid_argument("prefix of an empty record");
    }
    // Rounding λ|x| down by a hair only lengthens the prefix.
    const auto required = static_cast<std::size_t>(std::ceil(lambda * static_cast<double>(size) - 1e-9));
    return size - std::min(size, std::max<std::size_t>(required, 1)) + 1;
}

JoinOutput allpairs_join(const Dataset& ds, double lambda_value) {
    const Threshold lambda(lambda_value);
    JoinOutput out;
    const auto n = ds.size();
    if (n < 2) {
        return out;
    }

    const auto order = frequency_order(ds);
    // Records processed by ascending size; tokens rewritten to their ranks.
    std::vector<RecordId> by_size(n);
    std::iota(by_size.begin(), by_size.end(), RecordId{0});
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](RecordId a, RecordId b) { return ds.records[a].size() < ds.records[b].size(); });
    std::vector<std::vector<TokenId>> ranked(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& rec = ds.records[by_size[p]];
        auto& tokens = ranked[p];
        tokens.reserve(rec.size());
        for (const auto j : rec.tokens) {
            tokens.push_back(order.rank[j]);
        }
        std::sort(tokens.begin(), tokens.end());
    }

    // postings[token] lists processing positions, hence ascending size.
    std::vector<std::vector<std::uint32_t>> postings(ds.universe);
    std::vector<std::size_t> start(ds.universe, 0);
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> touched;

    for (std::size_t p = 0; p < n; ++p) {
        const auto& x = ranked[p];
        const auto prefix = prefix_length(x.size(), lambda.value());
        const double min_size = lambda.value() * static_cast<double>(x.size());
        touched.clear();
        for (std::size_t k = 0; k < prefix; ++k) {
            const auto token = x[k];
            auto& list = postings[token];
            auto& s = start[token];
            while (s < list.size() && static_cast<double>(ranked[list[s]].size()) < min_size) {
                ++s;
            }
            for (auto q = s; q < list.size(); ++q) {
                ++out.counters.pre_candidates;
                const auto y = list[q];
                if (!seen[y]) {
                    seen[y] = 1;
                    touched.push_back(y);
                }
            }
        }
        for (const auto y : touched) {
            seen[y] = 0;
            ++out.counters.candidates;
            if (const auto sim = verify_pair(x, ranked[y], lambda)) {
                ++out.counters.results;
                out.pairs.push_back(make_pair(by_size[p], by_size[y], *sim));
            }
        }
        for (std::size_t k = 0; k < prefix; ++k) {
            postings[x[k]].push_back(static_cast<std::uint32_t>(p));
        }
    }
    out.pairs = dedup_pairs(std::move(out.pairs));
    out.repetitions = 1;
    return out;
}

std::vector<ResultPair> naive_join(const Dataset& ds, double lambda_value) {
    const Threshold lambda(lambda_value);
    std::vector<ResultPair> out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
            if (const auto sim = verify_pair(ds.records[i].view(), ds.records[j].view(), lambda)) {
                out.push_back(ResultPair{static_cast<RecordId>(i), static_cast<RecordId>(j), *sim});
            }
        }
    }
    return out;
}

}  // namespace cpsj
