#include "cpsj/allpairs.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace cpsj {
namespace {

TEST(FrequencyOrder, AscendingFrequencyTiesById) {
    // Token 0 in three sets, 1 in two, 2 and 3 in one.
    const auto ds = Dataset::from_sorted_lists({{0, 1, 2}, {0, 1}, {0, 3}}, 4);
    const auto order = frequency_order(ds);
    EXPECT_EQ(order.by_rank, (std::vector<TokenId>{2, 3, 1, 0}));
    EXPECT_EQ(order.rank, (std::vector<std::uint32_t>{3, 2, 0, 1}));
}

TEST(FrequencyOrder, SingleTokenUniverse) {
    const auto ds = Dataset::from_sorted_lists({}, 1);
    EXPECT_EQ(frequency_order(ds).by_rank, (std::vector<TokenId>{0}));
}

TEST(PrefixLength, Examples) {
    EXPECT_EQ(prefix_length(10, 0.5), 6u);
    EXPECT_EQ(prefix_length(2, 0.5), 2u);
    EXPECT_EQ(prefix_length(10, 0.999999), 1u);
    EXPECT_EQ(prefix_length(10, 0.7), 4u);
    EXPECT_THROW(prefix_length(0, 0.5), std::invalid_argument);
    for (std::size_t s = 1; s < 200; ++s) {
        EXPECT_LE(prefix_length(s, 0.8), prefix_length(s, 0.5));
        EXPECT_GE(prefix_length(s, 0.5), 1u);
        EXPECT_LE(prefix_length(s, 0.5), s);
    }
}

TEST(AllPairs, SmallExample) {
    // J({1..8}, {3..10}) = 6/10.
    const auto ds = Dataset::from_sorted_lists({{1, 2, 3, 4, 5, 6, 7, 8}, {3, 4, 5, 6, 7, 8, 9, 10}}, 11);
    EXPECT_EQ(allpairs_join(ds, 0.6).pairs.size(), 1u);
    EXPECT_TRUE(allpairs_join(ds, 0.61).pairs.empty());
    EXPECT_DOUBLE_EQ(allpairs_join(ds, 0.5).pairs.at(0).similarity, 0.6);
}

TEST(AllPairs, EqualsNaiveOnRandomData) {
    std::mt19937_64 rng(81);
    for (int round = 0; round < 12; ++round) {
        const auto ds = testing::clustered_dataset(rng, 50 + rng() % 400, 20 + static_cast<std::uint32_t>(rng() % 300));
        for (const double lambda : {0.3, 0.5, 0.7, 0.9}) {
            const auto out = allpairs_join(ds, lambda);
            EXPECT_EQ(testing::as_set(out.pairs), testing::as_set(naive_join(ds, lambda))) << round << " " << lambda;
            EXPECT_LE(out.counters.results, out.counters.candidates);
            EXPECT_LE(out.counters.candidates, out.counters.pre_candidates);
            EXPECT_EQ(out.counters.results, out.pairs.size());
        }
    }
}

TEST(AllPairs, PrefixesOfTruePairsIntersect) {
    std::mt19937_64 rng(82);
    const auto ds = testing::clustered_dataset(rng, 300, 60);
    const auto order = frequency_order(ds);
    const double lambda = 0.5;
    auto prefix = [&](RecordId r) {
        std::vector<std::uint32_t> ranks;
        for (const auto tk : ds.records[r].tokens) {
            ranks.push_back(order.rank[tk]);
        }
        std::sort(ranks.begin(), ranks.end());
        ranks.resize(prefix_length(ranks.size(), lambda));
        return ranks;
    };
    for (const auto& p : naive_join(ds, lambda)) {
        const auto a = prefix(p.a), b = prefix(p.b);
        std::vector<std::uint32_t> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        EXPECT_FALSE(common.empty()) << p.a << "," << p.b;
    }
}

TEST(NaiveJoin, AllPairsHaveExactSimilarity) {
    const auto ds = Dataset::from_sorted_lists({{0, 1}, {0, 1, 2}, {0, 1, 2, 3}, {5, 6}}, 7);
    const auto out = naive_join(ds, 0.5);
    ASSERT_EQ(out.size(), 3u);
    for (const auto& p : out) {
        EXPECT_EQ(p.similarity, jaccard(ds.records[p.a].view(), ds.records[p.b].view()));
    }
}

}  // namespace
}  // namespace cpsj
