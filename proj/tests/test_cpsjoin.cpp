#include "cpsj/cpsjoin.hpp"

#include "cpsj/allpairs.hpp"
#include "cpsj/metrics.hpp"
#include "cpsj/random.hpp"
#include "cpsj/tokens_gen.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace cpsj {
namespace {

using testing::as_set;

void expect_exact_precision(const Dataset& ds, const std::vector<ResultPair>& pairs, double lambda) {
    for (const auto& p : pairs) {
        ASSERT_LT(p.a, p.b);
        const double j = jaccard(ds.records[p.a].view(), ds.records[p.b].view());
        ASSERT_GE(j, lambda) << p.a << "," << p.b;
        ASSERT_EQ(j, p.similarity);
    }
}

void expect_monotone(const Counters& c) {
    EXPECT_LE(c.results, c.candidates);
    EXPECT_LE(c.candidates, c.pre_candidates);
}

std::vector<RecordId> iota_ids(std::size_t n) {
    std::vector<RecordId> ids(n);
    std::iota(ids.begin(), ids.end(), RecordId{0});
    return ids;
}

/// Base record of 20 tokens plus `n - 1` distinct one-token substitutions of it.
Dataset near_copies(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto base = testing::random_set(rng, 1000, 20);
    std::set<std::vector<TokenId>> seen{base};
    std::vector<std::vector<TokenId>> lists{base};
    while (lists.size() < n) {
        auto v = base;
        v[rng() % v.size()] = static_cast<TokenId>(rng() % 1000);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.size() == 20 && seen.insert(v).second) {
            lists.push_back(v);
        }
    }
    return Dataset::from_sorted_lists(std::move(lists), 1000);
}

TEST(CPSJoinParams, Validation) {
    CPSJoinParams p;
    EXPECT_NO_THROW(p.validate());
    p.limit = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.epsilon = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.lambda = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    EXPECT_EQ(p.limit, 250u);
    EXPECT_EQ(p.sketch_words, 8u);
    EXPECT_EQ(p.t, 128u);
    EXPECT_DOUBLE_EQ(p.epsilon, 0.1);
    EXPECT_DOUBLE_EQ(p.delta, 0.05);
    EXPECT_EQ(p.repetitions, 10u);
}

TEST(CPSJoin, SmallDatasetEqualsNaiveJoin) {
    std::mt19937_64 rng(61);
    const auto ds = testing::clustered_dataset(rng, 200, 80);
    for (const double lambda : {0.5, 0.7, 0.9}) {
        CPSJoinParams p;
        p.lambda = lambda;
        p.delta = 1e-9;  // sketch filter effectively off
        p.repetitions = 1;
        const auto out = cpsjoin_self(ds, p);
        EXPECT_EQ(as_set(out.pairs), as_set(naive_join(ds, lambda))) << lambda;
        EXPECT_EQ(out.counters.pre_candidates, 200u * 199u / 2u);
        EXPECT_EQ(out.counters.max_depth, 0u);
    }
}

TEST(CPSJoin, NoSimilarPairsGivesEmptyOutput) {
    std::vector<std::vector<TokenId>> lists;
    for (TokenId i = 0; i < 600; ++i) {
        lists.push_back({3 * i, 3 * i + 1, 3 * i + 2});
    }
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 1800);
    CPSJoinParams p;
    p.lambda = 0.5;
    const auto out = cpsjoin_self(ds, p);
    EXPECT_TRUE(out.pairs.empty());
    expect_monotone(out.counters);
}

TEST(CPSJoin, RecallPrecisionAndDeterminismOnTokensData) {
    auto spec = tokens_mini_spec(5);
    spec.n_background = 900;
    spec.planted = {{0.55, 8}, {0.75, 8}, {0.95, 8}};
    const auto gen = generate_tokens(spec);
    const auto& ds = gen.dataset;
    const auto input = prepare_input(ds, 128, 8, 17);
    for (const double lambda : {0.5, 0.7, 0.9}) {
        CPSJoinParams p;
        p.lambda = lambda;
        p.seed = 17;
        const auto out = cpsjoin_self(ds, input, p);
        expect_exact_precision(ds, out.pairs, lambda);
        expect_monotone(out.counters);
        EXPECT_GE(measure_recall(out.pairs, naive_join(ds, lambda)), 0.9) << lambda;

        const auto again = cpsjoin_self(ds, input, p);
        EXPECT_EQ(as_set(again.pairs), as_set(out.pairs));
        EXPECT_EQ(again.counters, out.counters);

        // Depth and working-space proxies.
        const double n = static_cast<double>(ds.size());
        EXPECT_LE(out.counters.max_depth, 12.0 * std::log(n) / std::max(p.epsilon, 0.05));
        EXPECT_LE(static_cast<double>(out.counters.peak_live_members), 16.0 * n * std::log(n));
    }
}

TEST(CPSJoin, StopWhenEndsRepetitionsEarly) {
    auto spec = tokens_mini_spec(6);
    spec.n_background = 600;
    spec.planted = {{0.85, 10}};
    const auto ds = generate_tokens(spec).dataset;
    const auto oracle = naive_join(ds, 0.8);
    CPSJoinParams p;
    p.lambda = 0.8;
    p.repetitions = 50;
    p.stop_when = [&](const std::vector<ResultPair>& so_far) { return measure_recall(so_far, oracle) >= 0.9; };
    const auto out = cpsjoin_self(ds, p);
    EXPECT_LT(out.repetitions, 50u);
    EXPECT_GE(measure_recall(out.pairs, oracle), 0.9);
}

TEST(CPSJoin, ExactCountConditionAndRawSplitAreValidJoins) {
    std::mt19937_64 rng(62);
    const auto ds = testing::clustered_dataset(rng, 1500, 300);
    const auto oracle = naive_join(ds, 0.6);
    ASSERT_FALSE(oracle.empty());
    for (const bool embed : {true, false}) {
        for (const auto condition : {BruteForceCondition::kNodeSketch, BruteForceCondition::kExactCount}) {
            CPSJoinParams p;
            p.lambda = 0.6;
            p.limit = 50;
            p.condition = condition;
            const auto input = prepare_input(ds, p.t, p.sketch_words, p.seed, embed);
            const auto out = cpsjoin_self(ds, input, p);
            expect_exact_precision(ds, out.pairs, 0.6);
            expect_monotone(out.counters);
            EXPECT_GE(measure_recall(out.pairs, oracle), 0.85) << "embed=" << embed;
        }
    }
}

TEST(CPSJoin, DepthCapAbortsBranches) {
    const auto ds = near_copies(400, 63);
    CPSJoinParams p;
    p.lambda = 0.5;
    p.limit = 10;
    p.epsilon = 0.0;
    p.condition = BruteForceCondition::kExactCount;
    p.depth_cap = 0;
    p.repetitions = 1;
    // Make brute forcing impossible so every root survivor goes to depth 1.
    p.lambda = 0.99;
    const auto out = cpsjoin_self(ds, p);
    EXPECT_GT(out.counters.depth_aborts, 0u);
    expect_exact_precision(ds, out.pairs, 0.99);
}

class TreeFixture : public ::testing::Test {
protected:
    void SetUp() override {
        std::mt19937_64 rng(64);
        std::vector<std::vector<TokenId>> lists;
        std::set<std::vector<TokenId>> seen;
        while (lists.size() < 300) {
            auto v = testing::random_set(rng, 60, 20);
            if (seen.insert(v).second) {
                lists.push_back(v);
            }
        }
        ds = Dataset::from_sorted_lists(std::move(lists), 60);
        input = prepare_input(ds, 128, 8, 3);
        params.lambda = 0.5;
        params.delta = 1e-9;
    }

    Dataset ds;
    PreparedInput input;
    CPSJoinParams params;
};

TEST_F(TreeFixture, BruteForcePairsAtLimit) {
    params.limit = 300;
    CPSJoinTree tree(ds, input, params);
    NodeState node{iota_ids(300), 0, 1};
    EXPECT_TRUE(tree.brute_force_step(node).empty());
    EXPECT_EQ(tree.counters().pre_candidates, 300u * 299u / 2u);
    EXPECT_EQ(as_set(dedup_pairs(tree.results())), as_set(naive_join(ds, 0.5)));
}

TEST_F(TreeFixture, SketchEstimateTracksExactAverage) {
    CPSJoinTree tree(ds, input, params);
    std::vector<std::vector<TokenId>> embedded;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto s = input.embedded.sorted_tokens(r);
        embedded.emplace_back(s.begin(), s.end());
    }
    const auto members = iota_ids(ds.size());
    int close = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const auto x = static_cast<RecordId>(trial % ds.size());
        const auto node_sk = tree.node_sketch(members, derive_seed(5, 5, static_cast<std::uint64_t>(trial)));
        const double estimate = estimate_similarity(input.sketches[x], node_sk.words);
        const double exact = testing::exact_average_similarity(embedded, x);
        EXPECT_NEAR(tree.average_similarity_exact(x, members), exact, 1e-12);
        close += std::abs(estimate - exact) <= 0.1;
    }
    EXPECT_GE(close, static_cast<int>(0.95 * trials));
}

TEST(CPSJoinTree, HighlySimilarRecordIsBruteForced) {
    const auto ds = near_copies(300, 65);
    const auto input = prepare_input(ds, 128, 8, 4);
    CPSJoinParams params;
    params.lambda = 0.5;
    params.limit = 250;
    CPSJoinTree tree(ds, input, params);
    NodeState node{iota_ids(300), 0, 9};

    std::vector<std::vector<TokenId>> embedded;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto s = input.embedded.sorted_tokens(r);
        embedded.emplace_back(s.begin(), s.end());
    }
    const double exact = testing::exact_average_similarity(embedded, 0);
    const auto node_sk = tree.node_sketch(node.members, node.seed);
    EXPECT_NEAR(estimate_similarity(input.sketches[0], node_sk.words), exact, 0.1);
    EXPECT_GT(exact, 0.45);

    const auto survivors = tree.brute_force_step(node);
    EXPECT_TRUE(std::find(survivors.begin(), survivors.end(), 0u) == survivors.end());
    EXPECT_GT(tree.counters().pre_candidates, 0u);
}

TEST(CPSJoinTree, IdenticalMembersAreAllRemoved) {
    std::vector<std::vector<TokenId>> lists(300, std::vector<TokenId>{1, 4, 9, 16});
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 20);
    const auto input = prepare_input(ds, 128, 8, 5);
    CPSJoinParams params;
    params.lambda = 0.5;
    CPSJoinTree tree(ds, input, params);
    NodeState node{iota_ids(300), 0, 2};
    EXPECT_TRUE(tree.brute_force_step(node).empty());
    EXPECT_EQ(tree.counters().results, 300u * 299u / 2u);

    CPSJoinTree whole(ds, input, params);
    whole.run(3);
    EXPECT_EQ(whole.counters().max_depth, 0u);
}

TEST(CPSJoinTree, NodeSketchOfUniformNode) {
    std::vector<std::vector<TokenId>> lists(5, std::vector<TokenId>{2, 3, 5, 7});
    lists.push_back({1, 8});
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 10);
    const auto input = prepare_input(ds, 16, 8, 6);
    CPSJoinParams params;
    params.t = 16;
    CPSJoinTree tree(ds, input, params);
    const std::vector<RecordId> same{0, 1, 2, 3, 4};
    const auto sk = tree.node_sketch(same, 11);
    EXPECT_TRUE(std::equal(sk.words.begin(), sk.words.end(), input.sketches[0].begin()));
    const std::vector<RecordId> single{5};
    const auto one = tree.node_sketch(single, 12);
    EXPECT_TRUE(std::equal(one.words.begin(), one.words.end(), input.sketches[5].begin()));
    EXPECT_THROW(tree.node_sketch({}, 1), std::invalid_argument);
}

TEST(CPSJoinTree, BruteForcePairsCounters) {
    std::vector<std::vector<TokenId>> lists{{1, 2, 3}, {1, 2, 3}};
    for (TokenId i = 0; i < 6; ++i) {
        lists.push_back({10 + 2 * i, 11 + 2 * i});
    }
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 30);
    const auto input = prepare_input(ds, 16, 8, 7);
    CPSJoinParams params;
    params.t = 16;
    {
        CPSJoinTree tree(ds, input, params);
        tree.brute_force_pairs(std::vector<RecordId>{0, 1});
        EXPECT_EQ(tree.counters().pre_candidates, 1u);
        EXPECT_EQ(tree.counters().candidates, 1u);
        EXPECT_EQ(tree.counters().results, 1u);
    }
    {
        CPSJoinTree tree(ds, input, params);
        const std::vector<RecordId> disjoint{2, 3, 4, 5, 6, 7};
        tree.brute_force_pairs(disjoint);
        EXPECT_EQ(tree.counters().pre_candidates, 15u);
        EXPECT_EQ(tree.counters().results, 0u);
    }
}

TEST_F(TreeFixture, BruteForcePointMatchesNaiveRestriction) {
    CPSJoinTree tree(ds, input, params);
    const auto members = iota_ids(ds.size());
    tree.brute_force_point(7, members);
    std::set<std::pair<RecordId, RecordId>> expected;
    for (const auto& p : naive_join(ds, 0.5)) {
        if (p.a == 7 || p.b == 7) {
            expected.insert({p.a, p.b});
        }
    }
    EXPECT_EQ(as_set(tree.results()), expected);
    EXPECT_EQ(tree.counters().pre_candidates, ds.size() - 1);

    CPSJoinTree alone(ds, input, params);
    alone.brute_force_point(7, std::vector<RecordId>{7});
    EXPECT_TRUE(alone.results().empty());
    EXPECT_EQ(alone.counters().pre_candidates, 0u);
}

TEST(CPSJoinTree, BruteForcePointAgainstCopies) {
    std::vector<std::vector<TokenId>> lists(6, std::vector<TokenId>{0, 1, 2, 3});
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 4);
    const auto input = prepare_input(ds, 16, 8, 8);
    CPSJoinParams params;
    params.t = 16;
    CPSJoinTree tree(ds, input, params);
    tree.brute_force_point(2, iota_ids(6));
    EXPECT_EQ(tree.results().size(), 5u);
}

TEST(SelectPositions, InclusionProbability) {
    // λ = 0.5, t = 128: each position with probability 1/64, two expected.
    const std::size_t t = 128;
    const int trials = 20000;
    std::vector<int> hits(t, 0);
    double total = 0;
    for (int s = 0; s < trials; ++s) {
        const auto pos = select_positions(derive_seed(1, 2, static_cast<std::uint64_t>(s)), t, 0.5);
        total += static_cast<double>(pos.size());
        for (const auto i : pos) {
            ++hits[i];
        }
    }
    const double p = 1.0 / 64.0;
    EXPECT_DOUBLE_EQ(p * t, 1.0 / 0.5);
    const double mean = total / trials;
    EXPECT_NEAR(mean, 2.0, 3.0 * std::sqrt(t * p * (1 - p) / trials));
    int within = 0;
    for (const int h : hits) {
        within += std::abs(h / static_cast<double>(trials) - p) <= 3.0 * std::sqrt(p * (1 - p) / trials);
    }
    EXPECT_GE(within, static_cast<int>(0.97 * t));

    double near_one = 0;
    for (int s = 0; s < trials; ++s) {
        near_one += static_cast<double>(select_positions(static_cast<std::uint64_t>(s), t, 0.999).size());
    }
    EXPECT_NEAR(near_one / trials, 1.0 / 0.999, 0.03);
}

TEST(SplitBuckets, EqualMinHashesShareEveryChild) {
    std::vector<std::vector<TokenId>> lists(2, std::vector<TokenId>{5, 6, 7});
    lists.push_back({1, 2});
    const auto ds = Dataset::from_sorted_lists(std::move(lists), 10);
    const auto input = prepare_input(ds, 32, 1, 9);
    CPSJoinParams params;
    params.t = 32;
    params.lambda = 0.5;
    CPSJoinTree tree(ds, input, params);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        NodeState node{{0, 1, 2}, 0, seed};
        for (const auto& child : tree.split_buckets(node)) {
            const bool has0 = std::count(child.members.begin(), child.members.end(), 0u) > 0;
            const bool has1 = std::count(child.members.begin(), child.members.end(), 1u) > 0;
            EXPECT_EQ(has0, has1);
            EXPECT_EQ(child.depth, 1u);
        }
    }
}

/// Depth-first search for a node at depth k holding both records.
bool survives(const CPSJoinTree& tree, const NodeState& node, std::uint32_t k) {
    if (node.depth == k) {
        return true;
    }
    for (const auto& child : tree.split_buckets(node, 2)) {
        if (survives(tree, child, k)) {
            return true;
        }
    }
    return false;
}

TEST(SplitBuckets, PairSurvivalLowerBound) {
    // Two embedded records sharing exactly λt positions (B = λ).
    const std::size_t t = 128;
    const double lambda = 0.5;
    std::vector<TokenId> values(2 * t);
    for (std::size_t i = 0; i < t; ++i) {
        values[i] = static_cast<TokenId>(i);
        values[t + i] = static_cast<TokenId>(i < t / 2 ? i : 1000 + i);
    }
    const auto ds = Dataset::from_sorted_lists({{0, 1}, {0, 2}}, 3);
    PreparedInput input;
    input.embedded = EmbeddedDataset(t, values, {0, 1});
    input.has_embedding = true;
    input.sketches = SketchSet(SketchFamily(1, 1), ds);
    CPSJoinParams params;
    params.lambda = lambda;
    params.sketch_words = 1;
    CPSJoinTree tree(ds, input, params);
    ASSERT_DOUBLE_EQ(braun_blanquet(input.embedded.sorted_tokens(0), input.embedded.sorted_tokens(1), t), lambda);

    const int trials = 2000;
    for (std::uint32_t k = 1; k <= 5; ++k) {
        int hits = 0;
        for (int s = 0; s < trials; ++s) {
            hits += survives(tree, NodeState{{0, 1}, 0, derive_seed(k, 77, static_cast<std::uint64_t>(s))}, k);
        }
        const double bound = 1.0 / (k + 1);
        const double rate = hits / static_cast<double>(trials);
        EXPECT_GE(rate, bound - 3.0 * std::sqrt(bound * (1 - bound) / trials)) << "k=" << k;
    }
}

TEST(JoinRS, CrossPairsOnly) {
    std::mt19937_64 rng(66);
    const auto all = testing::clustered_dataset(rng, 1200, 200);
    std::vector<std::vector<TokenId>> left, right;
    for (std::size_t i = 0; i < all.size(); ++i) {
        (i % 2 ? right : left).push_back(all.records[i].tokens);
    }
    const auto r = Dataset::from_sorted_lists(left, all.universe);
    const auto s = Dataset::from_sorted_lists(right, all.universe);
    CPSJoinParams p;
    p.lambda = 0.6;
    p.limit = 40;
    const auto ri = prepare_input(r, p.t, p.sketch_words, p.seed);
    const auto si = prepare_input(s, p.t, p.sketch_words, p.seed);
    const auto out = join_rs(r, ri, s, si, p);

    std::set<std::pair<RecordId, RecordId>> truth;
    for (RecordId a = 0; a < r.size(); ++a) {
        for (RecordId b = 0; b < s.size(); ++b) {
            if (jaccard(r.records[a].view(), s.records[b].view()) >= 0.6) {
                truth.insert({a, b});
            }
        }
    }
    ASSERT_FALSE(truth.empty());
    std::size_t hit = 0;
    for (const auto& cp : out.pairs) {
        ASSERT_TRUE(truth.count({cp.r, cp.s})) << cp.r << "," << cp.s;
        ++hit;
    }
    EXPECT_GE(hit, static_cast<std::size_t>(0.9 * truth.size()));
    expect_monotone(out.counters);
}

TEST(JoinRS, DisjointUniversesAndMismatchedT) {
    const auto r = Dataset::from_sorted_lists({{0, 1}, {1, 2}, {0, 2}}, 6);
    const auto s = Dataset::from_sorted_lists({{3, 4}, {4, 5}}, 6);
    CPSJoinParams p;
    const auto ri = prepare_input(r, p.t, p.sketch_words, p.seed);
    const auto si = prepare_input(s, p.t, p.sketch_words, p.seed);
    EXPECT_TRUE(join_rs(r, ri, s, si, p).pairs.empty());
    const auto si_small = prepare_input(s, 64, p.sketch_words, p.seed);
    EXPECT_THROW(join_rs(r, ri, s, si_small, p), std::invalid_argument);
}

}  // namespace
}  // namespace cpsj
