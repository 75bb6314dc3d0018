#include "cpsj/cpsjoin.hpp"

#include "cpsj/random.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>
#include <unordered_map>

namespace cpsj {

namespace {

constexpr std::uint64_t kStreamEmbedding = 20;
constexpr std::uint64_t kStreamSketch = 21;
constexpr std::uint64_t kStreamTree = 10;
constexpr std::uint64_t kStreamChild = 30;
constexpr std::uint64_t kStreamNodeSketch = 31;
constexpr std::uint64_t kStreamPositions = 32;
constexpr std::uint64_t kStreamNodeHash = 33;

using CountTable = std::unordered_map<TokenId, std::uint32_t>;

std::span<const TokenId> node_tokens(const Dataset& ds, const PreparedInput& input, RecordId x) {
    return input.has_embedding ? input.embedded.sorted_tokens(x) : ds.records[x].view();
}

CountTable count_tokens(const Dataset& ds, const PreparedInput& input, std::span<const RecordId> members) {
    CountTable count;
    for (const auto y : members) {
        for (const auto j : node_tokens(ds, input, y)) {
            ++count[j];
        }
    }
    return count;
}

double average_from_counts(std::span<const TokenId> x, const CountTable& count, std::size_t node_size) {
    if (node_size < 2) {
        return 0.0;
    }
    double shared = 0.0;
    for (const auto j : x) {
        shared += static_cast<double>(count.at(j) - 1);
    }
    return shared / static_cast<double>(x.size()) / static_cast<double>(node_size - 1);
}

}  // namespace

void CPSJoinParams::validate() const {
    Threshold check(lambda);
    if (limit < 1) {
        throw std::invalid_argument("limit must be at least 1");
    }
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    }
    if (sketch_words < 1) {
        throw std::invalid_argument("sketch must have at least one word");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (t < 1) {
        throw std::invalid_argument("t must be at least 1");
    }
    if (repetitions < 1) {
        throw std::invalid_argument("repetitions must be at least 1");
    }
}

PreparedInput prepare_input(const Dataset& ds, std::size_t t, std::size_t sketch_words, std::uint64_t seed,
                            bool embed) {
    PreparedInput input;
    if (embed) {
        input.embedded = embed_dataset(EmbeddingParams(t, derive_seed(seed, kStreamEmbedding)), ds);
        input.has_embedding = true;
    }
    input.sketches = SketchSet(SketchFamily(sketch_words, derive_seed(seed, kStreamSketch)), ds);
    return input;
}

std::vector<std::uint32_t> select_positions(std::uint64_t node_seed, std::size_t t, double lambda) {
    SplitMix64 rng(derive_seed(node_seed, kStreamPositions));
    const double p = 1.0 / (lambda * static_cast<double>(t));
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < t; ++i) {
        if (rng.uniform() < p) {
            out.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return out;
}

double node_hash_unit(std::uint64_t node_seed, TokenId j) {
    const auto h = mix64(derive_seed(node_seed, kStreamNodeHash) + j);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

CPSJoinTree::CPSJoinTree(const Dataset& ds, const PreparedInput& input, const CPSJoinParams& params,
                         std::span<const std::uint8_t> side)
    : ds_(ds), input_(input), params_(params), verifier_(ds, input.sketches, Threshold(params.lambda), params.delta, side) {
    if (input.has_embedding && input.embedded.size() != ds.size()) {
        throw std::invalid_argument("embedding does not cover the dataset");
    }
}

void CPSJoinTree::run(std::uint64_t tree_seed) {
    NodeState root;
    root.members.resize(ds_.size());
    for (std::size_t i = 0; i < ds_.size(); ++i) {
        root.members[i] = static_cast<RecordId>(i);
    }
    root.seed = tree_seed;
    recurse(std::move(root));
}

void CPSJoinTree::recurse(NodeState node) {
    counters_.max_depth = std::max(counters_.max_depth, node.depth);
    if (node.depth > params_.depth_cap) {
        ++counters_.depth_aborts;
        return;
    }
    live_members_ += node.members.size();
    counters_.peak_live_members = std::max(counters_.peak_live_members, live_members_);

    const auto entry_size = node.members.size();
    node.members = brute_force_step(node);
    live_members_ = live_members_ - entry_size + node.members.size();
    if (node.members.size() >= 2) {
        auto children = split_buckets(node, 2);
        for (const auto& c : children) {
            live_members_ += c.members.size();
        }
        counters_.peak_live_members = std::max(counters_.peak_live_members, live_members_);
        for (auto& child : children) {
            // Ownership of the bucket passes to the child call.
            live_members_ -= child.members.size();
            recurse(std::move(child));
        }
    }
    live_members_ -= node.members.size();
}

std::vector<RecordId> CPSJoinTree::brute_force_step(const NodeState& node) {
    const auto& members = node.members;
    if (members.size() <= params_.limit) {
        brute_force_pairs(members);
        return {};
    }
    const double cutoff = (1.0 - params_.epsilon) * params_.lambda;
    std::vector<char> flagged(members.size(), 0);
    if (params_.condition == BruteForceCondition::kNodeSketch) {
        const auto node_sk = node_sketch(members, node.seed);
        for (std::size_t i = 0; i < members.size(); ++i) {
            flagged[i] = estimate_similarity(input_.sketches[members[i]], node_sk.words) > cutoff;
        }
    } else {
        const auto count = count_tokens(ds_, input_, members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            flagged[i] = average_from_counts(node_tokens(ds_, input_, members[i]), count, members.size()) > cutoff;
        }
    }

    // Single pass: each flagged record is compared with everything not yet removed.
    std::vector<char> removed(members.size(), 0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!flagged[i]) {
            continue;
        }
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (j != i && !removed[j]) {
                verifier_.check(members[i], members[j], counters_, results_);
            }
        }
        removed[i] = 1;
    }
    std::vector<RecordId> survivors;
    survivors.reserve(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!removed[i]) {
            survivors.push_back(members[i]);
        }
    }
    return survivors;
}

std::vector<NodeState> CPSJoinTree::split_buckets(const NodeState& node, std::size_t min_size) const {
    std::vector<std::pair<TokenId, RecordId>> keyed;
    if (input_.has_embedding) {
        const auto positions = select_positions(node.seed, input_.embedded.t(), params_.lambda);
        keyed.reserve(positions.size() * node.members.size());
        for (const auto i : positions) {
            for (const auto x : node.members) {
                keyed.emplace_back(input_.embedded.token(x, i), x);
            }
        }
    } else {
        const auto base = derive_seed(node.seed, kStreamNodeHash);
        for (const auto x : node.members) {
            const auto tokens = ds_.records[x].view();
            const double p = 1.0 / (params_.lambda * static_cast<double>(tokens.size()));
            for (const auto j : tokens) {
                if (static_cast<double>(mix64(base + j) >> 11) * 0x1.0p-53 < p) {
                    keyed.emplace_back(j, x);
                }
            }
        }
    }
    std::sort(keyed.begin(), keyed.end());

    std::vector<NodeState> children;
    for (std::size_t lo = 0; lo < keyed.size();) {
        auto hi = lo;
        while (hi < keyed.size() && keyed[hi].first == keyed[lo].first) {
            ++hi;
        }
        if (hi - lo >= min_size) {
            NodeState child;
            child.depth = node.depth + 1;
            child.seed = derive_seed(node.seed, kStreamChild, keyed[lo].first);
            child.members.reserve(hi - lo);
            for (auto k = lo; k < hi; ++k) {
                child.members.push_back(keyed[k].second);
            }
            children.push_back(std::move(child));
        }
        lo = hi;
    }
    return children;
}

Sketch CPSJoinTree::node_sketch(std::span<const RecordId> members, std::uint64_t node_seed) const {
    if (members.empty()) {
        throw std::invalid_argument("node sketch of an empty node");
    }
    const auto words = input_.sketches.words();
    Sketch sk;
    sk.words.assign(words, 0);
    SplitMix64 rng(derive_seed(node_seed, kStreamNodeSketch));
    for (std::size_t i = 0; i < words * 64; ++i) {
        const auto y = members[rng.below(members.size())];
        const auto word = input_.sketches[y][i / 64];
        sk.words[i / 64] |= word & (std::uint64_t{1} << (i % 64));
    }
    return sk;
}

double CPSJoinTree::average_similarity_exact(RecordId x, std::span<const RecordId> members) const {
    const auto count = count_tokens(ds_, input_, members);
    return average_from_counts(node_tokens(ds_, input_, x), count, members.size());
}

void CPSJoinTree::brute_force_pairs(std::span<const RecordId> members) { verifier_.pairs(members, counters_, results_); }

void CPSJoinTree::brute_force_point(RecordId x, std::span<const RecordId> members) {
    verifier_.point(x, members, counters_, results_);
}

namespace {

JoinOutput run_repetitions(const Dataset& ds, const PreparedInput& input, const CPSJoinParams& params,
                           std::span<const std::uint8_t> side) {
    params.validate();
    if (input.has_embedding && input.embedded.t() != params.t) {
        throw std::invalid_argument("prepared embedding size differs from params.t");
    }
    if (input.sketches.words() != params.sketch_words && ds.size() > 0) {
        throw std::invalid_argument("prepared sketch length differs from params.sketch_words");
    }
    JoinOutput out;
    for (std::size_t rep = 0; rep < params.repetitions; ++rep) {
        CPSJoinTree tree(ds, input, params, side);
        tree.run(derive_seed(params.seed, kStreamTree, rep));
        out.counters += tree.counters();
        auto found = tree.take_results();
        out.pairs.insert(out.pairs.end(), found.begin(), found.end());
        out.pairs = dedup_pairs(std::move(out.pairs));
        out.repetitions = rep + 1;
        if (params.stop_when && params.stop_when(out.pairs)) {
            break;
        }
    }
    if (out.counters.depth_aborts > 0) {
        std::clog << "cpsjoin: " << out.counters.depth_aborts << " branch(es) aborted at depth cap "
                  << params.depth_cap << "\n";
    }
    return out;
}

}  // namespace

JoinOutput cpsjoin_self(const Dataset& ds, const PreparedInput& input, const CPSJoinParams& params) {
    return run_repetitions(ds, input, params, {});
}

JoinOutput cpsjoin_self(const Dataset& ds, const CPSJoinParams& params) {
    const auto input = prepare_input(ds, params.t, params.sketch_words, params.seed);
    return cpsjoin_self(ds, input, params);
}

CrossJoinOutput join_rs(const Dataset& r, const PreparedInput& r_input, const Dataset& s, const PreparedInput& s_input,
                        const CPSJoinParams& params) {
    if (r_input.has_embedding != s_input.has_embedding) {
        throw std::invalid_argument("both inputs must use the same preparation mode");
    }
    if (r_input.has_embedding && r.size() > 0 && s.size() > 0 && r_input.embedded.t() != s_input.embedded.t()) {
        throw std::invalid_argument("embedding sizes differ");
    }

    std::vector<std::vector<TokenId>> lists;
    lists.reserve(r.size() + s.size());
    for (const auto& rec : r.records) {
        lists.push_back(rec.tokens);
    }
    for (const auto& rec : s.records) {
        lists.push_back(rec.tokens);
    }
    const auto joined = Dataset::from_sorted_lists(std::move(lists), std::max(r.universe, s.universe));

    PreparedInput input;
    input.has_embedding = r_input.has_embedding;
    if (input.has_embedding) {
        input.embedded = EmbeddedDataset::concat(r_input.embedded, s_input.embedded);
    }
    input.sketches = r_input.sketches;
    input.sketches.append(s_input.sketches);

    std::vector<std::uint8_t> side(r.size(), 0);
    side.resize(r.size() + s.size(), 1);

    CrossJoinOutput out;
    if (joined.empty()) {
        return out;
    }
    const auto self = run_repetitions(joined, input, params, side);
    out.counters = self.counters;
    const auto offset = static_cast<RecordId>(r.size());
    for (const auto& p : self.pairs) {
        out.pairs.push_back(CrossPair{p.a, p.b - offset, p.similarity});
    }
    return out;
}

}  // namespace cpsj
