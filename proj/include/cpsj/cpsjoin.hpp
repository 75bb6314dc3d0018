#pragma once

#include "cpsj/core.hpp"
#include "cpsj/embed.hpp"
#include "cpsj/hashing.hpp"
#include "cpsj/verify.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cpsj {

/// How the brute-force step estimates a record's average similarity to its node.
enum class BruteForceCondition {
    /// O(ℓ) words per record against a sampled node sketch.
    kNodeSketch,
    /// Exact token-count table over the node.
    kExactCount,
};

struct CPSJoinParams {
    double lambda = 0.5;
    std::size_t limit = 250;
    double epsilon = 0.1;
    std::size_t sketch_words = 8;
    double delta = 0.05;
    std::size_t t = 128;
    std::size_t repetitions = 10;
    std::uint64_t seed = 0;
    BruteForceCondition condition = BruteForceCondition::kNodeSketch;
    std::uint32_t depth_cap = 64;

    /// Checked after each repetition with the deduplicated output so far;
    /// returning true stops early. Empty means run all repetitions.
    std::function<bool(const std::vector<ResultPair>&)> stop_when;

    void validate() const;  // throws std::invalid_argument
};

/// Preprocessed inputs of a join: sketches of the original records and,
/// unless the raw-token mode is requested, their fixed-size embedding.
/// Building it is the preprocessing step that join timings exclude.
struct PreparedInput {
    EmbeddedDataset embedded;
    SketchSet sketches;
    bool has_embedding = false;
};

PreparedInput prepare_input(const Dataset& ds, std::size_t t, std::size_t sketch_words, std::uint64_t seed,
                            bool embed = true);

struct JoinOutput {
    std::vector<ResultPair> pairs;  // deduplicated, sorted by (a, b)
    Counters counters;
    std::size_t repetitions = 0;
};

/// A node of the recursion tree: the records that survived along its path.
struct NodeState {
    std::vector<RecordId> members;
    std::uint32_t depth = 0;
    std::uint64_t seed = 0;
};

/// Positions of [t] chosen independently with probability 1/(λt).
std::vector<std::uint32_t> select_positions(std::uint64_t node_seed, std::size_t t, double lambda);

/// Per-node hash r: [d] → [0, 1) used by the raw-token split.
double node_hash_unit(std::uint64_t node_seed, TokenId j);

/// One recursion tree of the join. Emits (possibly duplicated) pairs into
/// `results()` and accumulates counters.
class CPSJoinTree {
public:
    CPSJoinTree(const Dataset& ds, const PreparedInput& input, const CPSJoinParams& params,
                std::span<const std::uint8_t> side = {});

    /// Runs the whole tree from a root holding every record.
    void run(std::uint64_t tree_seed);
    /// Runs from an arbitrary node.
    void recurse(NodeState node);

    /// Brute-forces what the node cannot profitably recurse on and returns
    /// the surviving members. Small nodes are joined pairwise and return empty.
    std::vector<RecordId> brute_force_step(const NodeState& node);

    /// Children of a node (members are assumed to be the survivors). Only
    /// buckets with at least `min_size` members are returned.
    std::vector<NodeState> split_buckets(const NodeState& node, std::size_t min_size = 1) const;

    /// Bit i is bit i of the sketch of the i-th member sampled with replacement.
    Sketch node_sketch(std::span<const RecordId> members, std::uint64_t node_seed) const;

    /// Σ_{j∈x} (count[j] − 1) / |x| / (|S| − 1) over the node's token counts:
    /// the exact average Braun-Blanquet similarity of x to the other members.
    double average_similarity_exact(RecordId x, std::span<const RecordId> members) const;

    void brute_force_pairs(std::span<const RecordId> members);
    void brute_force_point(RecordId x, std::span<const RecordId> members);

    const std::vector<ResultPair>& results() const { return results_; }
    std::vector<ResultPair> take_results() { return std::move(results_); }
    const Counters& counters() const { return counters_; }

private:
    const Dataset& ds_;
    const PreparedInput& input_;
    const CPSJoinParams& params_;
    PairVerifier verifier_;
    std::vector<ResultPair> results_;
    Counters counters_;
    std::uint64_t live_members_ = 0;
};

/// Self-join over `repetitions` independent trees; output deduplicated.
JoinOutput cpsjoin_self(const Dataset& ds, const PreparedInput& input, const CPSJoinParams& params);

/// Convenience overload that prepares the input itself.
JoinOutput cpsjoin_self(const Dataset& ds, const CPSJoinParams& params);

struct CrossPair {
    RecordId r = 0;
    RecordId s = 0;
    double similarity = 0.0;
    friend bool operator==(const CrossPair& x, const CrossPair& y) { return x.r == y.r && x.s == y.s; }
};

struct CrossJoinOutput {
    std::vector<CrossPair> pairs;  // sorted by (r, s)
    Counters counters;
};

/// R×S join run as a self-join over the tagged union. Both inputs must be
/// prepared with the same seed, t and sketch length, and share a token universe.
CrossJoinOutput join_rs(const Dataset& r, const PreparedInput& r_input, const Dataset& s, const PreparedInput& s_input,
                        const CPSJoinParams& params);

}  // namespace cpsj
