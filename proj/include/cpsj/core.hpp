#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cpsj {

/// Token ids are dense and 0-based after ingestion.
using TokenId = std::uint32_t;
using RecordId = std::uint32_t;

/// One set: strictly increasing token ids.
struct Record {
    RecordId id = 0;
    std::vector<TokenId> tokens;

    std::size_t size() const { return tokens.size(); }
    std::span<const TokenId> view() const { return tokens; }
};

/// A collection of records over the universe [0, d).
///
/// `token_frequency[j]` is the number of records containing token j.
/// `source_line` (may be empty) holds the 1-based input line each record came from.
struct Dataset {
    std::vector<Record> records;
    std::uint32_t universe = 0;
    std::vector<std::uint32_t> token_frequency;
    std::vector<std::uint64_t> source_line;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    /// Builds a dataset from already-normalized token lists (sorted, unique,
    /// each token < universe). Ids are assigned by position.
    static Dataset from_sorted_lists(std::vector<std::vector<TokenId>> lists, std::uint32_t universe);
};

/// Similarity threshold λ in the open interval (0, 1).
class Threshold {
public:
    explicit Threshold(double lambda);
    double value() const { return lambda_; }

private:
    double lambda_;
};

struct ResultPair {
    RecordId a = 0;
    RecordId b = 0;
    double similarity = 0.0;

    friend bool operator==(const ResultPair& x, const ResultPair& y) {
        return x.a == y.a && x.b == y.b;
    }
};

/// Builds a normalized pair (smaller id first). Self pairs are a caller error.
ResultPair make_pair(RecordId x, RecordId y, double similarity);

/// Tallies shared by every join algorithm.
///
/// pre_candidates: pairs looked at; candidates: pairs handed to exact
/// verification; results: verified pairs (duplicates included for the
/// randomized joins).
struct Counters {
    std::uint64_t pre_candidates = 0;
    std::uint64_t candidates = 0;
    std::uint64_t results = 0;
    std::uint32_t max_depth = 0;
    std::uint64_t peak_live_members = 0;
    std::uint64_t depth_aborts = 0;

    Counters& operator+=(const Counters& o);
    friend bool operator==(const Counters&, const Counters&) = default;
};

std::size_t intersection_size(std::span<const TokenId> x, std::span<const TokenId> y);

/// |x∩y| / |x∪y|. Throws std::invalid_argument when both are empty.
double jaccard(std::span<const TokenId> x, std::span<const TokenId> y);

/// |x∩y| / t for fixed-size sets. Throws when either size differs from t.
double braun_blanquet(std::span<const TokenId> x, std::span<const TokenId> y, std::size_t t);

/// Returns J(x,y) when J(x,y) >= λ. The merge stops as soon as the
/// remaining tokens can no longer reach the required overlap.
std::optional<double> verify_pair(std::span<const TokenId> x, std::span<const TokenId> y, Threshold lambda);

/// Jaccard size filter: λ|x| <= |y| <= |x|/λ.
bool passes_size_filter(std::size_t x_size, std::size_t y_size, Threshold lambda);

/// Sorts by (a, b) and drops repeated pairs.
std::vector<ResultPair> dedup_pairs(std::vector<ResultPair> pairs);

}  // namespace cpsj
