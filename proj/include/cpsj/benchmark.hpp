#pragma once

#include "cpsj/allpairs.hpp"
#include "cpsj/core.hpp"
#include "cpsj/cpsjoin.hpp"
#include "cpsj/minhash_join.hpp"
#include "cpsj/tokens_gen.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpsj {

enum class Algorithm { kCPSJoin, kMinHash, kAllPairs, kNaive };

Algorithm parse_algorithm(const std::string& name);  // throws std::invalid_argument
std::string algorithm_name(Algorithm algo);

/// Knobs shared by the CLI and the benchmark driver.
struct JoinSettings {
    std::uint64_t seed = 0;
    std::size_t repetitions = 10;  // CPSJoin
    std::size_t limit = 250;
    double epsilon = 0.1;
    std::size_t sketch_words = 8;
    double delta = 0.05;
    std::size_t t = 128;
    bool embed = true;
    double phi = 0.9;  // MinHash
    std::optional<std::size_t> minhash_k;
    std::optional<std::size_t> minhash_repetitions;
    /// Stop repeating once this recall against the oracle is reached.
    std::optional<double> stop_at_recall;
};

struct JoinReport {
    std::string dataset;
    std::string algorithm;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    double join_time_ms = 0.0;
    double preprocess_ms = 0.0;
    std::uint64_t pre_candidates = 0;
    std::uint64_t candidates = 0;
    std::uint64_t results = 0;
    std::optional<double> recall;
    std::string params;  // human-readable parameter echo, not part of the CSV

    bool same_row(const JoinReport& o, bool include_timing) const;
};

struct JoinRun {
    JoinReport report;
    std::vector<ResultPair> pairs;
};

/// Everything an algorithm needs for one dataset; the randomized joins'
/// preprocessing is computed lazily and reused across thresholds.
class JoinContext {
public:
    JoinContext(std::string name, Dataset ds, JoinSettings settings);

    const Dataset& dataset() const { return ds_; }
    const std::string& name() const { return name_; }
    const JoinSettings& settings() const { return settings_; }

    const PreparedInput& prepared();
    double preprocess_ms() const { return preprocess_ms_; }

    JoinRun run(Algorithm algo, double lambda, const std::vector<ResultPair>* oracle = nullptr);

private:
    std::string name_;
    Dataset ds_;
    JoinSettings settings_;
    std::optional<PreparedInput> prepared_;
    double preprocess_ms_ = 0.0;
};

struct BenchDataset {
    std::string name;
    std::optional<std::filesystem::path> path;
    std::optional<TokensGenSpec> tokens;
    /// UNIFORM-style generation: n sets of `set_size` tokens from `universe`.
    struct Uniform {
        std::size_t n = 0;
        std::size_t set_size = 0;
        std::uint32_t universe = 0;
        std::uint64_t seed = 0;
    };
    std::optional<Uniform> uniform;
    std::map<double, std::filesystem::path> oracle_files;
};

struct BenchConfig {
    std::vector<BenchDataset> datasets;
    std::vector<double> thresholds;
    std::vector<Algorithm> algorithms;
    JoinSettings settings;
    std::size_t oracle_cap = 20000;
};

/// JSON config; relative paths resolve against `base_dir`.
BenchConfig parse_bench_config(std::istream& in, const std::filesystem::path& base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path& path);

/// Runs every (dataset, λ, algorithm) cell. Recall is measured against the
/// naive join when a dataset has at most `oracle_cap` records, else against
/// a provided oracle file, else left empty with a warning on `log`.
std::vector<JoinReport> run_benchmark(const BenchConfig& config, std::ostream& log);

inline const char* kCsvHeader =
    "dataset,algorithm,lambda,seed,reps,join_time_ms,preprocess_ms,pre_candidates,candidates,results,recall";

void write_csv(std::ostream& out, const std::vector<JoinReport>& reports);
std::vector<JoinReport> read_csv(std::istream& in);

}  // namespace cpsj
