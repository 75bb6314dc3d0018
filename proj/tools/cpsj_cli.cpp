// Command-line front end: join, gen-tokens, bench, recall.

#include "cpsj/allpairs.hpp"
#include "cpsj/benchmark.hpp"
#include "cpsj/dataset_io.hpp"
#include "cpsj/metrics.hpp"
#include "cpsj/tokens_gen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<cpsj::PlantedLevel> parse_planted(const std::string& text) {
    // "0.55:20,0.65:20"
    std::vector<cpsj::PlantedLevel> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("planted level must be similarity:count, got '" + item + "'");
        }
        levels.push_back({std::stod(item.substr(0, colon)), std::stoul(item.substr(colon + 1))});
    }
    return levels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set similarity joins: CPSJoin, MinHash LSH, AllPairs and a naive oracle"};
    app.require_subcommand(1);

    // join
    auto* join = app.add_subcommand("join", "Self-join a dataset file");
    std::string algo = "cpsjoin";
    double threshold = 0.5;
    std::string input, output, oracle_file;
    cpsj::JoinSettings settings;
    bool no_embed = false;
    std::size_t minhash_k = 0;
    join->add_option("--algo", algo, "cpsjoin | minhash | allpairs | naive")
        ->check(CLI::IsMember({"cpsjoin", "minhash", "allpairs", "naive"}));
    join->add_option("--threshold", threshold, "Jaccard threshold in (0,1)")->required();
    join->add_option("--input", input, "Dataset file, one record per line")->required()->check(CLI::ExistingFile);
    join->add_option("--out", output, "Pair output file (default: stdout)");
    join->add_option("--recall-oracle", oracle_file, "Pair file with the exact result")->check(CLI::ExistingFile);
    join->add_option("--seed", settings.seed, "Master seed");
    join->add_option("--reps", settings.repetitions, "CPSJoin repetitions (MinHash: override L)");
    join->add_option("--limit", settings.limit, "Brute-force size cutoff");
    join->add_option("--epsilon", settings.epsilon, "Brute-force aggressiveness");
    join->add_option("--sketch-words", settings.sketch_words, "Sketch length in 64-bit words");
    join->add_option("--delta", settings.delta, "Sketch false-negative budget");
    join->add_option("--t", settings.t, "Embedding size");
    join->add_option("--phi", settings.phi, "MinHash target recall");
    join->add_option("--k", minhash_k, "MinHash concatenation length (default: auto)");
    join->add_flag("--no-embed", no_embed, "Split on raw tokens instead of the MinHash embedding");
    join->add_option("--stop-at-recall", settings.stop_at_recall,
                     "Stop repeating once this recall against --recall-oracle is reached");

    // gen-tokens
    auto* gen = app.add_subcommand("gen-tokens", "Generate a synthetic TOKENS dataset");
    cpsj::TokensGenSpec spec = cpsj::tokens_mini_spec(0);
    std::string planted = "0.55:20,0.65:20,0.75:20,0.85:20,0.95:20";
    std::string gen_out;
    gen->add_option("--d", spec.d, "Universe size");
    gen->add_option("--cap", spec.cap, "Maximum number of sets per token");
    gen->add_option("--background", spec.n_background, "Number of background sets");
    gen->add_option("--background-sim", spec.background_similarity, "Expected Jaccard of background sets");
    gen->add_option("--planted", planted, "Planted levels as similarity:pairs,...");
    gen->add_option("--seed", spec.seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output dataset file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark matrix from a JSON config");
    std::string config_file, csv_out;
    bench->add_option("--config", config_file, "JSON config")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", csv_out, "CSV output")->required();

    // recall
    auto* recall = app.add_subcommand("recall", "Recall of a pair file against an oracle pair file");
    std::string recall_output, recall_oracle;
    recall->add_option("--output", recall_output, "Pairs to evaluate")->required()->check(CLI::ExistingFile);
    recall->add_option("--oracle", recall_oracle, "Exact pairs")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*join) {
            settings.embed = !no_embed;
            if (minhash_k > 0) {
                settings.minhash_k = minhash_k;
            }
            if (join->count("--reps") > 0) {
                settings.minhash_repetitions = settings.repetitions;
            }
            auto ds = cpsj::load_dataset(input);
            std::optional<std::vector<cpsj::ResultPair>> oracle;
            if (!oracle_file.empty()) {
                oracle = cpsj::dedup_pairs(cpsj::load_pairs(oracle_file));
            }
            cpsj::JoinContext ctx(input, std::move(ds), settings);
            auto run = ctx.run(cpsj::parse_algorithm(algo), threshold, oracle ? &*oracle : nullptr);
            if (output.empty()) {
                cpsj::write_pairs(std::cout, run.pairs);
            } else {
                cpsj::save_pairs(run.pairs, output);
                std::ofstream map(output + ".map");
                cpsj::write_mapping(map, ctx.dataset());
            }
            const auto& r = run.report;
            std::cerr << r.algorithm << " lambda=" << r.lambda << " records=" << ctx.dataset().size()
                      << " pairs=" << run.pairs.size() << " reps=" << r.reps << " join_ms=" << r.join_time_ms
                      << " preprocess_ms=" << r.preprocess_ms << " pre_candidates=" << r.pre_candidates
                      << " candidates=" << r.candidates << " results=" << r.results;
            if (r.recall) {
                std::cerr << " recall=" << *r.recall;
            }
            if (!r.params.empty()) {
                std::cerr << " " << r.params;
            }
            std::cerr << "\n";
        } else if (*gen) {
            spec.planted = parse_planted(planted);
            const auto generated = cpsj::generate_tokens(spec);
            cpsj::save_dataset(generated.dataset, gen_out);
            std::cerr << "wrote " << generated.dataset.size() << " records over " << generated.dataset.universe
                      << " tokens to " << gen_out << "\n";
        } else if (*bench) {
            const auto config = cpsj::load_bench_config(config_file);
            const auto reports = cpsj::run_benchmark(config, std::cerr);
            std::ofstream out(csv_out);
            if (!out) {
                throw std::runtime_error("cannot write " + csv_out);
            }
            cpsj::write_csv(out, reports);
        } else if (*recall) {
            const auto out = cpsj::dedup_pairs(cpsj::load_pairs(recall_output));
            const auto truth = cpsj::dedup_pairs(cpsj::load_pairs(recall_oracle));
            std::cout << cpsj::measure_recall(out, truth) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
