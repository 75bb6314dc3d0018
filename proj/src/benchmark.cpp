#include "cpsj/benchmark.hpp"

#include "cpsj/dataset_io.hpp"
#include "cpsj/metrics.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cpsj {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

template <typename T>
T parse_field(const std::string& field, const char* name) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument(std::string("bad CSV value for ") + name + ": '" + field + "'");
    }
    return value;
}

std::uint64_t pair_count(std::size_t n) { return n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2; }

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "cpsjoin") return Algorithm::kCPSJoin;
    if (name == "minhash") return Algorithm::kMinHash;
    if (name == "allpairs") return Algorithm::kAllPairs;
    if (name == "naive") return Algorithm::kNaive;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::kCPSJoin: return "cpsjoin";
        case Algorithm::kMinHash: return "minhash";
        case Algorithm::kAllPairs: return "allpairs";
        case Algorithm::kNaive: return "naive";
    }
    return "unknown";
}

bool JoinReport::same_row(const JoinReport& o, bool include_timing) const {
    const bool timing_ok = !include_timing || (join_time_ms == o.join_time_ms && preprocess_ms == o.preprocess_ms);
    return timing_ok && dataset == o.dataset && algorithm == o.algorithm && lambda == o.lambda && seed == o.seed &&
           reps == o.reps && pre_candidates == o.pre_candidates && candidates == o.candidates &&
           results == o.results && recall == o.recall;
}

JoinContext::JoinContext(std::string name, Dataset ds, JoinSettings settings)
    : name_(std::move(name)), ds_(std::move(ds)), settings_(std::move(settings)) {}

const PreparedInput& JoinContext::prepared() {
    if (!prepared_) {
        const auto start = Clock::now();
        prepared_ = prepare_input(ds_, settings_.t, settings_.sketch_words, settings_.seed, settings_.embed);
        preprocess_ms_ = elapsed_ms(start);
    }
    return *prepared_;
}

JoinRun JoinContext::run(Algorithm algo, double lambda, const std::vector<ResultPair>* oracle) {
    JoinRun run;
    auto& rep = run.report;
    rep.dataset = name_;
    rep.algorithm = algorithm_name(algo);
    rep.lambda = lambda;
    rep.seed = settings_.seed;

    std::function<bool(const std::vector<ResultPair>&)> stop_when;
    if (settings_.stop_at_recall && oracle != nullptr) {
        const double target = *settings_.stop_at_recall;
        stop_when = [oracle, target](const std::vector<ResultPair>& so_far) {
            return measure_recall(so_far, *oracle) >= target;
        };
    }

    std::ostringstream echo;
    Counters counters;
    switch (algo) {
        case Algorithm::kCPSJoin: {
            const auto& input = prepared();
            CPSJoinParams p;
            p.lambda = lambda;
            p.limit = settings_.limit;
            p.epsilon = settings_.epsilon;
            p.sketch_words = settings_.sketch_words;
            p.delta = settings_.delta;
            p.t = settings_.t;
            p.repetitions = settings_.repetitions;
            p.seed = settings_.seed;
            p.stop_when = stop_when;
            const auto start = Clock::now();
            auto out = cpsjoin_self(ds_, input, p);
            rep.join_time_ms = elapsed_ms(start);
            rep.preprocess_ms = preprocess_ms_;
            rep.reps = out.repetitions;
            counters = out.counters;
            run.pairs = std::move(out.pairs);
            echo << "limit=" << p.limit << " epsilon=" << p.epsilon << " l=" << p.sketch_words << " delta=" << p.delta
                 << " t=" << p.t << " embed=" << settings_.embed << " max_depth=" << counters.max_depth;
            break;
        }
        case Algorithm::kMinHash: {
            const auto& input = prepared();
            MinHashJoinParams p;
            p.lambda = lambda;
            p.phi = settings_.phi;
            p.k = settings_.minhash_k;
            p.repetitions = settings_.minhash_repetitions;
            p.sketch_words = settings_.sketch_words;
            p.delta = settings_.delta;
            p.t = settings_.t;
            p.seed = settings_.seed;
            p.stop_when = stop_when;
            const auto start = Clock::now();
            auto out = minhash_join(ds_, input, p);
            rep.join_time_ms = elapsed_ms(start);
            rep.preprocess_ms = preprocess_ms_;
            rep.reps = out.repetitions;
            counters = out.counters;
            run.pairs = std::move(out.pairs);
            echo << "k=" << out.k << " phi=" << p.phi << " l=" << p.sketch_words << " delta=" << p.delta;
            break;
        }
        case Algorithm::kAllPairs: {
            const auto start = Clock::now();
            auto out = allpairs_join(ds_, lambda);
            rep.join_time_ms = elapsed_ms(start);
            rep.reps = 1;
            counters = out.counters;
            run.pairs = std::move(out.pairs);
            break;
        }
        case Algorithm::kNaive: {
            const auto start = Clock::now();
            run.pairs = naive_join(ds_, lambda);
            rep.join_time_ms = elapsed_ms(start);
            rep.reps = 1;
            counters.pre_candidates = counters.candidates = pair_count(ds_.size());
            counters.results = run.pairs.size();
            break;
        }
    }
    rep.pre_candidates = counters.pre_candidates;
    rep.candidates = counters.candidates;
    // Distinct output pairs; the tree counters also count repeat finds across repetitions.
    rep.results = run.pairs.size();
    rep.params = echo.str();
    if (oracle != nullptr) {
        rep.recall = measure_recall(run.pairs, *oracle);
    }
    return run;
}

BenchConfig parse_bench_config(std::istream& in, const std::filesystem::path& base_dir) {
    using nlohmann::json;
    const json j = json::parse(in);
    BenchConfig config;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    config.thresholds = j.at("thresholds").get<std::vector<double>>();
    for (const auto& name : j.at("algorithms")) {
        config.algorithms.push_back(parse_algorithm(name.get<std::string>()));
    }
    config.oracle_cap = j.value("oracle_cap", config.oracle_cap);

    auto& s = config.settings;
    s.seed = j.value("seed", s.seed);
    if (j.contains("settings")) {
        const auto& js = j.at("settings");
        s.repetitions = js.value("repetitions", s.repetitions);
        s.limit = js.value("limit", s.limit);
        s.epsilon = js.value("epsilon", s.epsilon);
        s.sketch_words = js.value("sketch_words", s.sketch_words);
        s.delta = js.value("delta", s.delta);
        s.t = js.value("t", s.t);
        s.embed = js.value("embed", s.embed);
        s.phi = js.value("phi", s.phi);
        if (js.contains("minhash_k") && !js.at("minhash_k").is_null()) {
            s.minhash_k = js.at("minhash_k").get<std::size_t>();
        }
        if (js.contains("minhash_repetitions") && !js.at("minhash_repetitions").is_null()) {
            s.minhash_repetitions = js.at("minhash_repetitions").get<std::size_t>();
        }
        if (js.contains("stop_at_recall") && !js.at("stop_at_recall").is_null()) {
            s.stop_at_recall = js.at("stop_at_recall").get<double>();
        }
    }

    for (const auto& jd : j.at("datasets")) {
        BenchDataset d;
        d.name = jd.at("name").get<std::string>();
        if (jd.contains("path")) {
            d.path = resolve(jd.at("path").get<std::string>());
        } else if (jd.contains("preset")) {
            const auto preset = jd.at("preset").get<std::string>();
            const auto seed = jd.value("seed", std::uint64_t{0});
            if (preset == "tokens-mini") {
                d.tokens = tokens_mini_spec(seed);
            } else if (preset == "uniform-mini") {
                d.uniform = BenchDataset::Uniform{10000, 10, 200, seed};
            } else {
                throw std::invalid_argument("unknown preset '" + preset + "'");
            }
        } else if (jd.contains("tokens")) {
            const auto& jt = jd.at("tokens");
            TokensGenSpec spec;
            spec.d = jt.value("d", spec.d);
            spec.cap = jt.value("cap", spec.cap);
            spec.n_background = jt.value("n_background", spec.n_background);
            spec.background_similarity = jt.value("background_similarity", spec.background_similarity);
            spec.seed = jt.value("seed", spec.seed);
            for (const auto& level : jt.value("planted", json::array())) {
                spec.planted.push_back({level.at(0).get<double>(), level.at(1).get<std::size_t>()});
            }
            d.tokens = spec;
        } else if (jd.contains("uniform")) {
            const auto& ju = jd.at("uniform");
            d.uniform = BenchDataset::Uniform{ju.at("n").get<std::size_t>(), ju.at("set_size").get<std::size_t>(),
                                              ju.at("universe").get<std::uint32_t>(), ju.value("seed", std::uint64_t{0})};
        } else {
            throw std::invalid_argument("dataset '" + d.name + "' needs path, preset, tokens or uniform");
        }
        if (jd.contains("oracles")) {
            for (const auto& [lambda, file] : jd.at("oracles").items()) {
                d.oracle_files[std::stod(lambda)] = resolve(file.get<std::string>());
            }
        }
        config.datasets.push_back(std::move(d));
    }
    return config;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_bench_config(in, path.parent_path());
}

std::vector<JoinReport> run_benchmark(const BenchConfig& config, std::ostream& log) {
    std::vector<JoinReport> reports;
    for (const auto& bd : config.datasets) {
        Dataset ds;
        if (bd.path) {
            ds = load_dataset(*bd.path);
        } else if (bd.tokens) {
            ds = generate_tokens(*bd.tokens).dataset;
        } else if (bd.uniform) {
            ds = generate_uniform(bd.uniform->n, bd.uniform->set_size, bd.uniform->universe, bd.uniform->seed);
        }
        JoinContext ctx(bd.name, std::move(ds), config.settings);
        for (const double lambda : config.thresholds) {
            std::optional<std::vector<ResultPair>> oracle;
            if (ctx.dataset().size() <= config.oracle_cap) {
                oracle = naive_join(ctx.dataset(), lambda);
            } else if (const auto it = bd.oracle_files.find(lambda); it != bd.oracle_files.end()) {
                oracle = dedup_pairs(load_pairs(it->second));
            } else {
                log << "warning: no recall oracle for " << bd.name << " at lambda " << lambda << " ("
                    << ctx.dataset().size() << " records exceeds oracle cap " << config.oracle_cap << ")\n";
            }
            for (const auto algo : config.algorithms) {
                auto run = ctx.run(algo, lambda, oracle ? &*oracle : nullptr);
                log << bd.name << " lambda=" << lambda << " " << run.report.algorithm
                    << " time_ms=" << run.report.join_time_ms << " results=" << run.pairs.size();
                if (run.report.recall) {
                    log << " recall=" << *run.report.recall;
                }
                log << "\n";
                reports.push_back(std::move(run.report));
            }
        }
    }
    return reports;
}

void write_csv(std::ostream& out, const std::vector<JoinReport>& reports) {
    out << kCsvHeader << '\n';
    for (const auto& r : reports) {
        if (r.dataset.find_first_of(",\"\n") != std::string::npos) {
            throw std::invalid_argument("dataset name '" + r.dataset + "' cannot be written to CSV");
        }
        out << r.dataset << ',' << r.algorithm << ',' << format_double(r.lambda) << ',' << r.seed << ',' << r.reps
            << ',' << format_double(r.join_time_ms) << ',' << format_double(r.preprocess_ms) << ','
            << r.pre_candidates << ',' << r.candidates << ',' << r.results << ','
            << (r.recall ? format_double(*r.recall) : std::string()) << '\n';
    }
}

std::vector<JoinReport> read_csv(std::istream& in) {
    std::vector<JoinReport> reports;
    std::string line;
    if (!std::getline(in, line)) {
        return reports;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kCsvHeader) {
        throw std::invalid_argument("unexpected CSV header");
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (f.size() != 11) {
            throw std::invalid_argument("expected 11 CSV columns, got " + std::to_string(f.size()));
        }
        JoinReport r;
        r.dataset = f[0];
        r.algorithm = f[1];
        r.lambda = parse_field<double>(f[2], "lambda");
        r.seed = parse_field<std::uint64_t>(f[3], "seed");
        r.reps = parse_field<std::size_t>(f[4], "reps");
        r.join_time_ms = parse_field<double>(f[5], "join_time_ms");
        r.preprocess_ms = parse_field<double>(f[6], "preprocess_ms");
        r.pre_candidates = parse_field<std::uint64_t>(f[7], "pre_candidates");
        r.candidates = parse_field<std::uint64_t>(f[8], "candidates");
        r.results = parse_field<std::uint64_t>(f[9], "results");
        if (!f[10].empty()) {
            r.recall = parse_field<double>(f[10], "recall");
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace cpsj
