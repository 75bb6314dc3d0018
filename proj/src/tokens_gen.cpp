#include "cpsj/tokens_gen.hpp"

#include "cpsj/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace cpsj {

namespace {

class TokenPool {
public:
    TokenPool(std::uint32_t d, std::uint32_t cap, std::mt19937_64& rng) : usage_(d, 0), cap_(cap), rng_(rng) {}

    /// `count` distinct tokens with at least `headroom` free slots, excluding `exclude`.
    std::vector<std::uint64_t> draw(std::size_t count, std::uint32_t headroom, const std::vector<std::uint64_t>& exclude) {
        std::vector<char> banned(usage_.size(), 0);
        for (const auto j : exclude) {
            banned[j] = 1;
        }
        std::vector<std::uint64_t> open;
        for (std::size_t j = 0; j < usage_.size(); ++j) {
            if (!banned[j] && usage_[j] + headroom <= cap_) {
                open.push_back(j);
            }
        }
        if (open.size() < count) {
            throw std::invalid_argument("token cap " + std::to_string(cap_) + " leaves only " +
                                        std::to_string(open.size()) + " tokens for a set of " + std::to_string(count));
        }
        for (std::size_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, open.size() - 1);
            std::swap(open[i], open[pick(rng_)]);
        }
        open.resize(count);
        return open;
    }

    void use(const std::vector<std::uint64_t>& tokens) {
        for (const auto j : tokens) {
            ++usage_[j];
        }
    }

private:
    std::vector<std::uint32_t> usage_;
    std::uint32_t cap_;
    std::mt19937_64& rng_;
};

}  // namespace

std::size_t planted_set_size(double level, std::uint32_t d) {
    return static_cast<std::size_t>(std::llround(2.0 * level / (1.0 + level) * d));
}

std::size_t planted_overlap(double level, std::size_t set_size) {
    return static_cast<std::size_t>(std::llround(2.0 * level * static_cast<double>(set_size) / (1.0 + level)));
}

GeneratedDataset generate_tokens(const TokensGenSpec& spec) {
    if (spec.cap < 1) {
        throw std::invalid_argument("cap must be at least 1");
    }
    if (!(spec.background_similarity > 0.0 && spec.background_similarity <= 1.0)) {
        throw std::invalid_argument("background similarity must lie in (0, 1]");
    }
    std::mt19937_64 rng(spec.seed);
    TokenPool pool(spec.d, spec.cap, rng);
    std::vector<std::vector<std::uint64_t>> sets;
    struct Raw {
        std::size_t a, b;
        double level;
    };
    std::vector<Raw> planted;

    for (const auto& level : spec.planted) {
        if (!(level.similarity > 0.0 && level.similarity <= 1.0)) {
            throw std::invalid_argument("planted similarity must lie in (0, 1]");
        }
        const auto s = planted_set_size(level.similarity, spec.d);
        const auto o = std::min(s, planted_overlap(level.similarity, s));
        for (std::size_t p = 0; p < level.pairs; ++p) {
            auto common = pool.draw(o, 2, {});
            pool.use(common);
            pool.use(common);
            auto priv = pool.draw(2 * (s - o), 1, common);
            pool.use(priv);
            auto a = common;
            auto b = common;
            a.insert(a.end(), priv.begin(), priv.begin() + static_cast<std::ptrdiff_t>(s - o));
            b.insert(b.end(), priv.begin() + static_cast<std::ptrdiff_t>(s - o), priv.end());
            planted.push_back({sets.size(), sets.size() + 1, level.similarity});
            sets.push_back(std::move(a));
            sets.push_back(std::move(b));
        }
    }

    const auto background_size = planted_set_size(spec.background_similarity, spec.d);
    for (std::size_t i = 0; i < spec.n_background; ++i) {
        auto set = pool.draw(background_size, 1, {});
        pool.use(set);
        sets.push_back(std::move(set));
    }

    std::vector<std::size_t> perm(sets.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> position(sets.size());
    std::vector<std::vector<std::uint64_t>> shuffled(sets.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled[i] = std::move(sets[perm[i]]);
        position[perm[i]] = i;
    }

    GeneratedDataset out;
    out.dataset = preprocess(std::move(shuffled));
    // source_line[r] - 1 is the shuffled position record r came from.
    std::vector<std::int64_t> row_of(perm.size(), -1);
    for (std::size_t r = 0; r < out.dataset.size(); ++r) {
        row_of[out.dataset.source_line[r] - 1] = static_cast<std::int64_t>(r);
    }
    for (const auto& p : planted) {
        const auto ra = row_of[position[p.a]];
        const auto rb = row_of[position[p.b]];
        if (ra >= 0 && rb >= 0) {
            const auto pair = make_pair(static_cast<RecordId>(ra), static_cast<RecordId>(rb), p.level);
            out.planted.push_back({pair.a, pair.b, p.level});
        }
    }
    return out;
}

TokensGenSpec tokens_mini_spec(std::uint64_t seed) {
    TokensGenSpec spec;
    spec.d = 1000;
    spec.cap = 1000;
    spec.n_background = 2400;
    spec.planted = {{0.55, 20}, {0.65, 20}, {0.75, 20}, {0.85, 20}, {0.95, 20}};
    spec.background_similarity = 0.2;
    spec.seed = seed;
    return spec;
}

Dataset generate_uniform(std::size_t n, std::size_t set_size, std::uint32_t universe, std::uint64_t seed) {
    if (set_size > universe) {
        throw std::invalid_argument("set size exceeds universe");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> all(universe);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    std::vector<std::vector<std::uint64_t>> sets(n);
    for (auto& set : sets) {
        for (std::size_t i = 0; i < set_size; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
            std::swap(all[i], all[pick(rng)]);
        }
        set.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(set_size));
    }
    return preprocess(std::move(sets));
}

Dataset uniform_mini(std::uint64_t seed) { return generate_uniform(10000, 10, 200, seed); }

}  // namespace cpsj
