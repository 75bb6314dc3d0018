#include "cpsj/embed.hpp"

#include "cpsj/random.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace cpsj {

EmbeddingParams::EmbeddingParams(std::size_t t, std::uint64_t seed) : seed_(seed) {
    if (t == 0) {
        throw std::invalid_argument("embedding size must be at least 1");
    }
    fns_.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        fns_.emplace_back(derive_seed(seed, 3, i));
    }
}

std::vector<std::pair<std::uint32_t, TokenId>> embed_record(const EmbeddingParams& params, std::span<const TokenId> x) {
    if (x.empty()) {
        throw std::invalid_argument("cannot embed an empty record");
    }
    std::vector<std::pair<std::uint32_t, TokenId>> out;
    out.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out.emplace_back(static_cast<std::uint32_t>(i), params.fn(i)(x));
    }
    return out;
}

EmbeddedDataset::EmbeddedDataset(std::size_t t, std::vector<TokenId> values, std::vector<RecordId> origin)
    : t_(t), values_(std::move(values)), origin_(std::move(origin)) {
    if (t_ == 0 || values_.size() != origin_.size() * t_) {
        throw std::invalid_argument("embedded values do not match n × t");
    }
    build_tokens();
}

void EmbeddedDataset::build_tokens() {
    tokens_.resize(values_.size());
    std::unordered_map<std::uint64_t, std::uint32_t> dense;
    dense.reserve(values_.size() / 4 + 16);
    for (std::size_t r = 0; r < origin_.size(); ++r) {
        for (std::size_t i = 0; i < t_; ++i) {
            const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | values_[r * t_ + i];
            const auto [it, inserted] = dense.try_emplace(key, static_cast<std::uint32_t>(dense.size()));
            tokens_[r * t_ + i] = it->second;
        }
    }
    universe_ = static_cast<std::uint32_t>(dense.size());
    sorted_ = tokens_;
    for (std::size_t r = 0; r < origin_.size(); ++r) {
        std::sort(sorted_.begin() + static_cast<std::ptrdiff_t>(r * t_),
                  sorted_.begin() + static_cast<std::ptrdiff_t>((r + 1) * t_));
    }
}

EmbeddedDataset EmbeddedDataset::concat(const EmbeddedDataset& a, const EmbeddedDataset& b) {
    if (a.size() == 0) {
        return b;
    }
    if (b.size() == 0) {
        return a;
    }
    if (a.t_ != b.t_) {
        throw std::invalid_argument("embedding sizes differ");
    }
    auto values = a.values_;
    values.insert(values.end(), b.values_.begin(), b.values_.end());
    auto origin = a.origin_;
    origin.insert(origin.end(), b.origin_.begin(), b.origin_.end());
    return EmbeddedDataset(a.t_, std::move(values), std::move(origin));
}

EmbeddedDataset embed_dataset(const EmbeddingParams& params, const Dataset& ds) {
    const auto t = params.size();
    std::vector<TokenId> values(ds.size() * t);
    std::vector<RecordId> origin(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto x = ds.records[r].view();
        if (x.empty()) {
            throw std::invalid_argument("cannot embed an empty record");
        }
        for (std::size_t i = 0; i < t; ++i) {
            values[r * t + i] = params.fn(i)(x);
        }
        origin[r] = ds.records[r].id;
    }
    return EmbeddedDataset(t, std::move(values), std::move(origin));
}

}  // namespace cpsj
