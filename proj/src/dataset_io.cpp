#include "cpsj/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>

namespace cpsj {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) {
            ++i;
        }
        auto j = i;
        while (j < line.size() && !is_space(line[j])) {
            ++j;
        }
        if (j > i) {
            fields.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

Dataset preprocess(std::vector<std::vector<std::uint64_t>> raw, std::vector<std::uint64_t> lines) {
    if (!lines.empty() && lines.size() != raw.size()) {
        throw std::invalid_argument("one source line per record expected");
    }
    std::vector<std::vector<std::uint64_t>> kept;
    std::vector<std::uint64_t> kept_lines;
    std::set<std::vector<std::uint64_t>> distinct;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& tokens = raw[i];
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        if (tokens.size() < 2 || !distinct.insert(tokens).second) {
            continue;
        }
        kept.push_back(std::move(tokens));
        kept_lines.push_back(lines.empty() ? i + 1 : lines[i]);
    }

    std::map<std::uint64_t, TokenId> dense;
    for (const auto& tokens : kept) {
        for (const auto j : tokens) {
            dense.emplace(j, 0);
        }
    }
    TokenId next = 0;
    for (auto& [original, id] : dense) {
        id = next++;
    }

    std::vector<std::vector<TokenId>> lists(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        lists[i].reserve(kept[i].size());
        for (const auto j : kept[i]) {
            lists[i].push_back(dense.at(j));
        }
    }
    auto ds = Dataset::from_sorted_lists(std::move(lists), next);
    ds.source_line = std::move(kept_lines);
    return ds;
}

Dataset parse_dataset(std::istream& in) {
    std::vector<std::vector<std::uint64_t>> raw;
    std::vector<std::uint64_t> lines;
    std::string line;
    std::uint64_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto fields = split_fields(line);
        if (fields.empty()) {
            continue;
        }
        std::vector<std::uint64_t> tokens;
        tokens.reserve(fields.size());
        for (const auto f : fields) {
            std::uint32_t value = 0;
            if (!parse_number(f, value)) {
                throw ParseError("line " + std::to_string(number) + ": invalid token '" + std::string(f) + "'", number);
            }
            tokens.push_back(value);
        }
        raw.push_back(std::move(tokens));
        lines.push_back(number);
    }
    return preprocess(std::move(raw), std::move(lines));
}

Dataset load_dataset(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& ds) {
    for (const auto& rec : ds.records) {
        for (std::size_t k = 0; k < rec.tokens.size(); ++k) {
            if (k > 0) {
                out << ' ';
            }
            out << rec.tokens[k];
        }
        out << '\n';
    }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_dataset(out, ds);
}

void write_pairs(std::ostream& out, const std::vector<ResultPair>& pairs) {
    char buf[64];
    for (const auto& p : pairs) {
        const int len = std::snprintf(buf, sizeof(buf), "%u %u %.6f\n", p.a, p.b, p.similarity);
        out.write(buf, len);
    }
}

std::vector<ResultPair> read_pairs(std::istream& in) {
    std::vector<ResultPair> pairs;
    std::string line;
    std::uint64_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto fields = split_fields(line);
        if (fields.empty()) {
            continue;
        }
        ResultPair p;
        if (fields.size() != 3 || !parse_number(fields[0], p.a) || !parse_number(fields[1], p.b) ||
            !parse_number(fields[2], p.similarity)) {
            throw ParseError("line " + std::to_string(number) + ": expected 'idA idB similarity'", number);
        }
        if (p.a > p.b) {
            std::swap(p.a, p.b);
        }
        pairs.push_back(p);
    }
    return pairs;
}

void save_pairs(const std::vector<ResultPair>& pairs, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_pairs(out, pairs);
}

std::vector<ResultPair> load_pairs(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_pairs(in);
}

void write_mapping(std::ostream& out, const Dataset& ds) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << i << ' ' << (i < ds.source_line.size() ? ds.source_line[i] : i + 1) << '\n';
    }
}

}  // namespace cpsj
