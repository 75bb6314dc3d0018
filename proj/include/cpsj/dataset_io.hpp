#pragma once

#include "cpsj/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpsj {

/// Thrown for malformed input files; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::uint64_t line) : std::runtime_error(what), line_(line) {}
    std::uint64_t line() const { return line_; }

private:
    std::uint64_t line_;
};

/// Normalizes raw token lists: sort and dedupe within each record, drop
/// records with fewer than two tokens, drop repeated records (first kept),
/// and remap tokens to dense ids in ascending order of their original value.
/// `lines` gives the source line of each list (may be empty).
Dataset preprocess(std::vector<std::vector<std::uint64_t>> raw, std::vector<std::uint64_t> lines = {});

/// One record per line, whitespace-separated non-negative decimal tokens.
/// Empty lines are skipped; "\r\n" line endings are accepted.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

/// Writes records in the input format (each line a record's dense tokens).
void write_dataset(std::ostream& out, const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Pair lines `idA idB similarity`, similarity with 6 decimals.
void write_pairs(std::ostream& out, const std::vector<ResultPair>& pairs);
std::vector<ResultPair> read_pairs(std::istream& in);
void save_pairs(const std::vector<ResultPair>& pairs, const std::filesystem::path& path);
std::vector<ResultPair> load_pairs(const std::filesystem::path& path);

/// Sidecar lines `recordId sourceLine`.
void write_mapping(std::ostream& out, const Dataset& ds);

}  // namespace cpsj
