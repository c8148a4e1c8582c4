#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "poicalib/ingest.hpp"
#include "poicalib/recommender.hpp"

namespace poicalib {

/// Shortest round-trip decimal form.
std::string format_double(double value);
/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

/// canonical_tsv: user_id, item_id, epoch seconds, lat, lon (8 decimals).
void write_canonical(std::ostream& out, const InteractionLog& log);

/// Reads a log from disk; throws a data error naming the path if missing.
ParseResult read_log(const std::filesystem::path& path, InputFormat format);

/// user_id, item_id, rank (1-based), score[, origin]
void write_scored_lists(std::ostream& out, std::span<const ScoredList> lists,
                        bool with_origin = false);
std::vector<ScoredList> read_scored_lists(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

/// Throws a data error naming `path` when it does not exist.
void require_file(const std::filesystem::path& path, const std::string& stage);

}  // namespace poicalib
