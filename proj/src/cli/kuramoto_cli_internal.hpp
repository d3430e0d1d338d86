#pragma once

// Field accessors shared by the subcommands. Every failure is a ConfigError
// naming the dotted field path.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kuramoto/cli.hpp"

namespace kuramoto::cli::detail {

using nlohmann::ordered_json;

std::string join(const std::string& base, const std::string& key);
std::string join(const std::string& base, std::size_t index);

const ordered_json& require(const ordered_json& j, const std::string& key, const std::string& field);
const ordered_json* find(const ordered_json& j, const std::string& key);

double as_number(const ordered_json& j, const std::string& field);
double number(const ordered_json& j, const std::string& key, const std::string& field);
double number_or(const ordered_json& j, const std::string& key, const std::string& field, double fallback);
double positive(const ordered_json& j, const std::string& key, const std::string& field,
                std::optional<double> fallback);
std::size_t count(const ordered_json& j, const std::string& key, const std::string& field,
                  std::optional<std::size_t> fallback);
std::uint64_t seed(const ordered_json& j, const std::string& key, const std::string& field, std::uint64_t fallback);
double radius(const ordered_json& j, const std::string& key, const std::string& field);
std::vector<double> numbers(const ordered_json& j, const std::string& field);
std::pair<double, double> range(const ordered_json& j, const std::string& key, const std::string& field,
                                std::pair<double, double> fallback);
std::string text(const ordered_json& j, const std::string& key, const std::string& field,
                 std::optional<std::string> fallback);

}  // namespace kuramoto::cli::detail

namespace kuramoto::cli::detail {

/// Plain CSV with a units/hash comment line, a header and numeric rows.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows, const CsvMeta& meta);

}  // namespace kuramoto::cli::detail

namespace kuramoto::cli::detail {

/// Effective configuration of one invocation (overrides folded in).
struct Invocation {
  ordered_json config;
  std::string hash;
  std::filesystem::path out_dir;

  CsvMeta meta(std::string units) const { return {std::move(units), hash}; }
  const ordered_json& parameters() const;
};

Invocation prepare(const std::filesystem::path& config_path, const Overrides& ov, const std::string& default_out);

/// summary.json: tool versions, config hash and echo, wall time, results.
void write_summary(const Invocation& inv, const ordered_json& results, double wall_seconds);

int experiment_ap(const Invocation& inv, std::ostream& out);
int experiment_perturb(const Invocation& inv, std::ostream& out);
int experiment_fast(const Invocation& inv, std::ostream& out);

}  // namespace kuramoto::cli::detail
