#pragma once

// Command-line front end: JSON config ingestion, experiment orchestration and
// CSV / JSON report emission. Everything is callable in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitRuntime = 3;

/// Schema violation; `field` is a dotted path such as "parameters.r".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses a JSON file; syntax errors are reported with line and column.
nlohmann::ordered_json load_json(const std::filesystem::path& path);

enum class ValueShape { column, square };

/// Signal description:
///   {"kind": "constant", "value": V}
///   {"kind": "switching", "pieces": [{"duration": d, "value": V}, ...]}
///   {"kind": "sinusoid", "base": V, "amplitude": V, "phase": V,
///    "angular_frequency": w, "trig": "sin" | "cos"}
///   {"kind": "table", "times": [...], "values": [V, ...], "period": P}
/// V is a number list (column) or a list of rows (square). Square signals may
/// set "matrix_form": "adjacency" (default) or "negated_laplacian"; both keep
/// the off-diagonal entries as couplings and drop the diagonal.
TimeSignal parse_signal(const nlohmann::ordered_json& j, const std::string& field, ValueShape shape);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::ordered_json& config);

/// "%.12g".
std::string format_number(double v);

struct CsvMeta {
  std::string units;
  std::string config_hash;
};

void write_trajectory_csv(const std::filesystem::path& path, const PhaseTrajectory& traj, const CsvMeta& meta,
                          std::size_t stride = 1);
void write_pd_csv(const std::filesystem::path& path, const PhaseTrajectory& traj, const CsvMeta& meta,
                  std::size_t stride = 1);
void write_two_column_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
                          const std::vector<double>& x, const std::vector<double>& y, const CsvMeta& meta);

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

/// Subcommands. Each returns a process exit code.
int run_simulate(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int run_certify(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int run_experiment(const std::string& name, const std::filesystem::path& config, const Overrides& ov,
                   std::ostream& out, std::ostream& err);
int run_verify_paper_values(const Overrides& ov, std::ostream& out, std::ostream& err);

/// Full argument vector (args[0] is the program name).
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kuramoto::cli
