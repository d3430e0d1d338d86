#include <fstream>
#include <stdexcept>

#include "kuramoto/cli.hpp"
#include "kuramoto_cli_internal.hpp"

namespace kuramoto::cli {
namespace {

std::ofstream open_csv(const std::filesystem::path& path, const CsvMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# units: " << meta.units << "; config_hash=" << meta.config_hash << '\n';
  return out;
}

template <class RowFn>
void write_rows(std::ofstream& out, const PhaseTrajectory& traj, std::size_t stride, RowFn&& row) {
  if (stride == 0) throw std::invalid_argument("CSV stride must be positive");
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k % stride != 0 && k + 1 != traj.size()) continue;
    out << format_number(traj.times[k]);
    row(k);
    out << '\n';
  }
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const PhaseTrajectory& traj, const CsvMeta& meta,
                          std::size_t stride) {
  auto out = open_csv(path, meta);
  out << 't';
  for (std::size_t i = 1; i <= traj.oscillators(); ++i) out << ",theta_" << i;
  out << '\n';
  write_rows(out, traj, stride, [&](std::size_t k) {
    for (double v : traj.phases[k]) out << ',' << format_number(v);
  });
}

void write_pd_csv(const std::filesystem::path& path, const PhaseTrajectory& traj, const CsvMeta& meta,
                  std::size_t stride) {
  auto out = open_csv(path, meta);
  out << 't';
  for (std::size_t i = 2; i <= traj.oscillators(); ++i)
    for (std::size_t j = 1; j < i; ++j) out << ",pd_" << i << '_' << j;
  out << '\n';
  write_rows(out, traj, stride, [&](std::size_t k) {
    const PDVector pd = phase_differences(traj.phases[k]);
    for (double v : pd.values()) out << ',' << format_number(v);
  });
}

void write_two_column_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
                          const std::vector<double>& x, const std::vector<double>& y, const CsvMeta& meta) {
  if (x.size() != y.size()) throw std::invalid_argument("write_two_column_csv: column lengths differ");
  auto out = open_csv(path, meta);
  out << x_name << ',' << y_name << '\n';
  for (std::size_t k = 0; k < x.size(); ++k) out << format_number(x[k]) << ',' << format_number(y[k]) << '\n';
}

void detail::write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& rows, const CsvMeta& meta) {
  auto out = open_csv(path, meta);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("write_columns_csv: ragged row");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
  }
}

}  // namespace kuramoto::cli
