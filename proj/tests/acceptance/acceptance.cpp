// Acceptance suite. `acceptance N` runs criterion N and prints one line:
//   criterion N: PASS|FAIL (<seconds>s) <details>
// Without arguments every criterion runs in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kuramoto/certificates.hpp"
#include "kuramoto/cli.hpp"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/instances.hpp"
#include "kuramoto/linalg.hpp"

namespace fs = std::filesystem;
using namespace kuramoto;
using nlohmann::ordered_json;

namespace {

const double kPi = std::numbers::pi;
const fs::path kConfigs = fs::path(KURAMOTO_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass = true;
  std::ostringstream details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details << " [failed: " << what << "]";
    }
  }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& c : split(line)) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_root() {
  static const fs::path root = [] {
    std::random_device rd;
    auto p = fs::temp_directory_path() / ("kuramoto_acceptance_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kuramoto");
  std::ostringstream out, err;
  const int code = cli::main_entry(args, out, err);
  if (code != 0 && !err.str().empty()) std::cerr << err.str();
  return code;
}

ordered_json summary_results(const fs::path& dir) { return ordered_json::parse(slurp(dir / "summary.json"))["results"]; }

// Spanning-tree oracle: some root reaches every node in the transitive
// closure of the influence relation j -> i.
bool closure_root(const ThresholdGraph& g) {
  const std::size_t m = g.size();
  std::vector<std::vector<bool>> reach(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < m; ++j)
      if (g.has_edge(i, j)) reach[j][i] = true;
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (reach[a][k] && reach[k][b]) reach[a][b] = true;
  for (std::size_t r = 0; r < m; ++r)
    if (std::all_of(reach[r].begin(), reach[r].end(), [](bool x) { return x; })) return true;
  return false;
}

Matrix random_psd_laplacian(std::mt19937_64& gen, std::size_t m, double neg_prob, double neg_scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    Matrix a(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        a(i, j) = a(j, i) = u(gen) < neg_prob ? -neg_scale * u(gen) : 2.0 * u(gen);
    const Matrix l = laplacian_from_adjacency(SignedNetwork(a)).matrix();
    const auto spec = symmetric_eigen(l).eigenvalues;
    if (spec[0] >= -1e-12 && spec[1] > 1e-6) return l;
  }
}

// --- criteria -------------------------------------------------------------

Outcome xi_reproduction() {
  Outcome o;
  const auto dir = scratch_root() / "c1";
  cli({"verify-paper-values", "--out", dir.string()});
  const auto ref = ordered_json::parse(slurp(dir / "reference_values.json"));
  const auto ap = ap_instance();
  const double x1 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed1)), kPi / 3);
  const double x2 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed2)), kPi / 3);
  o.details << "xi(L1)=" << x1 << " (printed 0.0858), xi(L2)=" << x2 << " (printed -0.1249), sum=" << x1 + x2
            << " (printed -0.0391)";
  o.require(std::abs(ref["values"][0]["computed"].get<double>() - x1) < 1e-12, "reported xi(L1) matches library");
  o.require(std::abs(x1 - 0.0858) <= 1e-3, "xi(L1) within 1e-3");
  o.require(std::abs(x2 + 0.1249) <= 1e-3, "xi(L2) within 1e-3");
  o.require(std::abs(x1 + x2 + 0.0391) <= 2e-3, "sum within 2e-3");
  return o;
}

Outcome lambda2_reproduction() {
  Outcome o;
  const auto fast = fast_instance();
  const double l2 = lambda2((fast.printed1 + fast.printed2) * -0.5);
  o.details << "lambda2=" << l2 << " (printed magnitude 2.5004)";
  o.require(std::abs(std::abs(l2) - 2.5004) <= 1e-3, "within 1e-3");
  return o;
}

Outcome ap_experiment() {
  Outcome o;
  const auto dir = scratch_root() / "c3";
  o.require(cli({"experiment", "ap", "--config", (kConfigs / "ap.json").string(), "--out", dir.string()}) == 0,
            "experiment exit code");
  const auto cfg = ordered_json::parse(slurp(kConfigs / "ap.json"))["parameters"];
  o.require(cfg["runs"] == 10 && cfg["dt"] == 1e-3 && cfg["t_end"] == 60, "configured as 10 runs, dt 1e-3, 60 s");
  const double r = kPi / 3;

  std::vector<Table> runs;
  for (int k = 1; k <= 10; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%02d_pd.csv", k);
    runs.push_back(read_csv(dir / name));
  }
  double max_pd = 0.0, max_div = 0.0;
  for (const auto& t : runs)
    for (const auto& row : t.rows)
      for (std::size_t c = 1; c < row.size(); ++c) max_pd = std::max(max_pd, std::abs(row[c]));
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b)
      for (std::size_t k = 0; k < runs[a].rows.size(); ++k) {
        if (runs[a].rows[k][0] < 40.0) continue;
        for (std::size_t c = 1; c < runs[a].header.size(); ++c)
          max_div = std::max(max_div, std::abs(runs[a].rows[k][c] - runs[b].rows[k][c]));
      }

  const auto orbit = read_csv(dir / "orbit.csv");
  const auto res = summary_results(dir);
  const double residual = res["orbit"]["residual"].get<double>();
  const double periodicity = res["orbit"]["periodicity_error"].get<double>();
  // t = 60 is a whole number of periods, so compare against the orbit at 0.
  double to_orbit = 0.0;
  for (const auto& t : runs) {
    const auto& last = t.rows.back();
    o.require(std::abs(last[0] - 60.0) < 1e-9, "runs end at 60 s");
    for (std::size_t c = 1; c < last.size(); ++c) to_orbit = std::max(to_orbit, std::abs(last[c] - orbit.rows[0][c]));
  }
  double orbit_wrap = 0.0;
  for (std::size_t c = 1; c < orbit.header.size(); ++c)
    orbit_wrap = std::max(orbit_wrap, std::abs(orbit.rows.front()[c] - orbit.rows.back()[c]));

  o.details << "max|pd|=" << max_pd << ", divergence(t>=40)=" << max_div << ", orbit residual=" << residual
            << ", distance to orbit at 60 s=" << to_orbit << ", periodicity=" << std::max(periodicity, orbit_wrap);
  o.require(max_pd <= r, "(a) inside region");
  o.require(res["checks"]["all_runs_inside_region"].get<bool>(), "(a) every integration step inside region");
  o.require(max_div < 1e-3, "(b) divergence < 1e-3");
  o.require(residual < 1e-8, "(c) orbit residual < 1e-8");
  o.require(to_orbit < 1e-3, "(c) runs within 1e-3 of orbit");
  o.require(periodicity < 1e-6 && orbit_wrap < 1e-6, "(d) periodicity < 1e-6");
  return o;
}

Outcome perturbation_experiment() {
  Outcome o;
  const auto dir = scratch_root() / "c4";
  o.require(cli({"experiment", "perturb", "--config", (kConfigs / "perturb.json").string(), "--out", dir.string()}) == 0,
            "experiment exit code");
  const auto sim = read_csv(dir / "plots" / "fig2_theta_1.csv");
  const auto approx = read_csv(dir / "plots" / "fig2_theta_1_first_order.csv");
  double err = 0.0;
  for (std::size_t k = 0; k < sim.rows.size(); ++k) {
    if (sim.rows[k][0] > 50.0 + 1e-9) break;
    err = std::max(err, std::abs(sim.rows[k][1] - approx.rows[k][1]));
  }
  const auto res = summary_results(dir);
  const double ratio = res["approximation_error"]["ratio"].get<double>();

  const auto pd = read_csv(dir / "pd.csv");
  const auto& locked = res["locked_state"]["pd"];
  double max_pd = 0.0, tracking = 0.0;
  for (const auto& row : pd.rows)
    for (std::size_t c = 1; c < row.size(); ++c) {
      max_pd = std::max(max_pd, std::abs(row[c]));
      tracking = std::max(tracking, std::abs(row[c] - locked[c - 1].get<double>()));
    }
  o.details << "max|theta1 - first order|=" << err << ", e(0.1)/e(0.05)=" << ratio << ", max|pd|=" << max_pd
            << ", pd tracking=" << tracking;
  o.require(err < 0.05, "(a) first-order error < 0.05");
  o.require(ratio >= 2.5 && ratio <= 6.0, "(b) ratio in [2.5, 6]");
  o.require(max_pd <= kPi / 3, "(c) inside region");
  o.require(tracking < 0.15, "(d) tracking < 0.15");
  return o;
}

Outcome fast_switching_experiment() {
  Outcome o;
  const auto dir = scratch_root() / "c5";
  o.require(cli({"experiment", "fast", "--config", (kConfigs / "fast.json").string(), "--out", dir.string()}) == 0,
            "experiment exit code");
  const auto sweep = read_csv(dir / "sweep.csv");
  const std::size_t hc = sweep.column("h"), tc = sweep.column("tail_deviation");
  auto tail = [&](double h) {
    for (const auto& row : sweep.rows)
      if (row[hc] == h) return row[tc];
    throw std::runtime_error("frequency missing from sweep");
  };
  double lo = 1e300, hi = 0.0;
  for (double h : {10.0, 20.0, 40.0, 80.0}) {
    lo = std::min(lo, tail(h) * h);
    hi = std::max(hi, tail(h) * h);
  }
  o.details << "tail(10)=" << tail(10) << ", tail(50)=" << tail(50) << ", tail*h in [" << lo << ", " << hi << "]";
  o.require(tail(50) < tail(10), "tail(50 Hz) < tail(10 Hz)");
  o.require(hi <= 3.0 * lo, "tail*h within a factor of 3");
  return o;
}

Outcome tilde_lambda2_property() {
  Outcome o;
  std::mt19937_64 gen(6006);
  std::size_t mixed = 0;
  double worst = -1e300;
  for (int n = 0; n < 200; ++n) {
    const Matrix l = random_psd_laplacian(gen, 4 + gen() % 5, 0.25, 0.3);
    bool has_negative_coupling = false;
    for (std::size_t i = 0; i < l.rows(); ++i)
      for (std::size_t j = 0; j < l.cols(); ++j) has_negative_coupling |= i != j && l(i, j) > 0;
    mixed += has_negative_coupling;
    for (double r : {kPi / 6, kPi / 3}) {
      const double gap = lambda2(tilde_laplacian(LaplacianMatrix(l), r).matrix()) - lambda2(l);
      worst = std::max(worst, gap);
    }
  }
  o.details << "200 matrices (" << mixed << " with negative couplings), max lambda2(tilde) - lambda2 = " << worst;
  o.require(worst <= 1e-9, "lambda2(tilde) <= lambda2 + 1e-9");
  o.require(mixed >= 100, "enough mixed-sign instances");
  return o;
}

Outcome consensus_contraction() {
  Outcome o;
  std::mt19937_64 gen(7007);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1.0, r = kPi / 3, horizon = 50.0;
  double worst_diameter = 0.0, worst_slack = -1e300, min_beta = 1e300;
  for (int s = 0; s < 50; ++s) {
    const std::size_t m = 3 + gen() % 4;
    // Non-periodic schedule: two fresh pieces per window, redrawn until the
    // window's beta exceeds 0.1.
    std::vector<double> times;
    std::vector<Matrix> values;
    std::vector<double> betas;
    double big = 0.0;
    for (int k = 0; k < static_cast<int>(horizon); ++k) {
      while (true) {
        const Matrix a = random_psd_laplacian(gen, m, 0.15, 0.1);
        const Matrix b = random_psd_laplacian(gen, m, 0.15, 0.1);
        const double beta = lambda2(tilde_laplacian(LaplacianMatrix((a + b) * 0.5), r).matrix());
        if (beta <= 0.1) continue;
        times.insert(times.end(), {k * h, k * h + h / 2});
        values.insert(values.end(), {a, b});
        betas.push_back(beta);
        big = std::max({big, spectral_norm_symmetric(a), spectral_norm_symmetric(b)});
        break;
      }
    }
    const auto g = TimeSignal::table(times, values);
    Vector x(m);
    for (double& v : x) v = normal(gen);
    for (int k = 0; k < static_cast<int>(horizon); ++k) {
      const auto u = state_transition(g, k * h, (k + 1) * h, 1e-3).value;
      const double bound = 1.0 - h * betas[k] / ((1 + big * h) * (1 + big * h));
      worst_slack = std::max(worst_slack, contraction_factor(u) - bound);
      min_beta = std::min(min_beta, betas[k]);
      x = u * x;
    }
    worst_diameter = std::max(worst_diameter, hajnal_diameter(x));
  }
  o.details << "50 schedules, min beta=" << min_beta << ", max diameter at t=50: " << worst_diameter
            << ", max(factor - bound)=" << worst_slack;
  o.require(worst_diameter < 1e-6, "(a) consensus by t = 50");
  o.require(worst_slack <= 1e-8, "(b) contraction bound on every window");
  return o;
}

Outcome xi_contraction_tracking() {
  Outcome o;
  const auto ap = ap_instance();
  const auto omega = ap.omega();
  const auto coupling = ap.coupling();
  std::mt19937_64 gen(8008);
  std::uniform_real_distribution<double> u(-kPi / 6, kPi / 6);
  const SimulationOptions opt{.t_end = 20.0, .dt = 1e-3, .stride = 10};
  // Integral of xi from 0 to each grid time, accumulated segment by segment.
  std::vector<double> integral;
  double worst = -1e300;
  for (int pair = 0; pair < 5; ++pair) {
    Vector a(5), b(5);
    for (double& x : a) x = u(gen);
    for (double& x : b) x = u(gen);
    const auto ta = simulate(a, omega, coupling, opt);
    const auto tb = simulate(b, omega, coupling, opt);
    if (integral.empty()) {
      integral.push_back(0.0);
      for (std::size_t k = 1; k < ta.size(); ++k)
        integral.push_back(integral.back() + (ta.times[k] - ta.times[k - 1]) *
                                                 xi_window_average(coupling, kPi / 3, ta.times[k - 1], ta.times[k]));
    }
    auto diameter = [&](std::size_t k) {
      Vector d(5);
      for (std::size_t i = 0; i < 5; ++i) d[i] = tb.phases[k][i] - ta.phases[k][i];
      return hajnal_diameter(d);
    };
    const double v0 = diameter(0);
    for (std::size_t k = 0; k < ta.size(); ++k)
      worst = std::max(worst, diameter(k) - (std::exp(integral[k]) * v0 + 1e-6));
  }
  o.details << "5 pairs over 20 s, max(V - bound)=" << worst;
  o.require(worst <= 0.0, "V(delta(t)) <= exp(int xi) V(delta(0)) + 1e-6");
  return o;
}

Outcome spanning_tree_equivalence() {
  Outcome o;
  std::size_t checked = 0, mismatches = 0;
  const std::vector<std::pair<std::size_t, std::size_t>> off3{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  for (unsigned mask = 0; mask < 64; ++mask) {
    ThresholdGraph g(3);
    for (std::size_t e = 0; e < 6; ++e)
      if (mask & (1u << e)) g.set_edge(off3[e].first, off3[e].second);
    mismatches += has_spanning_tree(g) != closure_root(g);
    ++checked;
  }
  std::mt19937_64 gen(9009);
  std::bernoulli_distribution coin(0.3);
  for (int n = 0; n < 10000; ++n) {
    const std::size_t m = n % 2 ? 5 : 4;
    ThresholdGraph g(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && coin(gen)) g.set_edge(i, j);
    mismatches += has_spanning_tree(g) != closure_root(g);
    ++checked;
  }
  o.details << checked << " digraphs, " << mismatches << " mismatches";
  o.require(mismatches == 0, "agreement with transitive-closure oracle");
  return o;
}

ordered_json normalized(const fs::path& p) {
  auto j = ordered_json::parse(slurp(p));
  j.erase("wall_time_s");
  if (j.contains("config")) j["config"].erase("output");
  return j;
}

Outcome determinism() {
  Outcome o;
  std::size_t configs = 0, files = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    const auto name = entry.path().stem().string();
    std::vector<std::string> cmd;
    if (name.rfind("simulate", 0) == 0)
      cmd = {"simulate"};
    else if (name.rfind("certify", 0) == 0)
      cmd = {"certify"};
    else
      cmd = {"experiment", name};
    cmd.insert(cmd.end(), {"--config", entry.path().string(), "--out"});
    const auto a = scratch_root() / "c10" / name / "a";
    const auto b = scratch_root() / "c10" / name / "b";
    for (const auto& dir : {a, b}) {
      auto args = cmd;
      args.push_back(dir.string());
      cli(args);
    }
    ++configs;
    for (const auto& f : fs::recursive_directory_iterator(a)) {
      if (!f.is_regular_file()) continue;
      const auto rel = fs::relative(f.path(), a);
      const auto other = b / rel;
      bool same = fs::exists(other);
      if (same) same = f.path().extension() == ".json" ? normalized(f.path()) == normalized(other)
                                                       : slurp(f.path()) == slurp(other);
      o.require(same, name + "/" + rel.string() + " identical");
      ++files;
    }
  }
  o.details << configs << " configs, " << files << " output files compared";
  o.require(configs >= 3 && files > 0, "outputs produced");
  return o;
}

struct Check {
  const char* title;
  double limit_s;  // 0 means unbounded
  std::function<Outcome()> run;
};

const std::vector<Check>& criteria() {
  static const std::vector<Check> all{
      {"xi reproduction", 1.0, xi_reproduction},
      {"lambda2 reproduction", 1.0, lambda2_reproduction},
      {"AP experiment", 120.0, ap_experiment},
      {"perturbation experiment", 180.0, perturbation_experiment},
      {"fast-switching experiment", 180.0, fast_switching_experiment},
      {"tilde lambda2 property", 10.0, tilde_lambda2_property},
      {"consensus and contraction bound", 30.0, consensus_contraction},
      {"xi contraction tracking", 60.0, xi_contraction_tracking},
      {"spanning-tree oracle equivalence", 10.0, spanning_tree_equivalence},
      {"determinism", 0.0, determinism},
  };
  return all;
}

bool run_one(std::size_t n) {
  const auto& c = criteria().at(n - 1);
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.pass = false;
    o.details << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.limit_s > 0 && secs > c.limit_s) o.require(false, "runtime limit " + std::to_string(c.limit_s) + " s");
  char head[96];
  std::snprintf(head, sizeof head, "criterion %zu (%s): %s (%.2fs) ", n, c.title, o.pass ? "PASS" : "FAIL", secs);
  std::cout << head << o.details.str() << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  for (int k = 1; k < argc; ++k) {
    const int n = std::atoi(argv[k]);
    if (n < 1 || n > static_cast<int>(criteria().size())) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria().size() << "]...\n";
      return 2;
    }
    which.push_back(static_cast<std::size_t>(n));
  }
  if (which.empty())
    for (std::size_t n = 1; n <= criteria().size(); ++n) which.push_back(n);
  bool ok = true;
  for (std::size_t n : which) ok = run_one(n) && ok;
  std::error_code ec;
  fs::remove_all(scratch_root(), ec);
  return ok ? 0 : 1;
}
