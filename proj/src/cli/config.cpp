#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kuramoto/cli.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto_cli_internal.hpp"

namespace kuramoto::cli {

using nlohmann::ordered_json;

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": JSON syntax error (" + e.what() + ")");
  }
}

namespace detail {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string join(const std::string& base, std::size_t index) { return base + "[" + std::to_string(index) + "]"; }

const ordered_json& require(const ordered_json& j, const std::string& key, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(field, key), "missing required field");
  return *it;
}

const ordered_json* find(const ordered_json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const ordered_json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

double number(const ordered_json& j, const std::string& key, const std::string& field) {
  return as_number(require(j, key, field), join(field, key));
}

double number_or(const ordered_json& j, const std::string& key, const std::string& field, double fallback) {
  const auto* v = find(j, key);
  return v ? as_number(*v, join(field, key)) : fallback;
}

double positive(const ordered_json& j, const std::string& key, const std::string& field,
                std::optional<double> fallback) {
  const double v = fallback ? number_or(j, key, field, *fallback) : number(j, key, field);
  if (!(v > 0.0)) throw ConfigError(join(field, key), "must be positive");
  return v;
}

std::size_t count(const ordered_json& j, const std::string& key, const std::string& field,
                  std::optional<std::size_t> fallback) {
  const auto* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(field, key), "missing required field");
  }
  if (!v->is_number_integer() || v->get<long long>() < 0)
    throw ConfigError(join(field, key), "expected a nonnegative integer");
  return v->get<std::size_t>();
}

std::uint64_t seed(const ordered_json& j, const std::string& key, const std::string& field, std::uint64_t fallback) {
  const auto* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
    throw ConfigError(join(field, key), "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

double radius(const ordered_json& j, const std::string& key, const std::string& field) {
  const double r = number(j, key, field);
  if (!(r >= 0.0 && r < std::acos(0.0))) throw ConfigError(join(field, key), "r must lie in [0, pi/2), got " + format_number(r));
  return r;
}

std::vector<double> numbers(const ordered_json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], join(field, k)));
  return out;
}

std::pair<double, double> range(const ordered_json& j, const std::string& key, const std::string& field,
                                std::pair<double, double> fallback) {
  const auto* v = find(j, key);
  if (!v) return fallback;
  const auto xs = numbers(*v, join(field, key));
  if (xs.size() != 2 || !(xs[0] <= xs[1])) throw ConfigError(join(field, key), "expected [low, high] with low <= high");
  return {xs[0], xs[1]};
}

std::string text(const ordered_json& j, const std::string& key, const std::string& field,
                 std::optional<std::string> fallback) {
  const auto* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(field, key), "missing required field");
  }
  if (!v->is_string()) throw ConfigError(join(field, key), "expected a string");
  return v->get<std::string>();
}

}  // namespace detail

namespace {

using namespace detail;

Matrix parse_value(const ordered_json& j, const std::string& field, ValueShape shape, std::size_t expected) {
  if (shape == ValueShape::column) {
    const auto xs = numbers(j, field);
    if (xs.empty()) throw ConfigError(field, "empty vector");
    if (expected && xs.size() != expected)
      throw ConfigError(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(xs.size()));
    return Matrix::column(xs);
  }
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
  const std::size_t m = j.size();
  if (expected && m != expected)
    throw ConfigError(field, "expected " + std::to_string(expected) + " rows, got " + std::to_string(m));
  Matrix out(m, m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = numbers(j[i], join(field, i));
    if (row.size() != m) throw ConfigError(join(field, i), "row length differs from the number of rows");
    for (std::size_t k = 0; k < m; ++k) out(i, k) = row[k];
  }
  return out;
}

}  // namespace

TimeSignal parse_signal(const ordered_json& j, const std::string& field, ValueShape shape) {
  if (!j.is_object()) throw ConfigError(field, "expected a signal object");
  const std::string kind = text(j, "kind", field, std::nullopt);
  const std::string form = text(j, "matrix_form", field, std::string("adjacency"));
  if (form != "adjacency" && form != "negated_laplacian")
    throw ConfigError(join(field, "matrix_form"), "expected \"adjacency\" or \"negated_laplacian\"");
  if (shape == ValueShape::column && find(j, "matrix_form"))
    throw ConfigError(join(field, "matrix_form"), "only allowed on square-valued signals");

  std::size_t dim = 0;
  auto value = [&](const ordered_json& v, const std::string& f) {
    Matrix out = parse_value(v, f, shape, dim);
    if (shape == ValueShape::square) out = coupling_from_negated_laplacian(out);
    dim = out.rows();
    return out;
  };
  // Sinusoid parts keep their diagonal as given (phases are not couplings).
  auto raw = [&](const ordered_json& v, const std::string& f) {
    Matrix out = parse_value(v, f, shape, dim);
    dim = out.rows();
    return out;
  };

  try {
    if (kind == "constant") return TimeSignal::constant(value(require(j, "value", field), join(field, "value")));
    if (kind == "switching") {
      const auto& pieces = require(j, "pieces", field);
      const std::string pf = join(field, "pieces");
      if (!pieces.is_array() || pieces.empty()) throw ConfigError(pf, "expected a non-empty array of pieces");
      std::vector<Piece> out;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        const std::string f = join(pf, k);
        const double d = positive(pieces[k], "duration", f, std::nullopt);
        out.push_back({d, value(require(pieces[k], "value", f), join(f, "value"))});
      }
      if (const auto* p = find(j, "period")) {
        double total = 0.0;
        for (const auto& pc : out) total += pc.duration;
        if (std::abs(as_number(*p, join(field, "period")) - total) > 1e-9 * std::max(1.0, total))
          throw ConfigError(join(field, "period"), "does not equal the sum of piece durations");
      }
      return TimeSignal::switching(std::move(out));
    }
    if (kind == "sinusoid") {
      Matrix base = value(require(j, "base", field), join(field, "base"));
      Matrix amp = value(require(j, "amplitude", field), join(field, "amplitude"));
      Matrix phase = raw(require(j, "phase", field), join(field, "phase"));
      const double w = positive(j, "angular_frequency", field, 1.0);
      const std::string trig = text(j, "trig", field, std::string("cos"));
      if (trig != "sin" && trig != "cos") throw ConfigError(join(field, "trig"), "expected \"sin\" or \"cos\"");
      if (const auto* p = find(j, "period")) {
        const double want = 2.0 * std::acos(-1.0) / w;
        if (std::abs(as_number(*p, join(field, "period")) - want) > 1e-9 * want)
          throw ConfigError(join(field, "period"), "inconsistent with angular_frequency");
      }
      return TimeSignal::sinusoid(std::move(base), std::move(amp), std::move(phase), w,
                                  trig == "sin" ? Trig::sin : Trig::cos);
    }
    if (kind == "table") {
      const auto times = numbers(require(j, "times", field), join(field, "times"));
      const auto& vals = require(j, "values", field);
      if (!vals.is_array()) throw ConfigError(join(field, "values"), "expected an array");
      std::vector<Matrix> values;
      for (std::size_t k = 0; k < vals.size(); ++k) values.push_back(value(vals[k], join(join(field, "values"), k)));
      std::optional<double> period;
      if (find(j, "period")) period = positive(j, "period", field, std::nullopt);
      return TimeSignal::table(times, std::move(values), period);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(join(field, "kind"), "unknown signal kind '" + kind + "'");
}

std::string config_hash(const ordered_json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace kuramoto::cli
