#include "kuramoto/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kuramoto {
namespace {

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw std::invalid_argument(std::string("TimeSignal: inconsistent shape in ") + what);
}

double trig_value(Trig trig, double x) { return trig == Trig::sin ? std::sin(x) : std::cos(x); }

// Antiderivative of trig(w t + phi) with respect to t, times w.
double trig_primitive(Trig trig, double x) { return trig == Trig::sin ? -std::cos(x) : std::sin(x); }

}  // namespace

TimeSignal TimeSignal::constant(Matrix value) {
  if (value.empty()) throw std::invalid_argument("TimeSignal::constant: empty value");
  TimeSignal s;
  s.kind_ = SignalKind::constant;
  s.rows_ = value.rows();
  s.cols_ = value.cols();
  s.base_ = std::move(value);
  return s;
}

TimeSignal TimeSignal::switching(std::vector<Piece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("TimeSignal::switching: no pieces");
  std::vector<double> times;
  std::vector<Matrix> values;
  double t = 0.0;
  for (auto& p : pieces) {
    if (!(p.duration > 0.0) || !std::isfinite(p.duration))
      throw std::invalid_argument("TimeSignal::switching: piece durations must be positive");
    times.push_back(t);
    t += p.duration;
    values.push_back(std::move(p.value));
  }
  TimeSignal s = table(std::move(times), std::move(values), t);
  s.kind_ = SignalKind::switching;
  return s;
}

TimeSignal TimeSignal::sinusoid(Matrix base, Matrix amplitude, Matrix phase,
                                double angular_frequency, Trig trig) {
  if (base.empty()) throw std::invalid_argument("TimeSignal::sinusoid: empty base");
  if (!(angular_frequency > 0.0))
    throw std::invalid_argument("TimeSignal::sinusoid: angular frequency must be positive");
  require_shape(amplitude, base.rows(), base.cols(), "sinusoid amplitude");
  require_shape(phase, base.rows(), base.cols(), "sinusoid phase");
  TimeSignal s;
  s.kind_ = SignalKind::sinusoid;
  s.rows_ = base.rows();
  s.cols_ = base.cols();
  s.base_ = std::move(base);
  s.amplitude_ = std::move(amplitude);
  s.phase_ = std::move(phase);
  s.angular_frequency_ = angular_frequency;
  s.trig_ = trig;
  s.period_ = 2.0 * std::numbers::pi / angular_frequency;
  return s;
}

TimeSignal TimeSignal::table(std::vector<double> times, std::vector<Matrix> values,
                             std::optional<double> period) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("TimeSignal::table: times and values must be non-empty and of equal length");
  if (times.front() != 0.0) throw std::invalid_argument("TimeSignal::table: first time must be 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("TimeSignal::table: times must be strictly increasing");
  if (period && !(*period > times.back()))
    throw std::invalid_argument("TimeSignal::table: period must exceed the last breakpoint");

  TimeSignal s;
  s.kind_ = SignalKind::table;
  s.rows_ = values.front().rows();
  s.cols_ = values.front().cols();
  for (const auto& v : values) require_shape(v, s.rows_, s.cols_, "table value");
  s.starts_ = std::move(times);
  s.values_ = std::move(values);
  s.period_ = period;

  s.prefix_.reserve(s.starts_.size());
  Matrix acc(s.rows_, s.cols_);
  for (std::size_t k = 0; k < s.starts_.size(); ++k) {
    s.prefix_.push_back(acc);
    const double end = k + 1 < s.starts_.size() ? s.starts_[k + 1] : period.value_or(s.starts_[k]);
    acc += s.values_[k] * (end - s.starts_[k]);
  }
  s.period_integral_ = acc;
  return s;
}

bool TimeSignal::piecewise_constant() const {
  return kind_ == SignalKind::switching || kind_ == SignalKind::table || kind_ == SignalKind::constant;
}

double TimeSignal::reduce(double t) const {
  if (!period_) return t;
  const double p = *period_;
  double local = std::fmod(t, p);
  if (local < 0.0) local += p;
  if (p - local <= kSnapTolerance * std::max(1.0, p)) local = 0.0;
  return local;
}

std::size_t TimeSignal::piece_index(double local, Side side) const {
  const double tol = kSnapTolerance * std::max(1.0, period_.value_or(std::abs(local)));
  if (side == Side::right) {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), local + tol);
    return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  }
  auto it = std::lower_bound(starts_.begin(), starts_.end(), local - tol);
  if (it == starts_.begin()) return starts_.size();  // left of the first breakpoint
  return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
}

Matrix TimeSignal::evaluate(double t, Side side) const {
  switch (kind_) {
    case SignalKind::constant:
      return base_;
    case SignalKind::sinusoid: {
      Matrix out = base_;
      for (std::size_t k = 0; k < out.data().size(); ++k)
        out.data()[k] += amplitude_.data()[k] *
                         trig_value(trig_, angular_frequency_ * t + phase_.data()[k]);
      return out;
    }
    case SignalKind::switching:
    case SignalKind::table: {
      const double local = reduce(t);
      std::size_t k = piece_index(local, side);
      if (k == starts_.size()) {
        // Left limit at local time 0: previous period's last piece, or the
        // first piece at t = 0 itself.
        k = (period_ && t > kSnapTolerance) ? starts_.size() - 1 : 0;
      }
      return values_[k];
    }
  }
  return base_;
}

Matrix TimeSignal::antiderivative(double t) const {
  switch (kind_) {
    case SignalKind::constant:
      return base_ * t;
    case SignalKind::sinusoid: {
      Matrix out = base_ * t;
      for (std::size_t k = 0; k < out.data().size(); ++k) {
        const double a = amplitude_.data()[k];
        if (a == 0.0) continue;
        const double ph = phase_.data()[k];
        out.data()[k] += a * (trig_primitive(trig_, angular_frequency_ * t + ph) -
                              trig_primitive(trig_, ph)) /
                         angular_frequency_;
      }
      return out;
    }
    case SignalKind::switching:
    case SignalKind::table: {
      const double local = reduce(t);
      const std::size_t k = piece_index(local, Side::right);
      Matrix out = prefix_[k] + values_[k] * (local - starts_[k]);
      if (period_) {
        const double periods = std::round((t - local) / *period_);
        if (periods != 0.0) out += period_integral_ * periods;
      }
      return out;
    }
  }
  return base_;
}

Matrix TimeSignal::integrate(double s, double t) const {
  if (t < s) throw std::invalid_argument("integrate_window: end time precedes start time");
  if (s < 0.0) throw std::invalid_argument("integrate_window: negative start time");
  if (t == s) return Matrix(rows_, cols_);
  return antiderivative(t) - antiderivative(s);
}

std::vector<Segment> TimeSignal::segments(double s, double t) const {
  if (!piecewise_constant())
    throw std::invalid_argument("TimeSignal::segments: signal is not piecewise constant");
  if (t < s) throw std::invalid_argument("TimeSignal::segments: end precedes start");
  std::vector<Segment> out;
  if (kind_ == SignalKind::constant) {
    out.push_back({s, t, base_});
    return out;
  }
  double cur = s;
  while (cur < t) {
    const double local = reduce(cur);
    const std::size_t k = piece_index(local, Side::right);
    double next;
    if (period_) {
      const double origin = cur - local;
      next = origin + (k + 1 < starts_.size() ? starts_[k + 1] : *period_);
    } else {
      next = k + 1 < starts_.size() ? starts_[k + 1] : std::numeric_limits<double>::infinity();
    }
    const double end = std::min(next, t);
    if (end - cur > kSnapTolerance * std::max(1.0, std::abs(cur)) || out.empty())
      out.push_back({cur, end, values_[k]});
    else
      out.back().end = end;
    if (end >= t) break;
    cur = end;
  }
  return out;
}

std::vector<double> TimeSignal::breakpoints_between(double s, double t) const {
  std::vector<double> out;
  if (kind_ != SignalKind::switching && kind_ != SignalKind::table) return out;
  const double tol = kSnapTolerance * std::max(1.0, std::abs(t));
  if (!period_) {
    for (double b : starts_)
      if (b > s + tol && b < t - tol) out.push_back(b);
    return out;
  }
  const double p = *period_;
  const auto first = static_cast<long long>(std::floor(s / p));
  const auto last = static_cast<long long>(std::ceil(t / p));
  for (long long n = first; n <= last; ++n)
    for (double b : starts_) {
      const double x = static_cast<double>(n) * p + b;
      if (x > s + tol && x < t - tol) out.push_back(x);
    }
  return out;
}

Matrix integrate_window(const TimeSignal& signal, double s, double t) { return signal.integrate(s, t); }

WindowAverage window_average(const TimeSignal& signal, double s, double t) {
  if (!(t > s)) throw std::invalid_argument("window_average: window must have positive length");
  return {s, t, signal.integrate(s, t) * (1.0 / (t - s))};
}

TimeSignal time_compress(const TimeSignal& signal, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("time_compress: epsilon must be positive");
  switch (signal.kind()) {
    case SignalKind::constant:
      return signal;
    case SignalKind::sinusoid:
      return TimeSignal::sinusoid(signal.base(), signal.amplitude(), signal.phase(),
                                  signal.angular_frequency() / epsilon, signal.trig());
    case SignalKind::switching: {
      const auto starts = signal.breakpoints();
      std::vector<Piece> pieces;
      for (std::size_t k = 0; k < starts.size(); ++k) {
        const double end = k + 1 < starts.size() ? starts[k + 1] : *signal.period();
        pieces.push_back({(end - starts[k]) * epsilon, signal.piece_values()[k]});
      }
      return TimeSignal::switching(std::move(pieces));
    }
    case SignalKind::table: {
      std::vector<double> times(signal.breakpoints().begin(), signal.breakpoints().end());
      for (double& x : times) x *= epsilon;
      std::optional<double> period;
      if (signal.period()) period = *signal.period() * epsilon;
      return TimeSignal::table(std::move(times), signal.piece_values(), period);
    }
  }
  return signal;
}

std::vector<double> period_grid(const TimeSignal& signal, std::size_t points, double horizon) {
  const double span = signal.period().value_or(horizon);
  std::vector<double> grid;
  if (!(span > 0.0) || points == 0) {
    grid.push_back(0.0);
  } else {
    grid.reserve(points + signal.breakpoints().size());
    for (std::size_t i = 0; i < points; ++i)
      grid.push_back(span * static_cast<double>(i) / static_cast<double>(points));
  }
  std::vector<double> breaks;
  for (double b : signal.breakpoints())
    if (b <= std::max(span, 0.0)) breaks.push_back(b);
  return merge_grids(grid, breaks);
}

std::vector<double> merge_grids(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  for (double x : out)
    if (dedup.empty() || x - dedup.back() > TimeSignal::kSnapTolerance * std::max(1.0, std::abs(x)))
      dedup.push_back(x);
  return dedup;
}

namespace {

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-6; }

}  // namespace

void require_aligned(const TimeSignal& signal, double s, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (t < s) throw std::invalid_argument("end time precedes start time");
  if (!near_integer((t - s) / dt))
    throw std::invalid_argument("time step " + std::to_string(dt) +
                                " does not divide the interval length " + std::to_string(t - s));
  for (double b : signal.breakpoints_between(s, t))
    if (!near_integer((b - s) / dt))
      throw std::invalid_argument("time step " + std::to_string(dt) +
                                  " is misaligned with the breakpoint at t = " + std::to_string(b));
}

double aligned_step(std::span<const TimeSignal* const> signals, double dt_max) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("aligned_step: dt must be positive");
  std::vector<double> lengths;
  for (const TimeSignal* sig : signals) {
    if (sig->kind() != SignalKind::switching && sig->kind() != SignalKind::table) continue;
    const auto starts = sig->breakpoints();
    for (std::size_t k = 1; k < starts.size(); ++k) lengths.push_back(starts[k] - starts[k - 1]);
    if (sig->period()) lengths.push_back(*sig->period() - starts.back());
  }
  if (lengths.empty()) return dt_max;
  const double base = *std::min_element(lengths.begin(), lengths.end());
  const auto first = static_cast<long long>(std::ceil(base / dt_max - 1e-9));
  for (long long n = std::max(1LL, first); n <= first + 100000; ++n) {
    const double step = base / static_cast<double>(n);
    if (std::all_of(lengths.begin(), lengths.end(), [&](double len) { return near_integer(len / step); }))
      return step;
  }
  throw std::invalid_argument("aligned_step: breakpoints are not commensurate with any step <= dt");
}

}  // namespace kuramoto
