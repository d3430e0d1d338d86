#pragma once

// Time-varying frequencies and couplings.
//
// A TimeSignal maps t >= 0 to a value of fixed shape (1x1 scalar, m x 1
// frequency vector, or m x m coupling matrix). Piecewise-constant kinds are
// right-continuous at their breakpoints; times within kSnapTolerance of a
// breakpoint are treated as lying on it, so grids built as t0 + k*dt select
// pieces reliably despite rounding.

#include <optional>
#include <span>
#include <vector>

#include "kuramoto/matrix.hpp"

namespace kuramoto {

enum class SignalKind { constant, switching, sinusoid, table };
enum class Trig { sin, cos };

/// Which one-sided value to return at a discontinuity. Integrators use the
/// left limit for the end-of-step stage so a step never straddles a switch.
enum class Side { right, left };

/// One piece of a switching schedule.
struct Piece {
  double duration;
  Matrix value;
};

/// Maximal interval on which a piecewise-constant signal is constant.
struct Segment {
  double start;
  double end;
  Matrix value;
};

class TimeSignal {
 public:
  static constexpr double kSnapTolerance = 1e-9;

  static TimeSignal constant(Matrix value);
  /// Periodic schedule; pieces are laid out from t = 0 and repeat.
  static TimeSignal switching(std::vector<Piece> pieces);
  /// base + amplitude .* trig(angular_frequency * t + phase), entrywise.
  static TimeSignal sinusoid(Matrix base, Matrix amplitude, Matrix phase,
                             double angular_frequency = 1.0, Trig trig = Trig::cos);
  /// Step function: values[k] on [times[k], times[k+1]). times[0] must be 0.
  /// Without a period the last value is held forever.
  static TimeSignal table(std::vector<double> times, std::vector<Matrix> values,
                          std::optional<double> period = std::nullopt);

  SignalKind kind() const { return kind_; }
  std::optional<double> period() const { return period_; }
  /// Discontinuity times within one period (or within the table's span).
  std::span<const double> breakpoints() const { return starts_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square_value() const { return rows_ == cols_; }
  bool piecewise_constant() const;

  Matrix evaluate(double t, Side side = Side::right) const;
  /// Exact integral over [s, t].
  Matrix integrate(double s, double t) const;
  /// Constant pieces covering [s, t]; only for piecewise-constant kinds.
  std::vector<Segment> segments(double s, double t) const;
  /// All breakpoint instants (every period) lying in the open interval (s, t).
  std::vector<double> breakpoints_between(double s, double t) const;

  // Structured accessors, used by serialization and time compression.
  const std::vector<Matrix>& piece_values() const { return values_; }
  const Matrix& base() const { return base_; }
  const Matrix& amplitude() const { return amplitude_; }
  const Matrix& phase() const { return phase_; }
  double angular_frequency() const { return angular_frequency_; }
  Trig trig() const { return trig_; }

 private:
  TimeSignal() = default;

  std::size_t piece_index(double local, Side side) const;
  double reduce(double t) const;
  Matrix antiderivative(double t) const;

  SignalKind kind_ = SignalKind::constant;
  std::optional<double> period_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;

  // Piecewise-constant kinds.
  std::vector<double> starts_;
  std::vector<Matrix> values_;
  std::vector<Matrix> prefix_;  // integral from 0 to starts_[k]
  Matrix period_integral_;

  // Constant and sinusoid.
  Matrix base_;
  Matrix amplitude_;
  Matrix phase_;
  double angular_frequency_ = 1.0;
  Trig trig_ = Trig::cos;
};

struct WindowAverage {
  double start;
  double end;
  Matrix value;
};

inline Matrix evaluate(const TimeSignal& signal, double t) { return signal.evaluate(t); }
Matrix integrate_window(const TimeSignal& signal, double s, double t);
WindowAverage window_average(const TimeSignal& signal, double s, double t);
/// Returns a signal running 1/epsilon times faster: out(t) = in(t / epsilon).
TimeSignal time_compress(const TimeSignal& signal, double epsilon);

/// Evaluation grid over one period: `points` uniform samples plus every
/// breakpoint. Non-periodic signals use [0, horizon].
std::vector<double> period_grid(const TimeSignal& signal, std::size_t points = 1000,
                                double horizon = 0.0);
/// Sorted union of grids, dropping near-duplicates.
std::vector<double> merge_grids(std::span<const double> a, std::span<const double> b);

/// Throws std::invalid_argument unless [s, t] is a whole number of dt steps
/// and every breakpoint inside falls on a step boundary.
void require_aligned(const TimeSignal& signal, double s, double t, double dt);
/// Largest step <= dt_max that aligns with all breakpoints of every signal.
double aligned_step(std::span<const TimeSignal* const> signals, double dt_max);

}  // namespace kuramoto
