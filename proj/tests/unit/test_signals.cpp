#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kuramoto/instances.hpp"
#include "kuramoto/signals.hpp"

using namespace kuramoto;

namespace {

Matrix col(std::initializer_list<double> v) { return Matrix::column(std::vector<double>(v)); }

TimeSignal two_piece(double a, double b, double d = 2.0) {
  return TimeSignal::switching({{d, Matrix::scalar(a)}, {d, Matrix::scalar(b)}});
}

double scalar(const Matrix& m) { return m(0, 0); }

}  // namespace

TEST_CASE("evaluate constant, switching and sinusoid") {
  CHECK(scalar(TimeSignal::constant(Matrix::scalar(1.5)).evaluate(7.0)) == 1.5);

  const auto w1 = col({1, 2}), w2 = col({3, 4});
  const auto s = TimeSignal::switching({{2.0, w1}, {2.0, w2}});
  CHECK(s.period().value() == doctest::Approx(4.0));
  CHECK(s.evaluate(2.0) == w2);
  CHECK(s.evaluate(1.999) == w1);
  CHECK(s.evaluate(4.0) == w1);
  CHECK(s.evaluate(2.0, Side::left) == w1);
  CHECK(s.evaluate(4.0, Side::left) == w2);
  CHECK(s.evaluate(0.0, Side::left) == w1);

  const auto sin_sig =
      TimeSignal::sinusoid(Matrix::scalar(1.0), Matrix::scalar(0.1), Matrix::scalar(0.2), 1.0, Trig::cos);
  CHECK(scalar(sin_sig.evaluate(0.0)) == doctest::Approx(1.0 + 0.1 * std::cos(0.2)).epsilon(1e-15));
}

TEST_CASE("integrate_window closed forms") {
  CHECK(scalar(integrate_window(TimeSignal::constant(Matrix::scalar(2.0)), 0.0, 3.0)) == doctest::Approx(6.0));
  CHECK(scalar(integrate_window(two_piece(5.0, -1.0, 1.0), 0.0, 2.0)) == doctest::Approx(4.0));
  const auto c = TimeSignal::sinusoid(Matrix::scalar(0.0), Matrix::scalar(0.1), Matrix::scalar(0.0), 1.0, Trig::cos);
  CHECK(std::abs(scalar(integrate_window(c, 0.0, 2.0 * std::numbers::pi))) < 1e-9);
  CHECK_THROWS_AS(integrate_window(c, 2.0, 1.0), std::invalid_argument);
  // Many periods plus partial pieces.
  CHECK(scalar(integrate_window(two_piece(5.0, -1.0, 1.0), 0.5, 10.25)) ==
        doctest::Approx(0.5 * 5 - 1 + 4 * 4 + 0.25 * 5).epsilon(1e-12));
}

TEST_CASE("window_average") {
  const Matrix m1{{0, 1}, {2, 0}}, m2{{0, 3}, {-2, 0}};
  const auto s = TimeSignal::switching({{2.0, m1}, {2.0, m2}});
  CHECK(max_abs_diff(window_average(s, 0.0, 4.0).value, (m1 + m2) * 0.5) < 1e-14);
  CHECK(max_abs_diff(window_average(TimeSignal::constant(m1), 1.3, 2.9).value, m1) < 1e-14);
  CHECK_THROWS_AS(window_average(s, 1.0, 1.0), std::invalid_argument);

  const auto fast = fast_instance();
  const Matrix avg = window_average(fast.coupling(), 0.0, fast.period()).value;
  Matrix expect = (fast.printed1 + fast.printed2) * 0.5;
  for (std::size_t i = 0; i < 5; ++i) expect(i, i) = 0.0;
  CHECK(max_abs_diff(avg, expect) < 1e-12);
}

TEST_CASE("time_compress") {
  const auto s = two_piece(1.0, 2.0);
  const auto c = time_compress(s, 0.1);
  CHECK(c.period().value() == doctest::Approx(0.4));
  CHECK(scalar(c.evaluate(0.25)) == 2.0);
  CHECK(scalar(c.evaluate(0.15)) == 1.0);
  const auto same = time_compress(s, 1.0);
  for (double t : {0.0, 1.0, 2.0, 3.3, 7.9}) CHECK(same.evaluate(t) == s.evaluate(t));
  CHECK(scalar(window_average(c, 0.0, 0.4).value) == doctest::Approx(scalar(window_average(s, 0.0, 4.0).value)));
  CHECK_THROWS_AS(time_compress(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(time_compress(s, -1.0), std::invalid_argument);

  const auto sin_sig = TimeSignal::sinusoid(Matrix::scalar(1.0), Matrix::scalar(0.5), Matrix::scalar(0.3));
  const auto sc = time_compress(sin_sig, 0.25);
  CHECK(sc.period().value() == doctest::Approx(0.5 * std::numbers::pi));
  CHECK(scalar(sc.evaluate(0.7)) == doctest::Approx(scalar(sin_sig.evaluate(2.8))));
}

TEST_CASE("periodicity, additivity and compression properties") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto sw = two_piece(0.3, -1.7, 1.25);
  const auto sn = TimeSignal::sinusoid(col({0.0, 1.0}), col({0.4, 0.2}), col({0.1, -0.5}), 2.0, Trig::sin);
  const auto tb = TimeSignal::table({0.0, 0.4, 1.1}, {Matrix::scalar(1.0), Matrix::scalar(-2.0), Matrix::scalar(0.5)}, 2.0);
  for (const TimeSignal* s : {&sw, &sn, &tb}) {
    const double p = s->period().value();
    for (int k = 0; k < 200; ++k) {
      const double t = 10.0 * p * u(gen);
      CHECK(max_abs_diff(s->evaluate(t + p), s->evaluate(t)) < 1e-12);
    }
    for (int k = 0; k < 50; ++k) {
      double a = 10 * u(gen), b = 10 * u(gen), c = 10 * u(gen);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      CHECK(max_abs_diff(integrate_window(*s, a, b) + integrate_window(*s, b, c), integrate_window(*s, a, c)) < 1e-9);
    }
    for (double eps : {0.1, 0.37, 3.0}) {
      const auto c = time_compress(*s, eps);
      const double s0 = 5 * u(gen), len = 4 * u(gen) + 0.1;
      CHECK(max_abs_diff(window_average(c, eps * s0, eps * (s0 + len)).value,
                         window_average(*s, s0, s0 + len).value) < 1e-9);
    }
  }
  const auto zero_base = TimeSignal::sinusoid(col({0, 0, 0}), col({1, 2, 3}), col({0.4, 1.0, -2.0}));
  for (int k = 0; k < 20; ++k) {
    const double s0 = 20 * u(gen);
    CHECK(integrate_window(zero_base, s0, s0 + 2 * std::numbers::pi).max_abs() < 1e-9);
  }
}

TEST_CASE("table signals and breakpoint helpers") {
  const auto tb = TimeSignal::table({0.0, 1.0, 3.0}, {Matrix::scalar(2.0), Matrix::scalar(4.0), Matrix::scalar(-1.0)});
  CHECK_FALSE(tb.period().has_value());
  CHECK(scalar(tb.evaluate(100.0)) == -1.0);
  CHECK(scalar(integrate_window(tb, 0.0, 4.0)) == doctest::Approx(2 + 8 - 1));
  CHECK_THROWS_AS(TimeSignal::table({0.5}, {Matrix::scalar(1.0)}), std::invalid_argument);
  CHECK_THROWS_AS(TimeSignal::table({0.0, 0.0}, {Matrix::scalar(1.0), Matrix::scalar(1.0)}), std::invalid_argument);

  const auto sw = two_piece(1.0, 2.0);
  const auto bps = sw.breakpoints_between(0.0, 9.0);
  REQUIRE(bps.size() >= 4);
  CHECK(bps[0] == doctest::Approx(2.0));
  CHECK(bps[1] == doctest::Approx(4.0));
  CHECK_NOTHROW(require_aligned(sw, 0.0, 10.0, 1e-3));
  CHECK_THROWS_AS(require_aligned(sw, 0.0, 10.0, 0.3), std::invalid_argument);

  const auto fast = time_compress(two_piece(1.0, 2.0, 0.5), 1.0 / 80.0);
  const TimeSignal* sigs[] = {&fast};
  const double dt = aligned_step(sigs, 1e-3);
  CHECK(dt <= 1e-3);
  CHECK(dt == doctest::Approx(0.00625 / 7));
  CHECK_NOTHROW(require_aligned(fast, 0.0, 100.0, dt));
}
