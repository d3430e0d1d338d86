#pragma once

// The three bundled example networks. Matrices are stored exactly
// as given; couplings are their off-diagonal entries.

#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

struct SwitchingInstance {
  Matrix printed1, printed2;  // as printed
  Vector omega1, omega2;
  double half_period = 0.0;   // duration of each piece
  /// Piece order of both signals: first (omega2, L2), then (omega1, L1) when
  /// second_first is set, else (omega1, L1) first.
  bool second_first = false;

  TimeSignal omega() const;
  TimeSignal coupling() const;
  double period() const { return 2.0 * half_period; }
};

/// Five oscillators, frequencies and couplings switching every 2 s.
SwitchingInstance ap_instance();
/// Five oscillators with symmetric printed matrices; half period 0.5 s so
/// that one full cycle takes 1 s before time compression.
SwitchingInstance fast_instance();

}  // namespace kuramoto
