#include "kuramoto/instances.hpp"

#include "kuramoto/graph.hpp"

namespace kuramoto {

TimeSignal SwitchingInstance::omega() const {
  const Matrix w1 = Matrix::column(omega1), w2 = Matrix::column(omega2);
  if (second_first) return TimeSignal::switching({{half_period, w2}, {half_period, w1}});
  return TimeSignal::switching({{half_period, w1}, {half_period, w2}});
}

TimeSignal SwitchingInstance::coupling() const {
  const Matrix a1 = coupling_from_negated_laplacian(printed1);
  const Matrix a2 = coupling_from_negated_laplacian(printed2);
  if (second_first) return TimeSignal::switching({{half_period, a2}, {half_period, a1}});
  return TimeSignal::switching({{half_period, a1}, {half_period, a2}});
}

SwitchingInstance ap_instance() {
  SwitchingInstance s;
  s.omega1 = {0.1294, 1.9765, 1.8790, 0.7331, 1.1332};
  s.omega2 = {1.9578, 0.5295, 1.1234, 1.3591, 2.1786};
  s.printed1 = Matrix{{-4.5343, 0.5795, 1.7331, 0.9795, 1.2422},
                      {0.2241, -1.9971, 0.4334, 0.2703, 1.0692},
                      {1.6323, -0.0286, -3.5243, 1.2298, 0.6908},
                      {0.1402, 0.7296, 0.6795, -2.4363, 0.8870},
                      {0.5957, 0.4723, 0.4909, -0.0119, -1.5470}};
  s.printed2 = Matrix{{-4.6960, 0.3018, 1.7915, 1.6922, 0.9105},
                      {0.1732, -2.3331, 1.6492, 0.3674, 0.1433},
                      {1.0687, 0.4723, -3.1947, 0.5293, 1.1245},
                      {0.7140, 1.1625, 0.0833, -3.1210, 1.1612},
                      {1.3104, 0.1241, 1.3107, 1.1887, -3.9339}};
  s.half_period = 2.0;
  s.second_first = true;
  return s;
}

SwitchingInstance fast_instance() {
  SwitchingInstance s;
  s.omega1 = {1.3468, 0.0850, 1.8434, 1.9853, 1.1750};
  s.omega2 = {2.2854, 0.6908, 2.4129, 0.5544, 2.7517};
  s.printed1 = Matrix{{-1.6793, -0.3012, 2.3645, -0.2241, -0.1599},
                      {-0.3012, -1.0878, 1.0473, -0.4689, 0.8106},
                      {2.3645, 1.0473, -3.3379, -0.4142, 0.3403},
                      {-0.2241, -0.4689, -0.4142, -0.4065, 1.5137},
                      {-0.1599, 0.8106, 0.3403, 1.5137, -2.5046}};
  s.printed2 = Matrix{{-8.4835, 1.6123, 2.5756, 2.1175, 2.1780},
                      {1.6123, -4.3012, 2.2760, 0.5141, -0.1013},
                      {2.5756, 2.2760, -8.3439, 2.1106, 1.3817},
                      {2.1175, 0.5141, 2.1106, -4.6359, -0.1064},
                      {2.1780, -0.1013, 1.3817, -0.1064, -3.3521}};
  s.half_period = 0.5;
  return s;
}

}  // namespace kuramoto
