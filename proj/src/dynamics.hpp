// Copyright (c) 2026 The rankent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "panel.hpp"

namespace rankent::dynamics {

// One growth observation built from a pair of consecutive available years.
// u is the mean log size over the pair, udot the relative growth rate per
// year; a gap between observations is absorbed by the (t2 - t1) divisor.
struct DynamicsPoint {
  double u = 0.0;
  double udot = 0.0;
  std::string unit_id;
  std::pair<long long, long long> period{0, 0};
};

struct BinnedDynamics {
  std::vector<double> bin_center;
  std::vector<double> mean_udot;
  std::vector<double> std_udot;
  std::vector<long long> count;
  double delta_u = 0.25;
};

// Least-squares fit of mean growth rate against k1 + kq * e^{(q-1)u}.
// When the exponential term is statistically indistinguishable from drift
// (|kq| below twice its standard error, or exactly zero), the fit is
// reported with well_defined=false and q forced to 1.
struct DynamicsFit {
  double k1 = 0.0;
  double kq = 0.0;
  double q = 1.0;
  bool well_defined = false;
  double correlation = 0.0;
  double k1_std = 0.0;
  double kq_std = 0.0;
  double q_std = 0.0;
  double sse = 0.0;
  long long n_bins = 0;
};

// Diagnostic alternative: plain linear regression udot = a + b*u.
struct LinearDynamicsFit {
  double intercept = 0.0;
  double slope = 0.0;
  double correlation = 0.0;
};

// One point per unit per consecutive available-year pair; units observed
// in a single year contribute nothing.  Records are re-validated here so
// the function is safe on hand-built panels.
std::vector<DynamicsPoint> panel_to_points(
    const std::vector<PanelRecord>& panel);

// Bins points on a grid anchored at min(u) with closed-left/open-right
// intervals, then drops bins whose count falls below min_frac times the
// largest bin count.
BinnedDynamics bin_points(const std::vector<DynamicsPoint>& points,
                          double delta_u = 0.25, double min_frac = 0.15);

// Needs >= 4 surviving bins.  `weighted` scales residuals by
// sqrt(count)/std (standard error weighting); default is unweighted.
DynamicsFit fit_dynamics(const BinnedDynamics& binned, bool weighted = false);

LinearDynamicsFit fit_dynamics_linear(const BinnedDynamics& binned);

}  // namespace rankent::dynamics

