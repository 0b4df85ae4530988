#pragma once

#include <functional>
#include <span>
#include <vector>

namespace trendrev {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct NelderMeadOptions {
  double initial_step_fraction = 0.1;  ///< initial edge as a fraction of each box side
  double diameter_tol = 1e-9;          ///< stop when max |v_j - v_best|_inf falls below this
  int max_iterations = 2000;           ///< per run
  int restarts = 1;                    ///< fresh simplexes around the optimum after convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimisation inside a box. Trial points are projected
/// onto the box; NaN objective values count as +inf. Deterministic.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const Box& box,
                             const NelderMeadOptions& options = {});

}  // namespace trendrev
