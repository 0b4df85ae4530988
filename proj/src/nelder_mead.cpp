#include "trendrev/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trendrev/error.hpp"

namespace trendrev {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Simplex {
  std::vector<std::vector<double>> vertex;
  std::vector<double> value;
};

void project(std::vector<double>& x, const Box& box) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lower[i], box.upper[i]);
}

double evaluate(const Objective& f, const std::vector<double>& x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

// Sorts vertices by value; equal values keep their previous order.
void order(Simplex& s) {
  std::vector<std::size_t> idx(s.value.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.value[a] < s.value[b]; });
  Simplex sorted;
  for (std::size_t i : idx) {
    sorted.vertex.push_back(std::move(s.vertex[i]));
    sorted.value.push_back(s.value[i]);
  }
  s = std::move(sorted);
}

double diameter(const Simplex& s) {
  double d = 0.0;
  for (std::size_t j = 1; j < s.vertex.size(); ++j) {
    for (std::size_t i = 0; i < s.vertex[j].size(); ++i) d = std::max(d, std::abs(s.vertex[j][i] - s.vertex[0][i]));
  }
  return d;
}

std::vector<double> affine(const std::vector<double>& base, const std::vector<double>& toward, double t,
                           const Box& box) {
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + t * (toward[i] - base[i]);
  project(out, box);
  return out;
}

Simplex initial_simplex(const Objective& f, const std::vector<double>& start, const Box& box, double fraction) {
  Simplex s;
  s.vertex.push_back(start);
  for (std::size_t i = 0; i < start.size(); ++i) {
    std::vector<double> v = start;
    const double step = fraction * (box.upper[i] - box.lower[i]);
    v[i] = (v[i] + step <= box.upper[i]) ? v[i] + step : v[i] - step;
    project(v, box);
    s.vertex.push_back(std::move(v));
  }
  for (const auto& v : s.vertex) s.value.push_back(evaluate(f, v));
  return s;
}

// One Nelder-Mead run; returns iterations used and whether the diameter test fired.
std::pair<int, bool> run(const Objective& f, Simplex& s, const Box& box, const NelderMeadOptions& opt) {
  const std::size_t n = s.vertex.size() - 1;
  int iter = 0;
  for (;; ++iter) {
    order(s);
    if (diameter(s) < opt.diameter_tol) return {iter, true};
    if (iter >= opt.max_iterations) return {iter, false};

    std::vector<double> centroid(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s.vertex[j][i] / static_cast<double>(n);
    }
    const auto& worst = s.vertex[n];
    const double f_worst = s.value[n];

    auto reflected = affine(centroid, worst, -kReflect, box);
    const double f_reflected = evaluate(f, reflected);

    if (f_reflected < s.value[0]) {
      auto expanded = affine(centroid, reflected, kExpand, box);
      const double f_expanded = evaluate(f, expanded);
      if (f_expanded < f_reflected) {
        s.vertex[n] = std::move(expanded);
        s.value[n] = f_expanded;
      } else {
        s.vertex[n] = std::move(reflected);
        s.value[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < s.value[n - 1]) {
      s.vertex[n] = std::move(reflected);
      s.value[n] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < f_worst;
    auto contracted = affine(centroid, outside ? reflected : worst, kContract, box);
    const double f_contracted = evaluate(f, contracted);
    if (outside ? f_contracted <= f_reflected : f_contracted < f_worst) {
      s.vertex[n] = std::move(contracted);
      s.value[n] = f_contracted;
      continue;
    }

    for (std::size_t j = 1; j <= n; ++j) {
      s.vertex[j] = affine(s.vertex[0], s.vertex[j], kShrink, box);
      s.value[j] = evaluate(f, s.vertex[j]);
    }
  }
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const Box& box,
                             const NelderMeadOptions& options) {
  if (start.empty() || box.lower.size() != start.size() || box.upper.size() != start.size()) {
    throw Error(ErrorKind::invalid_argument, "start and box dimensions differ");
  }
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (!(box.lower[i] < box.upper[i])) throw Error(ErrorKind::invalid_argument, "empty box side");
  }
  project(start, box);

  NelderMeadResult result;
  Simplex s = initial_simplex(f, start, box, options.initial_step_fraction);
  auto [iters, converged] = run(f, s, box, options);
  result.iterations = iters;
  result.converged = converged;

  for (int r = 0; r < options.restarts && result.converged; ++r) {
    const double before = s.value[0];
    Simplex fresh = initial_simplex(f, s.vertex[0], box, options.initial_step_fraction * 0.1);
    auto [more, ok] = run(f, fresh, box, options);
    result.iterations += more;
    if (fresh.value[0] <= before) s = std::move(fresh);
    result.converged = ok;
  }

  order(s);
  result.x = s.vertex[0];
  result.value = s.value[0];
  return result;
}

}  // namespace trendrev
