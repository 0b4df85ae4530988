#include "trendrev/regression.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "trendrev/empirics.hpp"
#include "trendrev/error.hpp"

namespace trendrev {

namespace {

struct Filtered {
  std::vector<double> x, y;
};

Filtered filter(std::span<const double> x, std::span<const double> y, double cut) {
  if (x.size() != y.size()) throw Error(ErrorKind::invalid_argument, "x and y sizes differ");
  if (!(cut > 0.0)) throw Error(ErrorKind::invalid_argument, "outlier cut must be > 0");
  Filtered out;
  out.x.reserve(x.size());
  out.y.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > cut || std::abs(y[i]) > cut) continue;
    out.x.push_back(x[i]);
    out.y.push_back(y[i]);
  }
  return out;
}

void split(std::span<const ReturnPair> pairs, std::vector<double>& x, std::vector<double>& y) {
  x.resize(pairs.size());
  y.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x[i] = pairs[i].x;
    y[i] = pairs[i].y;
  }
}

void require_points(std::size_t have, std::size_t need) {
  if (have < need) {
    throw Error(ErrorKind::insufficient_data,
                "insufficient data: " + std::to_string(have) + " points after filtering, need " + std::to_string(need));
  }
}

}  // namespace

LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys, double outlier_cut) {
  const Filtered d = filter(xs, ys, outlier_cut);
  const std::size_t n = d.x.size();
  require_points(n, kMinLinearPoints);

  double mx = 0.0, my = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += d.x[i];
    my += d.y[i];
    max_abs = std::max(max_abs, std::abs(d.x[i]));
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = d.x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (d.y[i] - my);
  }
  if (!(sxx > 1e-24 * static_cast<double>(n) * std::max(1.0, max_abs * max_abs))) {
    throw Error(ErrorKind::degenerate_design, "degenerate design: x has no spread");
  }

  LinearFit fit;
  fit.n_kept = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.y[i] - fit.intercept - fit.slope * d.x[i];
    ssr += r * r;
  }
  fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

LinearFit fit_linear(std::span<const ReturnPair> pairs, double outlier_cut) {
  std::vector<double> x, y;
  split(pairs, x, y);
  return fit_linear(x, y, outlier_cut);
}

CubicFit fit_cubic(std::span<const double> xs, std::span<const double> ys, double outlier_cut) {
  const Filtered d = filter(xs, ys, outlier_cut);
  const auto n = static_cast<Eigen::Index>(d.x.size());
  require_points(d.x.size(), kMinCubicPoints);

  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = d.x[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = x;
    design(i, 2) = x * x;
    design(i, 3) = x * x * x;
    rhs(i) = d.y[static_cast<std::size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < 4) throw Error(ErrorKind::degenerate_design, "degenerate design: cubic fit is rank deficient");

  const Eigen::Vector4d coef = qr.solve(rhs);
  const double ssr = (design * coef - rhs).squaredNorm();
  const double s2 = ssr / static_cast<double>(n - 4);

  // (X^T X)^{-1} = P R^{-1} R^{-T} P^T for X P = Q R.
  const Eigen::Matrix4d r = qr.matrixR().topLeftCorner(4, 4).triangularView<Eigen::Upper>();
  const Eigen::Matrix4d r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::Matrix4d::Identity());
  const Eigen::Matrix4d perm = qr.colsPermutation();
  const Eigen::Matrix4d xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

  CubicFit fit;
  fit.n_kept = d.x.size();
  for (int k = 0; k < 4; ++k) {
    fit.coef[static_cast<std::size_t>(k)] = coef(k);
    fit.stderrs[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, s2 * xtx_inv(k, k)));
  }
  return fit;
}

CubicFit fit_cubic(std::span<const ReturnPair> pairs, double outlier_cut) {
  std::vector<double> x, y;
  split(pairs, x, y);
  return fit_cubic(x, y, outlier_cut);
}

}  // namespace trendrev
