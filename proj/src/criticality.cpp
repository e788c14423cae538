#include "yledge/criticality.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace yledge {

std::string to_string(FidelityKind k) { return k == FidelityKind::RR ? "rr" : "rl"; }

FidelityKind fidelity_kind_from_string(const std::string& s) {
  if (s == "rr" || s == "RR") return FidelityKind::RR;
  if (s == "rl" || s == "RL") return FidelityKind::RL;
  throw InvalidInput("unknown fidelity kind '" + s + "'");
}

FidelityResult fidelity_susceptibility(const ModelParams& p, const ChainSystem& sys, double dm,
                                       FidelityKind kind, std::span<const int> sectors) {
  if (dm == 0.0 || !std::isfinite(dm)) throw InvalidInput("fidelity needs a finite nonzero dm");
  const std::vector<int> dflt{0};
  std::span<const int> ks = sectors.empty() ? std::span<const int>(dflt) : sectors;
  const auto a = ground_over_sectors(p, sys, ks);
  const auto b = ground_over_sectors(p.with_m(p.m + dm), sys, ks);
  if (kind == FidelityKind::RL && !classify_spectrum_reality(a.pair.eigenvalues).all_real)
    throw UnsupportedRegime("biorthogonal fidelity requires a real spectrum");
  const bool same = a.k_index == b.k_index;
  const CVector& ra = same ? a.pair.right : a.right_full;
  const CVector& la = same ? a.pair.left : a.left_full;
  const CVector& rb = same ? b.pair.right : b.right_full;
  const CVector& lb = same ? b.pair.left : b.left_full;
  cplx f;
  if (kind == FidelityKind::RR) {
    f = std::abs(ra.dot(rb)) / (ra.norm() * rb.norm());
  } else {
    const cplx f2 = lb.dot(ra) * la.dot(rb) / (la.dot(ra) * lb.dot(rb));
    f = std::sqrt(f2);
  }
  if (!std::isfinite(f.real()) || !std::isfinite(f.imag()) || !(f.real() > 0.0))
    throw NumericalError("fidelity is not positive");
  const cplx lg = -2.0 * std::log(f) / (dm * dm);
  return {lg.real(), f, std::abs(lg.imag())};
}

FidelityResult fidelity_susceptibility(const ModelParams& p, double dm, FidelityKind kind) {
  ChainSystem sys(p.n, p.bc);
  return fidelity_susceptibility(p, sys, dm, kind);
}

namespace {

Peak parabola_peak(double x0, double x1, double x2, double y0, double y1, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  Peak pk{x1, y1, 2.0 * a};
  if (a < 0.0) {
    const double b = d01 - a * (x0 + x1);
    const double c = y0 - a * x0 * x0 - b * x0;
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    pk.location = xv;
    pk.value = a * xv * xv + b * xv + c;
  }
  return pk;
}

std::size_t interior_argmax(const std::vector<double>& y) {
  if (y.size() < 3) throw InvalidInput("peak search needs at least three samples");
  const auto j = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (j == 0 || j + 1 == y.size())
    throw NumericalError("maximum on the scan boundary; widen the scan range");
  return j;
}

}  // namespace

Peak find_pseudocritical(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("scan coordinates and values differ in length");
  const std::size_t j = interior_argmax(y);
  return parabola_peak(x[j - 1], x[j], x[j + 1], y[j - 1], y[j], y[j + 1]);
}

Peak refine_peak(const std::function<double(double)>& f, const std::vector<double>& grid, int bits) {
  std::vector<double> y(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) y[i] = f(grid[i]);
  const std::size_t j = interior_argmax(y);
  const Peak coarse = parabola_peak(grid[j - 1], grid[j], grid[j + 1], y[j - 1], y[j], y[j + 1]);
  std::uintmax_t iters = 200;
  auto best = boost::math::tools::brent_find_minima([&](double m) { return -f(m); }, grid[j - 1],
                                                    grid[j + 1], bits, iters);
  return {best.first, -best.second, coarse.curvature};
}

std::string to_string(FitFamily f) {
  switch (f) {
    case FitFamily::power_law: return "power";
    case FitFamily::shifted_power: return "shifted";
    case FitFamily::log_law: return "log";
  }
  return "?";
}

FitFamily fit_family_from_string(const std::string& s) {
  if (s == "power" || s == "power_law") return FitFamily::power_law;
  if (s == "shifted" || s == "shifted_power") return FitFamily::shifted_power;
  if (s == "log" || s == "log_law") return FitFamily::log_law;
  throw InvalidInput("unknown fit family '" + s + "'");
}

double ScalingFit::predict(double x) const {
  switch (family) {
    case FitFamily::power_law: return amplitude * std::pow(x, exponent);
    case FitFamily::shifted_power: return offset + amplitude * std::pow(x, -exponent);
    case FitFamily::log_law: return exponent / 3.0 * std::log(x) + offset;
  }
  return 0.0;
}

namespace {

struct Line {
  double intercept, slope, se_intercept, se_slope, rms;
};

Line ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[static_cast<std::size_t>(i)];
    rhs[i] = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 2) throw FitError("rank-deficient design: abscissae are not distinct");
  const Eigen::Vector2d beta = qr.solve(rhs);
  const Eigen::VectorXd resid = rhs - design * beta;
  const double rss = resid.squaredNorm();
  const double s2 = rss / static_cast<double>(std::max<Eigen::Index>(1, n - 2));
  const Eigen::Matrix2d cov = s2 * (design.transpose() * design).inverse();
  return {beta[0], beta[1], std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)),
          std::sqrt(rss / static_cast<double>(n))};
}

// r_i = offset + a x_i^{-p} - y_i, parameters (offset, a, p)
struct ShiftedResidual : Eigen::DenseFunctor<double> {
  const std::vector<double>& x;
  const std::vector<double>& y;
  ShiftedResidual(const std::vector<double>& xs, const std::vector<double>& ys)
      : Eigen::DenseFunctor<double>(3, static_cast<int>(xs.size())), x(xs), y(ys) {}
  int operator()(const InputType& v, ValueType& f) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      f[static_cast<Eigen::Index>(i)] = v[0] + v[1] * std::pow(x[i], -v[2]) - y[i];
    return 0;
  }
  int df(const InputType& v, JacobianType& j) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xp = std::pow(x[i], -v[2]);
      const auto r = static_cast<Eigen::Index>(i);
      j(r, 0) = 1.0;
      j(r, 1) = xp;
      j(r, 2) = -v[1] * xp * std::log(x[i]);
    }
    return 0;
  }
};

// Best (offset, a) for fixed p and the resulting residual sum of squares.
double projected_rss(const std::vector<double>& x, const std::vector<double>& y, double p,
                     double& offset, double& a) {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = std::pow(x[i], -p);
  const auto line = ordinary_least_squares(u, y);
  offset = line.intercept;
  a = line.slope;
  return line.rms * line.rms * static_cast<double>(x.size());
}

}  // namespace

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y, FitFamily family) {
  if (x.size() != y.size()) throw InvalidInput("fit abscissae and ordinates differ in length");
  if (x.size() < 3) throw InvalidInput("scaling fits need at least three points");
  for (double v : x)
    if (!(v > 0.0)) throw InvalidInput("scaling fits need positive abscissae");
  for (double v : y)
    if (!std::isfinite(v)) throw InvalidInput("non-finite ordinate");
  ScalingFit fit;
  fit.family = family;
  fit.points = x.size();
  std::vector<double> lx(x.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });

  if (family == FitFamily::power_law) {
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(y[i] > 0.0)) throw InvalidInput("power-law fit needs positive ordinates");
      ly[i] = std::log(y[i]);
    }
    const auto line = ordinary_least_squares(lx, ly);
    fit.exponent = line.slope;
    fit.se_exponent = line.se_slope;
    fit.amplitude = std::exp(line.intercept);
    fit.se_amplitude = fit.amplitude * line.se_intercept;
    fit.residual_rms = line.rms;
    return fit;
  }
  if (family == FitFamily::log_law) {
    const auto line = ordinary_least_squares(lx, y);
    fit.exponent = 3.0 * line.slope;
    fit.se_exponent = 3.0 * line.se_slope;
    fit.offset = line.intercept;
    fit.se_offset = line.se_intercept;
    fit.amplitude = line.slope;
    fit.se_amplitude = line.se_slope;
    fit.residual_rms = line.rms;
    return fit;
  }

  // shifted power: seed by a scan over the exponent with the linear part
  // eliminated, then polish all three parameters together
  double best_p = 1.0, best_rss = std::numeric_limits<double>::infinity();
  for (double p = 0.05; p <= 8.0 + 1e-12; p += 0.05) {
    double o, a;
    const double rss = projected_rss(x, y, p, o, a);
    if (rss < best_rss) {
      best_rss = rss;
      best_p = p;
    }
  }
  std::uintmax_t iters = 200;
  auto vp = boost::math::tools::brent_find_minima(
      [&](double p) {
        double o, a;
        return projected_rss(x, y, p, o, a);
      },
      std::max(1e-3, best_p - 0.05), best_p + 0.05, 52, iters);
  Eigen::VectorXd v(3);
  double o, a;
  projected_rss(x, y, vp.first, o, a);
  v << o, a, vp.first;
  ShiftedResidual fn(x, y);
  Eigen::LevenbergMarquardt<ShiftedResidual> lm(fn);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  lm.setMaxfev(2000);
  const auto status = lm.minimize(v);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !v.allFinite())
    throw FitError("shifted power fit did not converge");
  Eigen::VectorXd f(static_cast<Eigen::Index>(x.size()));
  fn(v, f);
  if (f.squaredNorm() > best_rss * (1.0 + 1e-9) + 1e-300) {
    // refinement wandered off; keep the projected optimum
    v << o, a, vp.first;
    fn(v, f);
  }
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(x.size()), 3);
  fn.df(v, jac);
  const Eigen::Matrix3d jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  if (lu.rank() < 3) throw FitError("rank-deficient design in shifted power fit");
  const double dof = static_cast<double>(std::max<std::size_t>(1, x.size() - 3));
  const Eigen::Matrix3d cov = f.squaredNorm() / dof * lu.inverse();
  fit.offset = v[0];
  fit.amplitude = v[1];
  fit.exponent = v[2];
  fit.se_offset = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.se_amplitude = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.se_exponent = std::sqrt(std::max(0.0, cov(2, 2)));
  fit.residual_rms = std::sqrt(f.squaredNorm() / static_cast<double>(x.size()));
  return fit;
}

}  // namespace yledge
