#include "yledge/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yledge/linalg.hpp"

namespace yledge {

std::vector<double> ScanRange::grid() const {
  if (!(step > 0.0) || hi < lo) throw InvalidInput("scan range needs lo <= hi and step > 0");
  std::vector<double> g;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

double ground_entropy(const ModelParams& p, const ChainSystem& sys, DensityKind kind) {
  const std::vector<int> ks = ground_sectors(p.n);
  const auto g = ground_over_sectors(p, sys, ks);
  const auto rho = reduced_density_matrix(g.right_full, g.left_full, sys.basis(), half_chain_cut(p.n), kind);
  return entanglement_entropy(rho).value;
}

Peak entropy_peak(const ModelParams& p, const ChainSystem& sys, const ScanRange& range) {
  return refine_peak([&](double m) { return ground_entropy(p.with_m(m), sys); }, range.grid());
}

namespace {

std::vector<double> as_x(const std::vector<int>& n) { return {n.begin(), n.end()}; }

}  // namespace

EntropyPeakStudy entropy_peak_study(const ModelParams& base, const std::vector<int>& sizes,
                                    const ScanRange& range) {
  EntropyPeakStudy s;
  s.g = base.g;
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    ChainSystem sys(n, p.bc);
    const Peak pk = entropy_peak(p, sys, range);
    s.peaks.n.push_back(n);
    s.peaks.location.push_back(pk.location);
    s.peaks.value.push_back(pk.value);
  }
  s.location_fit = fit_scaling(as_x(sizes), s.peaks.location, FitFamily::shifted_power);
  s.height_fit = fit_scaling(as_x(sizes), s.peaks.value, FitFamily::log_law);
  return s;
}

double rate_at(const ModelParams& p, const ChainSystem& sys, const EchoStudyOptions& opt) {
  QuenchSpec q;
  q.params = p;
  q.m_f = p.m + opt.dm;
  q.t_max = opt.rate_T;
  q.dt = opt.rate_dt;
  q.T = opt.rate_T;
  const QuenchData d = prepare_quench(q, sys);
  return rate_from_series(biorthogonal_echo(d, q.t_grid()), q.T, p.n, opt.dm).rate;
}

EchoStudy echo_scaling_study(const ModelParams& base, const std::vector<int>& sizes,
                             const EchoStudyOptions& opt) {
  EchoStudy s;
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    ChainSystem sys(n, p.bc);
    const Peak pk = refine_peak([&](double m) { return rate_at(p.with_m(m), sys, opt); }, opt.range.grid());
    QuenchSpec q;
    q.params = p.with_m(pk.location);
    q.m_f = pk.location + opt.dm;
    q.t_max = opt.echo_t_max;
    q.dt = opt.echo_dt;
    q.T = opt.echo_t_max;
    const QuenchData d = prepare_quench(q, sys);
    const EchoMinimum em = first_echo_minimum(biorthogonal_echo(d, q.t_grid()));
    const CVector ev = linalg::eigenvalues(sys.sector_matrix(q.params, 0));
    s.n.push_back(n);
    s.m_pc.push_back(pk.location);
    s.rate_peak.push_back(pk.value);
    s.t_min.push_back(em.t_min);
    s.l_min.push_back(em.value);
    s.gap.push_back(energy_gap(ev, opt.gap_mode));
  }
  std::vector<double> drop;
  for (double l : s.l_min) drop.push_back(1.0 - l);
  s.echo_fit = fit_scaling(as_x(sizes), drop, FitFamily::power_law);
  s.gap_fit = fit_scaling(as_x(sizes), s.gap, FitFamily::power_law);
  s.nu = 2.0 / s.echo_fit.exponent;
  s.z = -s.gap_fit.exponent;
  return s;
}

FidelityStudy fidelity_study(const ModelParams& base, const std::vector<int>& sizes, FidelityKind kind,
                             const ScanRange& range, double dm) {
  FidelityStudy s;
  s.kind = kind;
  const std::vector<int> k0{0};
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    ChainSystem sys(n, p.bc);
    const Peak pk = refine_peak(
        [&](double m) { return fidelity_susceptibility(p.with_m(m), sys, dm, kind, k0).chi; }, range.grid());
    s.n.push_back(n);
    s.m_peak.push_back(pk.location);
    s.chi_max.push_back(pk.value);
  }
  s.fit = fit_scaling(as_x(sizes), s.chi_max, FitFamily::power_law);
  s.nu = 2.0 / s.fit.exponent;
  return s;
}

double locate_m_c4(const ModelParams& p, const ChainSystem& sys, double lo, double hi, double tol) {
  auto complex_ground = [&](double m) {
    return !classify_spectrum_reality(linalg::eigenvalues(sys.sector_matrix(p.with_m(m), 0))).ground_real;
  };
  // walk down from the real side to the first complex ground
  const double step = 0.01;
  if (complex_ground(hi)) throw InvalidInput("ground pair still complex at the top of the m_c4 window");
  for (double m = hi - step; m >= lo - 1e-12; m -= step)
    if (complex_ground(m)) return bisect_flag(complex_ground, m, m + step, tol);
  throw InvalidInput("no complex ground pair found in the m_c4 window");
}

std::optional<double> echo_change_point(const std::vector<double>& m, const std::vector<double>& log_echo) {
  // Broken side: the echo grows or decays by many e-folds. Symmetric side: it
  // stays near 1.
  std::optional<double> cp;
  std::optional<std::size_t> prev;
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (std::isnan(log_echo[i])) continue;
    if (prev) {
      const double a = std::abs(log_echo[*prev]), b = std::abs(log_echo[i]);
      if ((a > 1.0) != (b > 1.0) && std::abs(a - b) > best) {
        best = std::abs(a - b);
        cp = 0.5 * (m[*prev] + m[i]);
      }
    }
    prev = i;
  }
  return cp;
}

EchoScan associated_echo_scan(const ModelParams& p, const ChainSystem& sys, const std::vector<double>& m,
                              double t, double dm) {
  EchoScan s;
  s.m = m;
  const std::vector<double> times{0.0, t};
  for (double mi : m) {
    QuenchSpec q;
    q.params = p.with_m(mi);
    q.m_f = mi + dm;
    q.t_max = t;
    q.dt = t;
    q.T = t;
    try {
      const QuenchData d = prepare_quench(q, sys);
      s.log_echo.push_back(std::log(std::abs(associated_echo(d, times).values.back())));
    } catch (const ExceptionalPointError&) {
      s.log_echo.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  s.change_point = echo_change_point(m, s.log_echo);
  return s;
}

YlesStudy yles_study(const ModelParams& base, const std::vector<int>& sizes, const YlesStudyOptions& opt) {
  YlesStudy s;
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    ChainSystem sys(n, p.bc);
    const double mc = locate_m_c4(p, sys, opt.scan_lo, opt.scan_hi, opt.bisect_tol);
    s.n.push_back(n);
    s.m_c4.push_back(mc);
    std::optional<double> cp;
    if (opt.echo_cross_check) {
      std::vector<double> ms;
      // offset by half a step so the grid does not sit on the exceptional point
      for (double m = mc - opt.echo_window + 0.5 * opt.echo_step; m < mc + opt.echo_window; m += opt.echo_step)
        ms.push_back(m);
      cp = associated_echo_scan(p, sys, ms, opt.echo_t, opt.echo_dm).change_point;
    }
    s.echo_change_point.push_back(cp);
  }
  s.fit = fit_scaling(as_x(sizes), s.m_c4, FitFamily::shifted_power);
  s.beta = s.fit.exponent;
  s.m_inf = s.fit.offset;
  return s;
}

EdgeEntropyStudy edge_entropy_study(const ModelParams& base, const std::vector<int>& sizes, double m_eval) {
  EdgeEntropyStudy s;
  s.m_eval = m_eval;
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    p.m = m_eval;
    ChainSystem sys(n, p.bc);
    s.n.push_back(n);
    s.entropy.push_back(ground_entropy(p, sys));
  }
  s.fit = fit_scaling(as_x(sizes), s.entropy, FitFamily::log_law);
  s.c_eff = s.fit.exponent;
  return s;
}

ConfinementSummary summarize_confinement(const CorrelationField& f, double fraction) {
  ConfinementSummary c;
  c.peak = f.values.maxCoeff();
  const double cut = fraction * c.peak;
  const Eigen::Index far = f.values.rows() - 1;
  for (Eigen::Index t = 0; t < f.values.cols(); ++t) {
    if (!c.reach_time && f.values(far, t) >= cut) c.reach_time = f.t_grid[static_cast<std::size_t>(t)];
    for (Eigen::Index l = 0; l < f.values.rows(); ++l)
      if (f.values(l, t) >= cut) c.support = std::max(c.support, f.l_range[static_cast<std::size_t>(l)]);
  }
  return c;
}

}  // namespace yledge
