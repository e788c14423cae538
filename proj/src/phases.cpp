#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "yledge/criticality.hpp"
#include "yledge/linalg.hpp"
#include "yledge/observables.hpp"

namespace yledge {

std::string to_string(Phase p) {
  switch (p) {
    case Phase::PT_deconfined: return "PT_deconfined";
    case Phase::PT_confined: return "PT_confined";
    case Phase::BR_f1: return "BR_f1";
    case Phase::BR_f2: return "BR_f2";
    case Phase::BR_1: return "BR_1";
  }
  return "?";
}

std::optional<double> confinement_boundary(const ModelParams& p) {
  const cplx h = effective_transverse(p);
  if (std::abs(h.imag()) > 1e-12 * std::max(1.0, std::abs(h))) return std::nullopt;
  return -kConfinementSlope * h.real();
}

double correlation_spread(const ModelParams& p) {
  std::vector<double> t;
  for (double x = 0.0; x <= 0.5 * p.n + 1e-12; x += 0.25) t.push_back(x);
  const auto field = correlation_G(p, t);
  const double peak = field.values.maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  return field.values.row(field.values.rows() - 1).maxCoeff() / peak;
}

namespace {

std::vector<int> sectors_for(const ModelParams& p, const PhaseOptions& opt) {
  if (!opt.sectors.empty()) return opt.sectors;
  return classification_sectors(p.n);
}

RealityReport report_at(const ModelParams& p, const ChainSystem& sys, const PhaseOptions& opt,
                        CVector* ev_out = nullptr) {
  const auto ks = sectors_for(p, opt);
  CVector ev = union_eigenvalues(p, sys, ks);
  auto rep = classify_spectrum_reality(ev, opt.tol);
  if (ev_out) *ev_out = std::move(ev);
  return rep;
}

}  // namespace

PhaseLabel classify_phase(const ModelParams& p, const ChainSystem& sys, const PhaseOptions& opt) {
  PhaseLabel out;
  CVector ev;
  out.report = report_at(p, sys, opt, &ev);
  if (ev.size() >= 2) out.gap = energy_gap(ev, GapMode::modulus, opt.tol);
  out.exceptional_point = ev.size() > 0 && ev.cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, p.h_x);
  const auto& r = out.report;
  if (r.all_real) {
    if (auto mc = confinement_boundary(p)) {
      out.confinement_source = "analytic";
      out.boundary_distance = p.m - *mc;
      out.label = p.m > *mc ? Phase::PT_confined : Phase::PT_deconfined;
      out.boundary = std::abs(out.boundary_distance) <= 2.0 * opt.boundary_tol;
    } else {
      try {
        out.confinement_source = "correlation";
        out.label = correlation_spread(p) >= opt.spread_threshold ? Phase::PT_deconfined
                                                                   : Phase::PT_confined;
      } catch (const UnsupportedRegime&) {
        // other momentum blocks are complex: fall back on the detuning sign
        out.confinement_source = "sign";
        out.label = p.m > 0.0 ? Phase::PT_confined : Phase::PT_deconfined;
      }
    }
  } else if (r.ground_real_part_degenerate) {
    out.label = Phase::BR_f2;
  } else if (r.ground_real && r.first_excited_complex_pair) {
    out.label = Phase::BR_1;
  } else {
    out.label = Phase::BR_f1;
  }
  return out;
}

PhaseLabel classify_phase(const ModelParams& p, const PhaseOptions& opt) {
  ChainSystem sys(p.n, p.bc);
  return classify_phase(p, sys, opt);
}

double bisect_flag(const std::function<bool(double)>& flag, double lo, double hi, double tol) {
  const bool flo = flag(lo);
  if (flo == flag(hi)) throw InvalidInput("bisection bracket does not straddle a flag change");
  auto f = [&](double m) { return flag(m) == flo ? -1.0 : 1.0; };
  auto r = boost::math::tools::bisect(f, lo, hi,
                                      [tol](double a, double b) { return std::abs(b - a) <= tol; });
  return 0.5 * (r.first + r.second);
}

double ground_pair_ep(const ModelParams& p, const ChainSystem& sys, double lo, double hi, double tol) {
  auto complex_ground = [&](double m) {
    const CVector ev = linalg::eigenvalues(sys.sector_matrix(p.with_m(m), 0));
    return !classify_spectrum_reality(ev).ground_real;
  };
  return bisect_flag(complex_ground, lo, hi, tol);
}

namespace {

// First grid index at or after `from` where pred holds.
std::optional<std::size_t> first_where(const std::vector<RealityReport>& reps, std::size_t from,
                                       const std::function<bool(const RealityReport&)>& pred) {
  for (std::size_t i = from; i < reps.size(); ++i)
    if (pred(reps[i])) return i;
  return std::nullopt;
}

}  // namespace

Transitions locate_transitions(const ModelParams& p, double m_lo, double m_hi, const PhaseOptions& opt) {
  ChainSystem sys(p.n, p.bc);
  const double step = 0.05;
  std::vector<double> grid;
  for (double m = m_lo; m <= m_hi + 1e-12; m += step) grid.push_back(m);
  std::vector<RealityReport> reps;
  for (double m : grid) reps.push_back(report_at(p.with_m(m), sys, opt));
  const double tol = opt.boundary_tol;
  auto flag_at = [&](const std::function<bool(const RealityReport&)>& pred) {
    return [&, pred](double m) { return pred(report_at(p.with_m(m), sys, opt)); };
  };
  Transitions t;
  auto all_real = [](const RealityReport& r) { return r.all_real; };
  auto broken = [](const RealityReport& r) { return !r.all_real; };
  auto br1 = [](const RealityReport& r) {
    return !r.all_real && !r.ground_real_part_degenerate && r.ground_real && r.first_excited_complex_pair;
  };
  auto ground_complex = [](const RealityReport& r) { return !r.ground_real; };

  // m_c1: leaving the real lower region
  if (!reps.empty() && all_real(reps.front())) {
    if (auto i = first_where(reps, 0, broken))
      t.m_c1 = bisect_flag(flag_at(all_real), grid[*i - 1], grid[*i], tol);
  }
  // m_c2: onset of the first-excited broken regime above m_c1
  if (t.m_c1) {
    const std::size_t from = static_cast<std::size_t>(
        std::upper_bound(grid.begin(), grid.end(), *t.m_c1) - grid.begin());
    if (auto i = first_where(reps, from, br1); i && *i > 0)
      t.m_c2 = bisect_flag(flag_at(br1), grid[*i - 1], grid[*i], tol);
  }
  // m_c4: upper edge of the complex-ground region
  for (std::size_t i = reps.size(); i-- > 1;) {
    if (ground_complex(reps[i - 1]) && !ground_complex(reps[i])) {
      t.m_c4 = bisect_flag(flag_at(ground_complex), grid[i - 1], grid[i], tol);
      break;
    }
    if (ground_complex(reps[i])) break;
  }
  // m_c3: kink of Re E0
  std::vector<double> fine;
  const double lo3 = t.m_c2.value_or(m_lo), hi3 = t.m_c4.value_or(m_hi);
  for (double m = lo3 + 0.1; m <= hi3 - 0.1 + 1e-12; m += 0.01) fine.push_back(m);
  if (fine.size() >= 8) {
    const auto ks = sectors_for(p, opt);
    const auto scan = first_order_scan(p, fine, ks);
    if (!scan.inconclusive) t.m_c3 = scan.discontinuity;
  }
  return t;
}

FirstOrderScan detect_kink(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 5) throw InvalidInput("kink detector needs five or more samples");
  FirstOrderScan s;
  s.m = x;
  s.re_e0 = y;
  const std::size_t n = x.size();
  for (std::size_t i = 1; i + 1 < n; ++i) s.derivative.push_back((y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]));
  // one-sided slopes on each interval; a kink changes them across at most two intervals
  std::vector<double> slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  std::vector<double> k(slope.size(), 0.0);
  for (std::size_t i = 1; i + 1 < slope.size(); ++i) k[i] = std::abs(slope[i + 1] - slope[i - 1]);
  const auto best = static_cast<std::size_t>(std::max_element(k.begin(), k.end()) - k.begin());
  std::vector<double> inner(k.begin() + 1, k.end() - 1);
  std::nth_element(inner.begin(), inner.begin() + static_cast<long>(inner.size() / 2), inner.end());
  double noise = inner.empty() ? 0.0 : inner[inner.size() / 2];
  for (long off : {-3L, 3L}) {
    const long j = static_cast<long>(best) + off;
    if (j >= 1 && j + 1 < static_cast<long>(slope.size())) noise = std::max(noise, k[static_cast<std::size_t>(j)]);
  }
  s.jump = k[best];
  s.noise = noise;
  s.inconclusive = !(best >= 1 && s.jump > 3.0 * noise && s.jump > 0.0);
  if (!s.inconclusive) {
    // intersect the straight pieces on either side of the kink
    const std::size_t l = best - 1, r = best + 1;
    const double yl = y[l], yr = y[r + 1];
    const double xl = x[l], xr = x[r + 1];
    const double sl = slope[l], sr = slope[r];
    double xc = sl != sr ? (yr - yl + sl * xl - sr * xr) / (sl - sr) : 0.5 * (x[best] + x[best + 1]);
    s.discontinuity = std::clamp(xc, x[l], x[r + 1]);
  }
  return s;
}

FirstOrderScan first_order_scan(const ModelParams& p, const std::vector<double>& m_grid,
                                std::span<const int> sectors) {
  ChainSystem sys(p.n, p.bc);
  const std::vector<int> dflt = classification_sectors(p.n);
  std::span<const int> ks = sectors.empty() ? std::span<const int>(dflt) : sectors;
  std::vector<double> e0;
  e0.reserve(m_grid.size());
  for (double m : m_grid) {
    const CVector ev = union_eigenvalues(p.with_m(m), sys, ks);
    e0.push_back(ev[static_cast<Eigen::Index>(select_ground_state(ev))].real());
  }
  return detect_kink(m_grid, e0);
}

PhaseDiagram scan_phase_diagram(const ModelParams& base, const std::vector<double>& g_values,
                                const std::vector<double>& m_values, const ScanOptions& opt) {
  PhaseDiagram out;
  for (double g : g_values)
    for (double m : m_values) out.points.push_back({g, m, std::nullopt});
  const auto start = std::chrono::steady_clock::now();
  auto over_budget = [&] {
    if (opt.budget_seconds <= 0.0) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
    return el.count() > opt.budget_seconds;
  };
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stopped{false};
  auto worker = [&] {
    ChainSystem sys(base.n, base.bc);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= out.points.size()) return;
      if (over_budget()) {
        stopped = true;
        return;
      }
      auto& pt = out.points[i];
      ModelParams p = base;
      p.g = pt.g;
      p.m = pt.m;
      pt.label = classify_phase(p, sys, opt.phase);
    }
  };
  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  out.complete = !stopped && std::all_of(out.points.begin(), out.points.end(),
                                         [](const PhasePoint& p) { return p.label.has_value(); });
  for (std::size_t gi = 0; gi < g_values.size(); ++gi) {
    PhaseRow row;
    row.g = g_values[gi];
    for (std::size_t mi = 0; mi + 1 < m_values.size(); ++mi) {
      const auto& a = out.points[gi * m_values.size() + mi];
      const auto& b = out.points[gi * m_values.size() + mi + 1];
      if (a.label && b.label && a.label->label != b.label->label)
        row.label_changes.push_back(0.5 * (a.m + b.m));
    }
    if (opt.transitions && std::abs(row.g) > base.h_x && !m_values.empty() && !over_budget()) {
      ModelParams p = base;
      p.g = row.g;
      try {
        row.transitions = locate_transitions(p, m_values.front(), m_values.back(), opt.phase);
      } catch (const Error&) {
        // bracket not found in this row; leave the transitions empty
      }
      // boundary flags from bisection-located transitions
      for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        auto& pt = out.points[gi * m_values.size() + mi];
        if (!pt.label) continue;
        for (const auto& mc : {row.transitions.m_c1, row.transitions.m_c2, row.transitions.m_c3,
                               row.transitions.m_c4})
          if (mc && std::abs(pt.m - *mc) <= 2.0 * opt.phase.boundary_tol) pt.label->boundary = true;
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace yledge
