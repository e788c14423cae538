#include "yledge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace yledge {

std::string to_string(EchoKind k) {
  switch (k) {
    case EchoKind::biorthogonal: return "biortho";
    case EchoKind::associated: return "assoc";
    case EchoKind::self_normal: return "self";
  }
  return "?";
}

EchoKind echo_kind_from_string(const std::string& s) {
  if (s == "biortho" || s == "biorthogonal") return EchoKind::biorthogonal;
  if (s == "assoc" || s == "associated") return EchoKind::associated;
  if (s == "self" || s == "self_normal") return EchoKind::self_normal;
  throw InvalidInput("unknown echo kind '" + s + "'");
}

CVector evolve(const CVector& state, const BiorthogonalSpectrum& spec, double t, bool dagger) {
  if (state.size() != spec.right.rows()) throw InvalidInput("state does not match spectrum dimension");
  const CMatrix& onto = dagger ? spec.right : spec.left;
  const CMatrix& along = dagger ? spec.left : spec.right;
  CVector c = onto.adjoint() * state;
  const double ep_tol = SpectrumOptions{}.ep_tol;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const double cond = spec.condition[static_cast<std::size_t>(n)];
    if (cond * cond < ep_tol && std::abs(c[n]) > 1e-8)
      throw ExceptionalPointError("state has weight on a defective pair");
    const cplx e = dagger ? std::conj(spec.eigenvalues[n]) : spec.eigenvalues[n];
    c[n] *= std::exp(cplx(0, -1) * e * t);
  }
  return along * c;
}

void QuenchSpec::validate() const {
  params.validate();
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  if (!(t_max >= 0.0)) throw InvalidInput("t_max must be nonnegative");
  if (!(T > 0.0) || T > t_max + 1e-12) throw InvalidInput("averaging window must satisfy 0 < T <= t_max");
}

std::vector<double> QuenchSpec::t_grid() const {
  const auto steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(steps + 2));
  for (long i = 0; i <= steps; ++i) t.push_back(static_cast<double>(i) * dt);
  if (t_max - t.back() > 1e-9 * dt) t.push_back(t_max);
  return t;
}

QuenchData prepare_quench(const QuenchSpec& q, const ChainSystem& sys) {
  q.validate();
  std::vector<int> ks = q.sectors.empty() ? std::vector<int>{0} : q.sectors;
  if (sys.basis().boundary() != Boundary::periodic) ks.clear();
  QuenchData d;
  auto g = ground_over_sectors(q.params, sys, ks);
  d.k_index = g.k_index;
  d.initial = std::move(g.pair);
  const ModelParams pf = q.params.with_m(q.m_f);
  const CMatrix hf = d.k_index >= 0 ? sys.sector_matrix(pf, d.k_index) : sys.full_matrix(pf);
  d.final_spec = full_eig(hf);
  d.initial_reality = classify_spectrum_reality(d.initial.eigenvalues);
  d.final_reality = classify_spectrum_reality(d.final_spec.eigenvalues);
  return d;
}

namespace {

QuenchData prepared(const QuenchSpec& q) {
  ChainSystem sys(q.params.n, q.params.bc);
  return prepare_quench(q, sys);
}

void require_finite(const EchoSeries& s) {
  for (const auto& v : s.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("echo overflow: non-finite value in series");
}

}  // namespace

EchoSeries biorthogonal_echo(const QuenchData& d, const std::vector<double>& t) {
  if (!d.initial_reality.all_real || !d.final_reality.all_real)
    throw UnsupportedRegime("biorthogonal echo requires real spectra before and after the quench");
  const auto& f = d.final_spec;
  const CVector a = f.right.adjoint() * d.initial.left;  // conj(<L0|R_n>)
  const CVector b = f.left.adjoint() * d.initial.right;  // <L_n|R0>
  CVector w(a.size());
  for (Eigen::Index n = 0; n < w.size(); ++n) w[n] = std::conj(a[n]) * b[n];
  EchoSeries s;
  s.kind = EchoKind::biorthogonal;
  s.t = t;
  s.values.reserve(t.size());
  for (double tt : t) {
    cplx fwd = 0.0, bwd = 0.0;
    for (Eigen::Index n = 0; n < w.size(); ++n) {
      const cplx ph = std::exp(cplx(0, -1) * f.eigenvalues[n] * tt);
      fwd += w[n] * ph;
      bwd += w[n] / ph;
    }
    s.values.push_back(fwd * bwd);
  }
  require_finite(s);
  return s;
}

EchoSeries biorthogonal_echo(const QuenchSpec& q) { return biorthogonal_echo(prepared(q), q.t_grid()); }

CVector associated_left_state(const CVector& state_right, const BiorthogonalSpectrum& spec) {
  if (state_right.size() != spec.right.rows()) throw InvalidInput("state does not match spectrum dimension");
  const CVector c = spec.left.adjoint() * state_right;
  const double ep_tol = SpectrumOptions{}.ep_tol;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const double cond = spec.condition[static_cast<std::size_t>(n)];
    if (cond * cond < ep_tol && std::abs(c[n]) > 1e-8)
      throw ExceptionalPointError("association onto a defective pair");
  }
  return spec.left * c;
}

EchoSeries associated_echo(const QuenchData& d, const std::vector<double>& t) {
  const auto& f = d.final_spec;
  const CVector r0 = d.initial.right.normalized();
  const CVector c = f.left.adjoint() * r0;
  Eigen::VectorXd w = c.cwiseAbs2();
  const double norm = w.sum();
  if (!(norm > 0.0)) throw NumericalError("initial state has no weight in the post-quench basis");
  EchoSeries s;
  s.kind = EchoKind::associated;
  s.t = t;
  s.values.reserve(t.size());
  for (double tt : t) {
    cplx fwd = 0.0, bwd = 0.0;
    for (Eigen::Index n = 0; n < w.size(); ++n) {
      const cplx ph = std::exp(cplx(0, -1) * f.eigenvalues[n] * tt);
      fwd += w[n] * ph;
      bwd += w[n] / ph;
    }
    s.values.push_back(fwd * bwd / (norm * norm));
  }
  require_finite(s);
  return s;
}

EchoSeries associated_echo(const QuenchSpec& q) { return associated_echo(prepared(q), q.t_grid()); }

EchoSeries self_normal_echo(const QuenchData& d, const std::vector<double>& t, bool normalize) {
  const auto& f = d.final_spec;
  const CVector r0 = d.initial.right.normalized();
  const CVector c = f.left.adjoint() * r0;
  const CVector o = f.right.adjoint() * r0;  // conj(<R0|R_n>)
  const CMatrix gram = f.right.adjoint() * f.right;
  // factor out the fastest growth so the normalized ratio never overflows
  double growth = -std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < c.size(); ++n)
    if (std::abs(c[n]) > 0.0) growth = std::max(growth, f.eigenvalues[n].imag());
  if (!std::isfinite(growth)) growth = 0.0;
  EchoSeries s;
  s.kind = EchoKind::self_normal;
  s.normalized = normalize;
  s.t = t;
  s.values.reserve(t.size());
  for (double tt : t) {
    CVector v(c.size());
    for (Eigen::Index n = 0; n < c.size(); ++n)
      v[n] = c[n] * std::exp(cplx(0, -1) * f.eigenvalues[n] * tt - growth * tt);
    const cplx overlap = o.dot(v);  // <R0|R(t)> e^{-growth t}
    const double norm2 = std::max(0.0, v.dot(gram * v).real());
    if (normalize) {
      s.values.emplace_back(norm2 > 0.0 ? std::norm(overlap) / norm2 : 0.0, 0.0);
    } else {
      const double log_scale = 2.0 * growth * tt;
      const double log_norm = 0.5 * (std::log(norm2) + log_scale);
      if (norm2 == 0.0 || !(log_norm > std::log(1e-300)))
        throw NumericalError("evolved-state norm underflow in raw self-normal echo");
      const double raw = std::norm(overlap) * std::exp(log_scale);
      if (!std::isfinite(raw)) throw NumericalError("raw self-normal echo overflow");
      s.values.emplace_back(raw, 0.0);
    }
  }
  return s;
}

EchoSeries self_normal_echo(const QuenchSpec& q, bool normalize) {
  return self_normal_echo(prepared(q), q.t_grid(), normalize);
}

cplx time_average(const EchoSeries& s, double T) {
  if (s.t.size() < 2 || !(T > 0.0)) throw InvalidInput("time average needs a window and two samples");
  if (T > s.t.back() + 1e-12) throw InvalidInput("averaging window exceeds the series");
  cplx acc = 0.0;
  for (std::size_t i = 1; i < s.t.size(); ++i) {
    const double t0 = s.t[i - 1], t1 = s.t[i];
    if (t0 >= T) break;
    if (t1 <= T) {
      acc += 0.5 * (t1 - t0) * (s.values[i - 1] + s.values[i]);
    } else {
      const double frac = (T - t0) / (t1 - t0);
      const cplx vT = s.values[i - 1] + frac * (s.values[i] - s.values[i - 1]);
      acc += 0.5 * (T - t0) * (s.values[i - 1] + vT);
    }
  }
  return acc / T;
}

RateResult rate_from_series(const EchoSeries& s, double T, int n, double dm) {
  if (dm == 0.0) throw InvalidInput("rate function needs a nonzero quench amplitude");
  RateResult r;
  r.mean_echo = time_average(s, T);
  r.imag_residue = std::abs(r.mean_echo.imag());
  if (!(r.mean_echo.real() > 0.0))
    throw NumericalError("time-averaged echo is not positive (Re = " +
                         std::to_string(r.mean_echo.real()) + "); logarithm undefined");
  r.rate = -std::log(r.mean_echo.real()) / (n * dm * dm);
  return r;
}

RateResult short_time_average_rate(const QuenchSpec& q, EchoKind kind) {
  if (q.dm() == 0.0) throw InvalidInput("rate function needs a nonzero quench amplitude");
  QuenchSpec w = q;
  w.t_max = q.T;
  const auto data = prepared(w);
  const auto t = w.t_grid();
  EchoSeries s;
  switch (kind) {
    case EchoKind::biorthogonal: s = biorthogonal_echo(data, t); break;
    case EchoKind::associated: s = associated_echo(data, t); break;
    case EchoKind::self_normal: s = self_normal_echo(data, t, true); break;
  }
  return rate_from_series(s, q.T, q.params.n, q.dm());
}

EchoMinimum first_echo_minimum(const EchoSeries& s, double min_depth) {
  const std::size_t n = s.values.size();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(s.values[i]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(mag[i] < mag[i - 1] && mag[i] <= mag[i + 1])) continue;
    if (mag[0] - mag[i] <= min_depth * std::max(1.0, mag[0])) continue;
    // vertex of the parabola through the three bracketing samples
    const double x0 = s.t[i - 1], x1 = s.t[i], x2 = s.t[i + 1];
    const double y0 = mag[i - 1], y1 = mag[i], y2 = mag[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    EchoMinimum m{x1, y1};
    if (a > 0.0) {
      const double b = d01 - a * (x0 + x1);
      const double xv = -b / (2.0 * a);
      if (xv >= x0 && xv <= x2) m.t_min = xv;
      const double c = y0 - a * x0 * x0 - b * x0;
      m.value = a * m.t_min * m.t_min + b * m.t_min + c;
    }
    return m;
  }
  throw NumericalError("no interior echo minimum in the sampled window; enlarge t_max");
}

}  // namespace yledge
