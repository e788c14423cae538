#include <cmath>
#include <limits>

#include "yledge/dynamics.hpp"
#include "yledge/observables.hpp"
#include "yledge/system.hpp"

namespace yledge {

namespace {

// A state held as its momentum components, each evolved in its own block.
struct SectorStates {
  std::vector<int> ks;
  std::vector<BiorthogonalSpectrum> specs;
  std::vector<CVector> parts;
};

CVector recombine(const SectorStates& s, const ChainSystem& sys, double t, bool dagger) {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(sys.basis().size()));
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    if (s.parts[i].size() == 0) continue;
    const CVector evolved = evolve(s.parts[i], s.specs[i], t, dagger);
    if (s.ks[i] < 0) {
      out += evolved;
    } else {
      out += lift_to_full(evolved, sys.sector(s.ks[i]), sys.basis());
    }
  }
  return out;
}

}  // namespace

CorrelationField correlation_G(const ModelParams& p, const std::vector<double>& t_grid,
                               int excitation_site) {
  p.validate();
  const int n = p.n;
  if (excitation_site < 0) excitation_site = n / 2;
  if (excitation_site >= n) throw InvalidInput("excitation site outside [0, N)");
  if (t_grid.empty()) throw InvalidInput("empty time grid");
  ChainSystem sys(n, p.bc);
  const bool periodic = p.bc == Boundary::periodic && n >= 2;

  SectorStates right, left;
  right.ks = periodic ? all_sectors(n) : std::vector<int>{-1};
  std::vector<cplx> all_ev;
  for (int k : right.ks) {
    const CMatrix h = k < 0 ? sys.full_matrix(p) : sys.sector_matrix(p, k);
    right.specs.push_back(h.rows() ? full_eig(h) : BiorthogonalSpectrum{});
    const auto& ev = right.specs.back().eigenvalues;
    all_ev.insert(all_ev.end(), ev.begin(), ev.end());
  }
  CVector ev_union(static_cast<Eigen::Index>(all_ev.size()));
  for (std::size_t i = 0; i < all_ev.size(); ++i) ev_union[static_cast<Eigen::Index>(i)] = all_ev[i];
  if (!classify_spectrum_reality(ev_union).all_real)
    throw UnsupportedRegime("correlation function requires a real spectrum");

  // ground state over every block
  std::vector<cplx> lows;
  for (const auto& s : right.specs)
    lows.push_back(s.size() ? s.eigenvalues[static_cast<Eigen::Index>(select_ground_state(s.eigenvalues))]
                            : cplx(std::numeric_limits<double>::infinity(), 0.0));
  CVector lows_v(static_cast<Eigen::Index>(lows.size()));
  for (std::size_t i = 0; i < lows.size(); ++i) lows_v[static_cast<Eigen::Index>(i)] = lows[i];
  const std::size_t gk = select_ground_state(lows_v);
  const GroundPair g = ground_pair_of(right.specs[gk]);
  const int k0 = right.ks[gk];
  const CVector r0 = k0 < 0 ? g.right : lift_to_full(g.right, sys.sector(k0), sys.basis());
  const CVector l0 = k0 < 0 ? g.left : lift_to_full(g.left, sys.sector(k0), sys.basis());

  CorrelationField field;
  field.excitation_site = excitation_site;
  field.t_grid = t_grid;
  field.mean_density = mean_density(r0, l0, sys.basis());

  CVector r = constrained_flip(r0, sys.basis(), excitation_site);
  CVector l = constrained_flip(l0, sys.basis(), excitation_site);
  const double rn = r.norm();
  if (rn < 1e-12) throw NumericalError("excitation annihilates the ground state");
  r /= rn;
  const cplx s = l.dot(r);
  if (std::abs(s) < 1e-12 * l.norm()) throw NumericalError("excited pair is self-orthogonal");
  l /= std::conj(s);

  left.ks = right.ks;
  left.specs = right.specs;
  for (std::size_t i = 0; i < right.ks.size(); ++i) {
    const int k = right.ks[i];
    if (k < 0) {
      right.parts.push_back(r);
      left.parts.push_back(l);
    } else if (right.specs[i].size() == 0) {
      right.parts.emplace_back();
      left.parts.emplace_back();
    } else {
      right.parts.push_back(project_to_sector(r, sys.sector(k), sys.basis()));
      left.parts.push_back(project_to_sector(l, sys.sector(k), sys.basis()));
    }
  }

  // A_j(w) = n_j(w) - n̄_j
  const auto dim = static_cast<Eigen::Index>(sys.basis().size());
  Eigen::MatrixXd amat(dim, n);
  for (Eigen::Index w = 0; w < dim; ++w) {
    const Word word = sys.basis().state(static_cast<std::size_t>(w));
    for (int j = 0; j < n; ++j)
      amat(w, j) = (excited(word, j) ? 1.0 : 0.0) - field.mean_density[static_cast<std::size_t>(j)];
  }
  const int lmax = periodic ? n / 2 : n - 1;
  for (int d = 0; d <= lmax; ++d) field.l_range.push_back(d);
  field.values.resize(lmax + 1, static_cast<Eigen::Index>(t_grid.size()));

  const CMatrix ac = amat.cast<cplx>();
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    const CVector rt = recombine(right, sys, t, false);
    const CVector lt = recombine(left, sys, t, true);
    const CVector u = l.conjugate().cwiseProduct(rt);   // <L(0)| . |R(t)>
    const CVector v = lt.conjugate().cwiseProduct(r);   // <L(t)| . |R(0)>
    const CMatrix cu = ac.transpose() * u.asDiagonal() * ac;
    const CMatrix cv = ac.transpose() * v.asDiagonal() * ac;
    for (int d = 0; d <= lmax; ++d) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        int k = j + d;
        if (periodic) {
          k %= n;
        } else if (k >= n) {
          continue;
        }
        acc += std::sqrt(cu(j, k) * cv(j, k));
      }
      field.values(d, static_cast<Eigen::Index>(ti)) = std::abs(acc);
      field.max_imag_residue = std::max(field.max_imag_residue, std::abs(acc.imag()));
    }
  }
  return field;
}

}  // namespace yledge
