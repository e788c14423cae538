#include "yledge/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "yledge/linalg.hpp"

namespace yledge {

double matrix_scale(const CMatrix& h) {
  if (h.size() == 0) return 1.0;
  return std::max(1.0, h.cwiseAbs().colwise().sum().maxCoeff());
}

std::vector<std::size_t> spectral_order(const CVector& ev) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(ev.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const cplx x = ev[static_cast<Eigen::Index>(a)], y = ev[static_cast<Eigen::Index>(b)];
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return idx;
}

namespace {

// Largest-modulus component made real positive; left column follows so that
// <L|R> is untouched.
void fix_phase(CMatrix& right, CMatrix& left, Eigen::Index j) {
  auto col = right.col(j);
  const double top = col.cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (std::abs(col[i]) >= (1.0 - 1e-10) * top) {
      pick = i;
      break;
    }
  }
  const cplx phase = std::conj(col[pick]) / std::abs(col[pick]);
  right.col(j) *= phase;
  left.col(j) *= phase;
}

bool lex_less(const CMatrix& r, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const cplx x = r(i, a), y = r(i, b);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<std::size_t>> degenerate_blocks(const CVector& ev, double tol) {
  const std::size_t n = static_cast<std::size_t>(ev.size());
  auto order = spectral_order(ev);
  UnionFind uf(n);
  for (std::size_t a = 0; a < n; ++a) {
    const cplx x = ev[static_cast<Eigen::Index>(order[a])];
    for (std::size_t b = a + 1; b < n; ++b) {
      const cplx y = ev[static_cast<Eigen::Index>(order[b])];
      if (y.real() - x.real() > tol) break;
      if (std::abs(x - y) <= tol) uf.unite(order[a], order[b]);
    }
  }
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return blocks;
}

}  // namespace

void sort_spectrum(BiorthogonalSpectrum& s) {
  const Eigen::Index n = s.eigenvalues.size();
  for (Eigen::Index j = 0; j < n; ++j) fix_phase(s.right, s.left, j);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const cplx x = s.eigenvalues[a], y = s.eigenvalues[b];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return lex_less(s.right, a, b);
  });
  BiorthogonalSpectrum out;
  out.eigenvalues.resize(n);
  out.right.resize(s.right.rows(), n);
  out.left.resize(s.left.rows(), n);
  out.condition.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = idx[static_cast<std::size_t>(j)];
    out.eigenvalues[j] = s.eigenvalues[src];
    out.right.col(j) = s.right.col(src);
    out.left.col(j) = s.left.col(src);
    out.condition[static_cast<std::size_t>(j)] = s.condition[static_cast<std::size_t>(src)];
  }
  s = std::move(out);
}

BiorthogonalSpectrum biorthonormalize(CMatrix right, CMatrix left, CVector eigenvalues,
                                      const SpectrumOptions& opt) {
  const Eigen::Index n = eigenvalues.size();
  if (right.cols() != n || left.cols() != n || right.rows() != left.rows())
    throw InvalidInput("biorthonormalize: mismatched shapes");
  double scale = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, std::abs(eigenvalues[j]));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = right.col(j).norm();
    if (r == 0.0) throw InvalidInput("zero right eigenvector");
    right.col(j) /= r;
  }
  std::vector<cplx> defective;
  for (const auto& block : degenerate_blocks(eigenvalues, opt.cluster_tol * scale)) {
    const auto d = static_cast<Eigen::Index>(block.size());
    CMatrix rc(right.rows(), d), lc(left.rows(), d);
    for (Eigen::Index a = 0; a < d; ++a) {
      rc.col(a) = right.col(static_cast<Eigen::Index>(block[a]));
      lc.col(a) = left.col(static_cast<Eigen::Index>(block[a]));
      const double ln = lc.col(a).norm();
      if (ln > 0.0) lc.col(a) /= ln;
    }
    if (d > 1) {
      // any basis of the eigenspace will do; an orthonormal one makes L = R for normal matrices
      Eigen::HouseholderQR<CMatrix> qr(rc);
      rc = qr.householderQ() * CMatrix::Identity(rc.rows(), d);
      for (Eigen::Index a = 0; a < d; ++a) right.col(static_cast<Eigen::Index>(block[a])) = rc.col(a);
    }
    const CMatrix overlap = lc.adjoint() * rc;  // S = L^† R
    Eigen::FullPivLU<CMatrix> lu(overlap);
    lu.setThreshold(0.0);
    if (!lu.isInvertible() || !std::isfinite(overlap.norm())) {
      for (auto i : block) defective.push_back(eigenvalues[static_cast<Eigen::Index>(i)]);
      continue;
    }
    // L <- L S^{-†} makes L^† R = 1 inside the block
    const CMatrix fixed = lc * lu.inverse().adjoint();
    for (Eigen::Index a = 0; a < d; ++a)
      left.col(static_cast<Eigen::Index>(block[a])) = fixed.col(a);
  }
  BiorthogonalSpectrum s;
  s.condition.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double ln = left.col(j).norm();
    const double cond = std::isfinite(ln) && ln > 0.0 ? 1.0 / ln : 0.0;
    s.condition[static_cast<std::size_t>(j)] = cond;
    if (cond * cond < opt.ep_tol) defective.push_back(eigenvalues[j]);
  }
  if (!defective.empty())
    throw ExceptionalPointError("defective eigenpair: biorthogonal overlap below EP tolerance",
                                defective);
  s.eigenvalues = std::move(eigenvalues);
  s.right = std::move(right);
  s.left = std::move(left);
  sort_spectrum(s);
  return s;
}

BiorthogonalSpectrum full_eig(const CMatrix& h, const SpectrumOptions& opt) {
  if (h.rows() != h.cols()) throw InvalidInput("full_eig: matrix not square");
  const Eigen::Index n = h.rows();
  const double scale = matrix_scale(h);
  auto r = linalg::eigen_right(h);
  auto l = linalg::eigen_right(h.adjoint());
  // left eigenvalues conjugated back, sorted by real part for windowed matching
  CVector target = l.values.conjugate();
  auto lorder = spectral_order(target);
  const double tol = opt.pair_tol * scale;
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cand;
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx e = r.values[j];
    auto lo = std::lower_bound(lorder.begin(), lorder.end(), e.real() - tol,
                               [&](std::size_t k, double v) {
                                 return target[static_cast<Eigen::Index>(k)].real() < v;
                               });
    for (auto it = lo; it != lorder.end(); ++it) {
      const cplx f = target[static_cast<Eigen::Index>(*it)];
      if (f.real() > e.real() + tol) break;
      const double d = std::abs(e - f);
      if (d <= tol) cand.emplace_back(d, j, static_cast<Eigen::Index>(*it));
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (const auto& [d, j, k] : cand) {
    if (match[static_cast<std::size_t>(j)] >= 0 || used[static_cast<std::size_t>(k)]) continue;
    match[static_cast<std::size_t>(j)] = k;
    used[static_cast<std::size_t>(k)] = 1;
  }
  std::vector<cplx> unmatched;
  for (Eigen::Index j = 0; j < n; ++j)
    if (match[static_cast<std::size_t>(j)] < 0) unmatched.push_back(r.values[j]);
  if (!unmatched.empty())
    throw ExceptionalPointError("left/right eigenvalue pairing failed", unmatched);
  CMatrix left(n, n);
  for (Eigen::Index j = 0; j < n; ++j) left.col(j) = l.vectors.col(match[static_cast<std::size_t>(j)]);
  return biorthonormalize(std::move(r.vectors), std::move(left), std::move(r.values), opt);
}

BiorthogonalSpectrum full_eig(const OperatorMatrix& h, const SpectrumOptions& opt) {
  return full_eig(h.dense(), opt);
}

std::size_t select_ground_state(const CVector& ev, double tol) {
  if (ev.size() == 0) throw InvalidInput("empty spectrum");
  Eigen::Index lowest = 0;
  for (Eigen::Index j = 1; j < ev.size(); ++j)
    if (ev[j].real() < ev[lowest].real()) lowest = j;
  const double re0 = ev[lowest].real();
  const double tie = tol * std::max(1.0, std::abs(re0));
  // rank: (not negative-imaginary, |Im|, index)
  Eigen::Index best = -1;
  auto rank = [&](Eigen::Index j) {
    const cplx e = ev[j];
    const bool negative = e.imag() < -tol * std::max(1.0, std::abs(e));
    return std::make_tuple(negative ? 0 : 1, std::abs(e.imag()), j);
  };
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (ev[j].real() > re0 + tie) continue;
    if (best < 0 || rank(j) < rank(best)) best = j;
  }
  return static_cast<std::size_t>(best);
}

namespace {

bool is_real_level(cplx e, double tol) { return std::abs(e.imag()) < tol * std::max(1.0, std::abs(e)); }

// Position in sorted order of the first excited level: next after the ground,
// optionally skipping the ground's conjugate partner.
Eigen::Index first_excited(const CVector& ev, std::size_t ground, bool skip_partner, double tol) {
  auto order = spectral_order(ev);
  const cplx e0 = ev[static_cast<Eigen::Index>(ground)];
  const double tie = tol * std::max(1.0, std::abs(e0.real()));
  bool partner_skipped = false;
  for (auto i : order) {
    if (i == ground) continue;
    const cplx e = ev[static_cast<Eigen::Index>(i)];
    if (skip_partner && !partner_skipped && !is_real_level(e0, tol) &&
        std::abs(e.real() - e0.real()) <= tie && e.imag() * e0.imag() < 0) {
      partner_skipped = true;
      continue;
    }
    return static_cast<Eigen::Index>(i);
  }
  return -1;
}

}  // namespace

RealityReport classify_spectrum_reality(const CVector& ev, double tol) {
  RealityReport r;
  r.tolerance = tol;
  if (ev.size() == 0) return r;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    r.max_imag = std::max(r.max_imag, std::abs(ev[j].imag()));
    if (!is_real_level(ev[j], tol)) r.all_real = false;
  }
  r.ground_index = select_ground_state(ev, tol);
  const cplx e0 = ev[static_cast<Eigen::Index>(r.ground_index)];
  r.ground_real = is_real_level(e0, tol);
  auto order = spectral_order(ev);
  if (order.size() >= 2) {
    const cplx a = ev[static_cast<Eigen::Index>(order[0])];
    const cplx b = ev[static_cast<Eigen::Index>(order[1])];
    const double tie = tol * std::max(1.0, std::abs(a.real()));
    r.ground_real_part_degenerate = std::abs(a.real() - b.real()) <= tie &&
                                    !is_real_level(a, tol) && !is_real_level(b, tol) &&
                                    a.imag() * b.imag() < 0;
  }
  const Eigen::Index e1 = first_excited(ev, r.ground_index, false, tol);
  r.first_excited_complex_pair = e1 >= 0 && !is_real_level(ev[e1], tol);
  return r;
}

double energy_gap(const CVector& ev, GapMode mode, double tol) {
  if (ev.size() < 2) throw InvalidInput("gap needs at least two levels");
  const std::size_t g = select_ground_state(ev, tol);
  const Eigen::Index e1 = first_excited(ev, g, mode == GapMode::real_gap, tol);
  if (e1 < 0) throw InvalidInput("no excited level besides the conjugate partner");
  return std::abs(ev[e1] - ev[static_cast<Eigen::Index>(g)]);
}

GroundPair ground_pair_of(const BiorthogonalSpectrum& s) {
  const std::size_t g = select_ground_state(s.eigenvalues);
  GroundPair p;
  p.energy = s.eigenvalues[static_cast<Eigen::Index>(g)];
  p.right = s.right.col(static_cast<Eigen::Index>(g));
  p.left = s.left.col(static_cast<Eigen::Index>(g));
  p.condition = s.condition[g];
  p.eigenvalues = s.eigenvalues;
  return p;
}

GroundPair ground_pair(const CMatrix& h, const SpectrumOptions& opt) {
  const double scale = matrix_scale(h);
  CVector ev = linalg::eigenvalues(h);
  auto order = spectral_order(ev);
  CVector sorted(ev.size());
  for (Eigen::Index j = 0; j < ev.size(); ++j) sorted[j] = ev[static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)])];
  const std::size_t g = select_ground_state(sorted);
  const cplx e0 = sorted[static_cast<Eigen::Index>(g)];
  double separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < sorted.size(); ++j)
    if (j != static_cast<Eigen::Index>(g)) separation = std::min(separation, std::abs(sorted[j] - e0));
  CVector r, l;
  const bool isolated = separation > 1e-7 * scale;
  if (isolated && linalg::inverse_iteration(h, e0, r) &&
      linalg::inverse_iteration(h.adjoint(), std::conj(e0), l)) {
    const cplx s = l.dot(r);  // <l|r>
    const double cond = std::abs(s) / l.norm();
    if (cond * cond < opt.ep_tol)
      throw ExceptionalPointError("ground state is defective: biorthogonal overlap below EP tolerance",
                                  {e0});
    CMatrix rm = r, lm = l / std::conj(s);
    fix_phase(rm, lm, 0);
    GroundPair p;
    p.energy = e0;
    p.right = rm.col(0);
    p.left = lm.col(0);
    p.condition = cond;
    p.eigenvalues = std::move(sorted);
    return p;
  }
  return ground_pair_of(full_eig(h, opt));
}

}  // namespace yledge
