#include "yledge/basis.hpp"

#include <algorithm>
#include <cmath>

namespace yledge {

bool is_blockade_legal(Word w, int n, Boundary bc) {
  if (w & ~site_mask(n)) return false;
  if (w & (w >> 1)) return false;
  if (bc == Boundary::periodic && excited(w, 0) && excited(w, n - 1)) return false;
  return true;
}

std::size_t constrained_dimension(int n, Boundary bc) {
  // F_1 = F_2 = 1; L_n = F_{n-1} + F_{n+1}
  std::vector<long double> f(n + 3, 0);
  f[1] = 1;
  for (int i = 2; i <= n + 2; ++i) f[i] = f[i - 1] + f[i - 2];
  long double d = bc == Boundary::open ? f[n + 2] : (n == 1 ? 1 : f[n - 1] + f[n + 1]);
  if (d > 1e18L) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(d);
}

ConstrainedBasis::ConstrainedBasis(int n, Boundary bc, std::vector<Word> states)
    : n_(n), bc_(bc), states_(std::move(states)) {}

std::optional<std::size_t> ConstrainedBasis::index_of(Word w) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), w);
  if (it == states_.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

namespace {

// Depth-first growth from the high site downward emits words in ascending order.
void grow(int site, Word w, int n, Boundary bc, std::vector<Word>& out) {
  if (site < 0) {
    if (is_blockade_legal(w, n, bc)) out.push_back(w);
    return;
  }
  grow(site - 1, w, n, bc, out);
  if (site + 1 < n && excited(w, site + 1)) return;
  grow(site - 1, w | (Word{1} << site), n, bc, out);
}

}  // namespace

ConstrainedBasis enumerate_basis(int n, Boundary bc, std::size_t max_dim) {
  if (n < 1) throw InvalidInput("site count must be positive");
  if (n > 62) throw BudgetExceeded("site count exceeds word width");
  std::size_t dim = constrained_dimension(n, bc);
  if (dim > max_dim)
    throw BudgetExceeded("basis dimension " + std::to_string(dim) + " exceeds budget " +
                         std::to_string(max_dim));
  std::vector<Word> states;
  states.reserve(dim);
  grow(n - 1, 0, n, bc, states);
  return ConstrainedBasis(n, bc, std::move(states));
}

Canonical canonicalize(Word w, int n) {
  Canonical best{w, 0};
  Word cur = w;
  for (int r = 1; r < n; ++r) {
    cur = translate(cur, n);
    if (cur < best.rep) best = {cur, r};
  }
  return best;
}

int orbit_period(Word w, int n) {
  Word cur = w;
  for (int r = 1; r <= n; ++r) {
    cur = translate(cur, n);
    if (cur == w) return r;
  }
  return n;
}

std::optional<std::size_t> MomentumSector::index_of(Word rep) const {
  auto it = std::lower_bound(reps.begin(), reps.end(), rep);
  if (it == reps.end() || *it != rep) return std::nullopt;
  return static_cast<std::size_t>(it - reps.begin());
}

MomentumSector build_momentum_sector(const ConstrainedBasis& basis, int k_index) {
  if (basis.boundary() != Boundary::periodic)
    throw InvalidInput("momentum sectors require periodic boundary conditions");
  const int n = basis.sites();
  if (n < 2) throw InvalidInput("momentum sectors require at least two sites");
  if (k_index < 0 || k_index >= n) throw InvalidInput("k index outside [0, N)");
  MomentumSector s;
  s.n = n;
  s.k_index = k_index;
  for (Word w : basis.states()) {
    if (canonicalize(w, n).rep != w) continue;
    int period = orbit_period(w, n);
    if ((static_cast<long long>(k_index) * period) % n != 0) continue;
    s.reps.push_back(w);
    s.periods.push_back(period);
  }
  return s;
}

std::vector<MomentumSector> build_momentum_sectors(const ConstrainedBasis& basis,
                                                   std::span<const int> k_list) {
  std::vector<MomentumSector> out;
  out.reserve(k_list.size());
  for (int k : k_list) out.push_back(build_momentum_sector(basis, k));
  return out;
}

CVector lift_to_full(const CVector& v, const MomentumSector& sector,
                     const ConstrainedBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != sector.dim())
    throw InvalidInput("sector vector length does not match sector dimension");
  if (basis.sites() != sector.n) throw InvalidInput("sector and basis sizes differ");
  CVector w = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
  const int n = sector.n;
  for (std::size_t a = 0; a < sector.dim(); ++a) {
    const int period = sector.periods[a];
    const double norm = 1.0 / std::sqrt(static_cast<double>(period));
    Word cur = sector.reps[a];
    for (int r = 0; r < period; ++r) {
      auto idx = basis.index_of(cur);
      if (!idx) throw InvalidInput("sector representative not in basis");
      w[static_cast<Eigen::Index>(*idx)] +=
          v[static_cast<Eigen::Index>(a)] * unit_root(-static_cast<long long>(sector.k_index) * r, n) * norm;
      cur = translate(cur, n);
    }
  }
  return w;
}

CVector project_to_sector(const CVector& w, const MomentumSector& sector,
                          const ConstrainedBasis& basis) {
  if (static_cast<std::size_t>(w.size()) != basis.size())
    throw InvalidInput("full vector length does not match basis dimension");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(sector.dim()));
  const int n = sector.n;
  for (std::size_t a = 0; a < sector.dim(); ++a) {
    const int period = sector.periods[a];
    const double norm = 1.0 / std::sqrt(static_cast<double>(period));
    Word cur = sector.reps[a];
    cplx acc = 0;
    for (int r = 0; r < period; ++r) {
      auto idx = basis.index_of(cur);
      acc += unit_root(static_cast<long long>(sector.k_index) * r, n) *
             w[static_cast<Eigen::Index>(*idx)];
      cur = translate(cur, n);
    }
    v[static_cast<Eigen::Index>(a)] = acc * norm;
  }
  return v;
}

}  // namespace yledge
