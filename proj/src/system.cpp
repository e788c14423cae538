#include "yledge/system.hpp"

#include <numeric>

#include "yledge/linalg.hpp"

namespace yledge {

ChainSystem::ChainSystem(int n, Boundary bc, std::size_t max_dim)
    : basis_(enumerate_basis(n, bc, max_dim)) {}

const MomentumSector& ChainSystem::sector(int k_index) const {
  std::lock_guard<std::mutex> guard(*lock_);
  auto it = sectors_.find(k_index);
  if (it == sectors_.end()) it = sectors_.emplace(k_index, build_momentum_sector(basis_, k_index)).first;
  return it->second;
}

CMatrix ChainSystem::full_matrix(const ModelParams& p) const {
  return build_pxp_hamiltonian(p, basis_).dense();
}

CMatrix ChainSystem::sector_matrix(const ModelParams& p, int k_index) const {
  return build_sector_hamiltonian(p, sector(k_index)).dense();
}

std::vector<int> ground_sectors(int) { return {0}; }

std::vector<int> classification_sectors(int n) {
  if (n % 2 == 0 && n >= 2) return {0, n / 2};
  return {0};
}

std::vector<int> all_sectors(int n) {
  std::vector<int> ks(static_cast<std::size_t>(n));
  std::iota(ks.begin(), ks.end(), 0);
  return ks;
}

namespace {
bool use_full(const ChainSystem& sys, std::span<const int> ks) {
  return ks.empty() || sys.basis().boundary() != Boundary::periodic || sys.sites() < 2;
}
}  // namespace

CVector union_eigenvalues(const ModelParams& p, const ChainSystem& sys, std::span<const int> ks) {
  std::vector<cplx> all;
  if (use_full(sys, ks)) {
    CVector ev = linalg::eigenvalues(sys.full_matrix(p));
    all.assign(ev.begin(), ev.end());
  } else {
    for (int k : ks) {
      CVector ev = linalg::eigenvalues(sys.sector_matrix(p, k));
      all.insert(all.end(), ev.begin(), ev.end());
    }
  }
  CVector out(static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) out[static_cast<Eigen::Index>(i)] = all[i];
  auto order = spectral_order(out);
  CVector sorted(out.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    sorted[static_cast<Eigen::Index>(i)] = out[static_cast<Eigen::Index>(order[i])];
  return sorted;
}

SectorGround ground_over_sectors(const ModelParams& p, const ChainSystem& sys,
                                 std::span<const int> ks, const SpectrumOptions& opt) {
  SectorGround best;
  if (use_full(sys, ks)) {
    best.pair = ground_pair(sys.full_matrix(p), opt);
    best.right_full = best.pair.right;
    best.left_full = best.pair.left;
    return best;
  }
  // pick the sector first from eigenvalues only, then resolve vectors there
  std::vector<cplx> lows;
  std::vector<int> owner;
  for (int k : ks) {
    if (ks.size() == 1) {
      owner.push_back(k);
      lows.push_back(0.0);
      break;
    }
    CVector ev = linalg::eigenvalues(sys.sector_matrix(p, k));
    if (ev.size() == 0) continue;
    lows.push_back(ev[static_cast<Eigen::Index>(select_ground_state(ev))]);
    owner.push_back(k);
  }
  if (lows.empty()) throw InvalidInput("all requested sectors are empty");
  CVector cand(static_cast<Eigen::Index>(lows.size()));
  for (std::size_t i = 0; i < lows.size(); ++i) cand[static_cast<Eigen::Index>(i)] = lows[i];
  const int k = owner[select_ground_state(cand)];
  best.k_index = k;
  best.pair = ground_pair(sys.sector_matrix(p, k), opt);
  best.right_full = lift_to_full(best.pair.right, sys.sector(k), sys.basis());
  best.left_full = lift_to_full(best.pair.left, sys.sector(k), sys.basis());
  return best;
}

}  // namespace yledge
