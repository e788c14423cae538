#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "yledge/basis.hpp"
#include "yledge/hamiltonian.hpp"
#include "yledge/spectrum.hpp"

namespace yledge {

// Basis plus lazily built momentum sectors for one chain length.
class ChainSystem {
 public:
  ChainSystem(int n, Boundary bc, std::size_t max_dim = kDefaultMaxDim);

  const ConstrainedBasis& basis() const { return basis_; }
  int sites() const { return basis_.sites(); }
  const MomentumSector& sector(int k_index) const;

  CMatrix full_matrix(const ModelParams& p) const;
  CMatrix sector_matrix(const ModelParams& p, int k_index) const;

 private:
  ConstrainedBasis basis_;
  mutable std::map<int, MomentumSector> sectors_;
  std::shared_ptr<std::mutex> lock_ = std::make_shared<std::mutex>();
};

// Sector lists: {0} for ground-state observables, {0, N/2} for spectral
// classification (k = 0 and k = π), or every k.
std::vector<int> ground_sectors(int n);
std::vector<int> classification_sectors(int n);
std::vector<int> all_sectors(int n);

// Eigenvalues unioned over the listed sectors (full basis if the list is empty
// or the chain is open), sorted by (Re, Im).
CVector union_eigenvalues(const ModelParams& p, const ChainSystem& sys, std::span<const int> ks);

struct SectorGround {
  int k_index = -1;  // -1 for the full basis
  GroundPair pair;   // sector coordinates
  CVector right_full;
  CVector left_full;
};

// Ground pair across sectors: lowest level by the selection rule.
SectorGround ground_over_sectors(const ModelParams& p, const ChainSystem& sys,
                                 std::span<const int> ks, const SpectrumOptions& opt = {});

}  // namespace yledge
