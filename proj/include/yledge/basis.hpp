#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "yledge/common.hpp"

namespace yledge {

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 20;

inline bool excited(Word w, int j) { return (w >> j) & 1u; }
inline Word site_mask(int n) { return n >= 64 ? ~Word{0} : ((Word{1} << n) - 1); }

// Translation by one site: site j moves to j+1 (mod n).
inline Word translate(Word w, int n) {
  return ((w << 1) | (w >> (n - 1))) & site_mask(n);
}

bool is_blockade_legal(Word w, int n, Boundary bc);

// Closed-form dimension: Lucas L_n (periodic) or Fibonacci F_{n+2} (open).
std::size_t constrained_dimension(int n, Boundary bc);

class ConstrainedBasis {
 public:
  ConstrainedBasis(int n, Boundary bc, std::vector<Word> states);

  int sites() const { return n_; }
  Boundary boundary() const { return bc_; }
  std::size_t size() const { return states_.size(); }
  Word state(std::size_t i) const { return states_[i]; }
  std::span<const Word> states() const { return states_; }
  std::optional<std::size_t> index_of(Word w) const;

 private:
  int n_;
  Boundary bc_;
  std::vector<Word> states_;
};

ConstrainedBasis enumerate_basis(int n, Boundary bc, std::size_t max_dim = kDefaultMaxDim);

struct Canonical {
  Word rep;
  int shift;  // translate^shift(word) == rep
};
Canonical canonicalize(Word w, int n);
int orbit_period(Word w, int n);

struct MomentumSector {
  int n = 0;
  int k_index = 0;
  std::vector<Word> reps;
  std::vector<int> periods;

  std::size_t dim() const { return reps.size(); }
  double momentum() const { return 2.0 * kPi * k_index / n; }
  std::optional<std::size_t> index_of(Word rep) const;
};

MomentumSector build_momentum_sector(const ConstrainedBasis& basis, int k_index);
std::vector<MomentumSector> build_momentum_sectors(const ConstrainedBasis& basis,
                                                   std::span<const int> k_list);

// w[T^r s] = v[s] e^{-ikr}/sqrt(R_s)
CVector lift_to_full(const CVector& v, const MomentumSector& sector,
                     const ConstrainedBasis& basis);
// Adjoint of lift_to_full; project(lift(v)) == v.
CVector project_to_sector(const CVector& w, const MomentumSector& sector,
                          const ConstrainedBasis& basis);

}  // namespace yledge
