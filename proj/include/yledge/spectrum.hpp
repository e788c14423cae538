#pragma once

#include <cstddef>
#include <vector>

#include "yledge/common.hpp"
#include "yledge/hamiltonian.hpp"

namespace yledge {

struct SpectrumOptions {
  double ep_tol = 1e-10;       // bound on the squared unit-vector overlap |<L|R>|^2
  double pair_tol = 1e-6;      // max |E_j - conj(E'_k)| relative to the matrix scale
  double cluster_tol = 1e-9;   // eigenvalues closer than this share a degenerate block
};

// Right/left eigenpairs with <L_i|R_j> = δ_ij, unit-norm right columns, the
// left columns carrying the normalization factor. Sorted by (Re E, Im E).
struct BiorthogonalSpectrum {
  CVector eigenvalues;
  CMatrix right;
  CMatrix left;
  std::vector<double> condition;  // |<L|R>| of unit vectors, 1 for normal matrices

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

BiorthogonalSpectrum full_eig(const CMatrix& h, const SpectrumOptions& opt = {});
BiorthogonalSpectrum full_eig(const OperatorMatrix& h, const SpectrumOptions& opt = {});

// Pairs are given column-aligned; degenerate blocks are biorthogonalized jointly.
BiorthogonalSpectrum biorthonormalize(CMatrix right, CMatrix left, CVector eigenvalues,
                                      const SpectrumOptions& opt = {});

// (Re, Im) ascending, exact ties by the phase-fixed right vector.
void sort_spectrum(BiorthogonalSpectrum& s);
std::vector<std::size_t> spectral_order(const CVector& ev);

inline constexpr double kRealityTol = 1e-8;

std::size_t select_ground_state(const CVector& ev, double tol = kRealityTol);

struct RealityReport {
  bool all_real = true;
  bool ground_real = true;
  bool first_excited_complex_pair = false;
  bool ground_real_part_degenerate = false;
  double max_imag = 0.0;
  double tolerance = kRealityTol;
  std::size_t ground_index = 0;
};

RealityReport classify_spectrum_reality(const CVector& ev, double tol = kRealityTol);

// real_gap skips the conjugate partner of a complex ground level when picking E_1.
enum class GapMode { modulus, real_gap };
double energy_gap(const CVector& ev, GapMode mode = GapMode::modulus, double tol = kRealityTol);

// Lowest-level right/left pair without a full decomposition when possible.
struct GroundPair {
  cplx energy;
  CVector right;  // unit norm
  CVector left;   // <left|right> = 1
  double condition = 1.0;
  CVector eigenvalues;  // full sector spectrum, sorted
};

GroundPair ground_pair(const CMatrix& h, const SpectrumOptions& opt = {});
GroundPair ground_pair_of(const BiorthogonalSpectrum& s);

double matrix_scale(const CMatrix& h);

}  // namespace yledge
