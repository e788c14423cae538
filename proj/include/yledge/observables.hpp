#pragma once

#include <vector>

#include "yledge/basis.hpp"
#include "yledge/hamiltonian.hpp"
#include "yledge/spectrum.hpp"

namespace yledge {

struct BiorthogonalDensity {
  CMatrix rho;
  cplx trace;  // trace before normalization
  std::size_t right_index = 0;
  std::size_t left_index = 0;
};

BiorthogonalDensity biorthogonal_density_matrix(const BiorthogonalSpectrum& s, std::size_t j);

// Contiguous block of `length` sites starting at `start` (wrapping on a ring).
struct Cut {
  int start = 0;
  int length = 0;
};
Cut half_chain_cut(int n);
// Validates that the site set is one contiguous run.
Cut cut_from_sites(const std::vector<int>& sites, int n, Boundary bc);

struct SubsystemMatrix {
  std::vector<Word> configs;  // local words of A, bit i = site start+i
  CMatrix rho;
};

SubsystemMatrix reduced_density_matrix(const BiorthogonalDensity& rho,
                                       const ConstrainedBasis& basis, Cut cut);

enum class DensityKind { biorthogonal, self_normal };

// Pure-state shortcut: ρ = |R><L| / <L|R> (or |R><R| for self_normal).
SubsystemMatrix reduced_density_matrix(const CVector& right, const CVector& left,
                                       const ConstrainedBasis& basis, Cut cut,
                                       DensityKind kind = DensityKind::biorthogonal);

struct EntropyResult {
  double value = 0.0;
  double imag_residue = 0.0;
  std::vector<cplx> branch_cut;  // eigenvalues sitting on the negative real axis
};

EntropyResult entanglement_entropy(const SubsystemMatrix& rho_a);

// n̄_j = Re <L|n_j|R> for a full-basis pair with <L|R> = 1.
std::vector<double> mean_density(const CVector& right, const CVector& left,
                                 const ConstrainedBasis& basis);

// Constrained flip P σ^x P at one site on a full-basis vector.
CVector constrained_flip(const CVector& v, const ConstrainedBasis& basis, int site);

struct CorrelationField {
  Eigen::MatrixXd values;  // (l, t)
  std::vector<int> l_range;
  std::vector<double> t_grid;
  int excitation_site = 0;
  std::vector<double> mean_density;
  double max_imag_residue = 0.0;
};

// G(l, t) after a local constrained flip on the ground pair. Periodic chains
// evolve sector by sector; open chains use the full basis.
CorrelationField correlation_G(const ModelParams& p, const std::vector<double>& t_grid,
                               int excitation_site = -1);

}  // namespace yledge
