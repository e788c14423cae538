#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "yledge/basis.hpp"

namespace yledge {

enum class Model { detuned_pxp, ising_parent, transformed_ising };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

struct ModelParams {
  Model model = Model::detuned_pxp;
  int n = 8;
  Boundary bc = Boundary::periodic;
  double h_x = 1.0;
  double g = 0.0;
  double alpha = kPi / 2;
  double m = 0.0;
  double J = 1.0;    // parent Ising only
  double h_z = 0.0;  // parent Ising only

  void validate() const;
  ModelParams with_m(double new_m) const {
    ModelParams p = *this;
    p.m = new_m;
    return p;
  }
  ModelParams with_g(double new_g) const {
    ModelParams p = *this;
    p.g = new_g;
    return p;
  }
};

struct OperatorMatrix {
  Eigen::Index dim = 0;
  std::vector<Eigen::Triplet<cplx>> entries;  // sorted by (row, col), duplicates merged
  std::string basis_tag;

  CMatrix dense() const;
  Eigen::SparseMatrix<cplx> sparse() const;
  bool is_real() const;
  std::size_t nnz() const { return entries.size(); }
};

// Matrix elements of h_x σ^x + g e^{iα} σ^y between |0> and |1> of one site,
// with <1|σ^y|0> = i and <0|σ^y|1> = -i.
struct FlipAmplitudes {
  cplx raise;  // <1|.|0>
  cplx lower;  // <0|.|1>
};
FlipAmplitudes flip_amplitudes(const ModelParams& p);

// sqrt(h_x^2 + g^2 e^{2iα}), principal branch: the single-site transverse
// coefficient after the diagonal similarity transformation.
cplx effective_transverse(const ModelParams& p);

OperatorMatrix build_pxp_hamiltonian(const ModelParams& p, const ConstrainedBasis& basis);
OperatorMatrix build_sector_hamiltonian(const ModelParams& p, const MomentumSector& sector);
OperatorMatrix build_ising_hamiltonian(const ModelParams& p, int max_sites = 14);

// Isospectral Hermitian point for the PT-symmetric line α = π/2, |g| < h_x.
ModelParams similarity_map(const ModelParams& p);

// Parent Ising couplings -> constrained model with 2m = h_z - 2J.
ModelParams pxp_reduction(const ModelParams& ising);

}  // namespace yledge
