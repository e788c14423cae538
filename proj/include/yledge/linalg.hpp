#pragma once

#include "yledge/common.hpp"

namespace yledge::linalg {

struct EigenPairs {
  CVector values;
  CMatrix vectors;  // right eigenvectors as columns, unit 2-norm
};

// Dense nonsymmetric eigensolvers (LAPACK geev). Exactly real input is routed
// through the real driver.
CVector eigenvalues(const CMatrix& a);
EigenPairs eigen_right(const CMatrix& a);

bool exactly_real(const CMatrix& a);

// Which dense driver is in use. LAPACK is probed once with a matrix of known
// spectrum; a failing build (some OpenBLAS kernels return garbage for
// nonsymmetric problems) is replaced by Eigen's solvers.
enum class Backend { lapack, eigen };
Backend active_backend();
std::string backend_name();
void force_backend(Backend b);
// Largest eigenvalue error of the LAPACK driver on the probe matrix.
double lapack_probe_error(int n = 256);

// One eigenvector of a for the eigenvalue closest to `shift` by inverse
// iteration; returns false if the residual check fails.
bool inverse_iteration(const CMatrix& a, cplx shift, CVector& out, double rel_tol = 1e-9);

}  // namespace yledge::linalg
