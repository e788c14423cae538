#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "yledge/linalg.hpp"
#include "yledge/spectrum.hpp"
#include "yledge/system.hpp"

using namespace yledge;

namespace {

ModelParams pxp(int n, double g, double m, double alpha = kPi / 2) {
  ModelParams p;
  p.n = n;
  p.g = g;
  p.m = m;
  p.alpha = alpha;
  return p;
}

CMatrix full(const ModelParams& p) { return build_pxp_hamiltonian(p, enumerate_basis(p.n, p.bc)).dense(); }

void check_biorthogonal(const CMatrix& h, const BiorthogonalSpectrum& s) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() * h.rows());
  const auto n = static_cast<Eigen::Index>(s.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    CHECK((h * s.right.col(j) - s.eigenvalues[j] * s.right.col(j)).norm() < 1e-9 * scale);
    CHECK((h.adjoint() * s.left.col(j) - std::conj(s.eigenvalues[j]) * s.left.col(j)).norm() <
          1e-9 * scale * s.left.col(j).norm());
    CHECK(std::abs(s.right.col(j).norm() - 1.0) < 1e-12);
  }
  CHECK((s.left.adjoint() * s.right - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.right * s.left.adjoint() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
  for (Eigen::Index j = 1; j < n; ++j) {
    const cplx a = s.eigenvalues[j - 1], b = s.eigenvalues[j];
    CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
  }
}

}  // namespace

TEST_CASE("trivial decompositions") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = cplx(0, 2);
  const auto s = full_eig(d);
  CHECK(s.eigenvalues[0] == cplx(0, 2));  // Re 0 < Re 1
  CHECK(s.eigenvalues[1] == cplx(1, 0));
  CHECK((s.right.cwiseAbs() - s.left.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);
  check_biorthogonal(d, s);

  CMatrix jordan(2, 2);
  jordan << 0, 1, 1e-14, 0;
  CHECK_THROWS_AS(full_eig(jordan), ExceptionalPointError);
}

TEST_CASE("biorthonormalize on a known eigenstructure") {
  std::mt19937 rng(11);
  const int n = 12;
  CMatrix s = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) s.col(j) = oracle::random_vector(n, rng);
  Eigen::VectorXd lam(n);
  for (int j = 0; j < n; ++j) lam[j] = 0.5 * j - 2.0;
  const CMatrix a = s * lam.cast<cplx>().asDiagonal() * s.inverse();
  const CMatrix sinv_adj = s.inverse().adjoint();
  const auto out = biorthonormalize(s, sinv_adj * cplx(0.3, 1.7), lam.cast<cplx>());
  check_biorthogonal(a, out);
  // already biorthonormal input keeps its projectors
  const auto again = biorthonormalize(out.right, out.left, out.eigenvalues);
  for (int j = 0; j < n; ++j)
    CHECK((again.right.col(j) * again.left.col(j).adjoint() - out.right.col(j) * out.left.col(j).adjoint())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("model decompositions satisfy the biorthogonal invariants") {
  for (auto [g, m] : {std::pair{0.1, -0.5}, {0.6, 0.3}, {1.5, -0.8}, {1.5, 1.0}}) {
    const auto p = pxp(8, g, m);
    ChainSystem sys(8, Boundary::periodic);
    for (int k : {0, 3, 4}) {
      const CMatrix h = sys.sector_matrix(p, k);
      check_biorthogonal(h, full_eig(h));
    }
  }
  const auto real = full_eig(full(pxp(8, 0.1, -0.5)));
  for (auto e : real.eigenvalues) CHECK(std::abs(e.imag()) < 1e-9);
  ChainSystem sys8(8, Boundary::periodic);
  const auto broken = union_eigenvalues(pxp(8, 1.5, -1.0), sys8, all_sectors(8));
  double max_imag = 0.0;
  for (auto e : broken) max_imag = std::max(max_imag, std::abs(e.imag()));
  CHECK(max_imag > 1e-3);
}

TEST_CASE("Hermitian oracle") {
  for (int n : {6, 9, 10}) {
    const CMatrix h = full(pxp(n, 0.0, -0.4));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const auto s = full_eig(h);
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
      CHECK(std::abs(s.eigenvalues[j] - es.eigenvalues()[j]) < 1e-10);
      CHECK(s.condition[static_cast<std::size_t>(j)] == doctest::Approx(1.0).epsilon(1e-9));
    }
    // left equals right up to phase
    for (Eigen::Index j = 0; j < h.rows(); ++j)
      CHECK(std::abs(std::abs(s.left.col(j).dot(s.right.col(j))) - 1.0) < 1e-9);
  }
}

TEST_CASE("brute-force characteristic-polynomial oracle") {
  for (int n = 2; n <= 6; ++n)
    for (auto [g, m, alpha] : {std::tuple{0.45, 0.37, 1.1}, {1.4, -0.2, kPi / 2}, {0.3, 0.8, 0.0}}) {
      const CMatrix h = full(pxp(n, g, m, alpha));
      const auto roots = oracle::charpoly_roots(h);
      const auto lib = oracle::as_list(full_eig(h).eigenvalues);
      CHECK(oracle::multiset_distance(lib, roots) < 1e-6);
    }
}

TEST_CASE("backends agree") {
  const CMatrix h = full(pxp(10, 1.5, 0.4));
  CHECK(linalg::lapack_probe_error() < 1e-8 * 256);
  const auto before = linalg::active_backend();
  const auto a = oracle::as_list(linalg::eigenvalues(h));
  linalg::force_backend(linalg::Backend::eigen);
  const auto b = oracle::as_list(linalg::eigenvalues(h));
  const auto pairs = linalg::eigen_right(h);
  linalg::force_backend(before);
  CHECK(oracle::multiset_distance(a, b) < 1e-9);
  for (Eigen::Index j = 0; j < pairs.values.size(); ++j)
    CHECK((h * pairs.vectors.col(j) - pairs.values[j] * pairs.vectors.col(j)).norm() < 1e-9);
}

TEST_CASE("ground selection") {
  CVector ev(3);
  ev << -3, -1, 2;
  CHECK(select_ground_state(ev) == 0);
  ev << cplx(-1, 0.5), cplx(-1, -0.5), 0;
  CHECK(select_ground_state(ev) == 1);
  CVector zeros = CVector::Zero(5);
  CHECK(select_ground_state(zeros) == 0);
  const CVector ep = full_eig(full(pxp(6, 0.4, 0.2))).eigenvalues;  // deterministic on repeat
  CHECK(select_ground_state(ep) == select_ground_state(full_eig(full(pxp(6, 0.4, 0.2))).eigenvalues));
}

TEST_CASE("reality report") {
  CVector ev(4);
  ev << -2, -1, cplx(0.5, 0.3), cplx(0.5, -0.3);
  auto r = classify_spectrum_reality(ev);
  CHECK_FALSE(r.all_real);
  CHECK(r.ground_real);
  CHECK(r.max_imag == doctest::Approx(0.3));
  ev << cplx(-2, 0.1), cplx(-2, -0.1), 1, 2;
  r = classify_spectrum_reality(ev);
  CHECK(r.ground_real_part_degenerate);
  CHECK_FALSE(r.ground_real);
  ev << -2, cplx(-1, 0.2), cplx(-1, -0.2), 3;
  r = classify_spectrum_reality(ev);
  CHECK(r.first_excited_complex_pair);

  ChainSystem sys(8, Boundary::periodic);
  const auto ks = classification_sectors(8);
  CHECK(classify_spectrum_reality(union_eigenvalues(pxp(8, 0.1, -0.5), sys, ks)).all_real);
  const auto degenerate = classify_spectrum_reality(union_eigenvalues(pxp(8, 1.5, 1.0), sys, ks));
  CHECK(degenerate.ground_real_part_degenerate);
}

TEST_CASE("gap") {
  CVector ev(2);
  ev << 0, 1;
  CHECK(energy_gap(ev) == 1.0);
  CHECK_THROWS(energy_gap(CVector::Zero(1)));
  const auto ep = linalg::eigenvalues(full(pxp(8, 1.0, 0.0)));
  CHECK(energy_gap(ep) < 1e-8);
  ev.resize(3);
  ev << cplx(-1, 0.4), cplx(-1, -0.4), 2;
  CHECK(energy_gap(ev, GapMode::modulus) == doctest::Approx(0.8));
  CHECK(energy_gap(ev, GapMode::real_gap) == doctest::Approx(std::abs(cplx(3, 0.4))));
}

TEST_CASE("ground pair matches the full decomposition") {
  for (auto [g, m] : {std::pair{0.1, -0.6}, {1.5, 0.5}, {1.5, -1.8}}) {
    ChainSystem sys(12, Boundary::periodic);
    const CMatrix h = sys.sector_matrix(pxp(12, g, m), 0);
    const auto gp = ground_pair(h);
    const auto ref = ground_pair_of(full_eig(h));
    CHECK(std::abs(gp.energy - ref.energy) < 1e-10);
    CHECK(std::abs(gp.left.dot(gp.right) - 1.0) < 1e-10);
    CHECK((gp.right * gp.left.adjoint() - ref.right * ref.left.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
  }
}
