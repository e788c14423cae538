#include <doctest.h>

#include "oracles.hpp"
#include "yledge/hamiltonian.hpp"
#include "yledge/linalg.hpp"
#include "yledge/system.hpp"

using namespace yledge;

namespace {

ModelParams pxp(int n, double g, double m, double alpha = kPi / 2, Boundary bc = Boundary::periodic) {
  ModelParams p;
  p.n = n;
  p.g = g;
  p.m = m;
  p.alpha = alpha;
  p.bc = bc;
  return p;
}

std::vector<cplx> full_spectrum(const ModelParams& p) {
  return oracle::as_list(linalg::eigenvalues(build_pxp_hamiltonian(p, enumerate_basis(p.n, p.bc)).dense()));
}

double rel_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double scale = 1.0;
  for (auto x : a) scale = std::max(scale, std::abs(x));
  return oracle::multiset_distance(a, b) / scale;
}

}  // namespace

TEST_CASE("matrix elements match the Kronecker construction") {
  for (int n = 2; n <= 8; ++n)
    for (auto bc : {Boundary::periodic, Boundary::open})
      for (double alpha : {0.0, 0.7, kPi / 2, 4.0}) {
        const auto p = pxp(n, 0.37, -0.43, alpha, bc);
        const CMatrix lib = build_pxp_hamiltonian(p, enumerate_basis(n, bc)).dense();
        const CMatrix ref = oracle::kron_pxp(n, bc == Boundary::periodic, p.h_x, p.g, alpha, p.m);
        CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-14);
      }
}

TEST_CASE("hamiltonian examples") {
  const auto p3 = pxp(3, 0.0, 0.0);
  const auto b3 = enumerate_basis(3, Boundary::periodic);
  const CMatrix h3 = build_pxp_hamiltonian(p3, b3).dense();
  const auto row = *b3.index_of(0);
  for (Word w : {0b001, 0b010, 0b100}) CHECK(h3(row, *b3.index_of(w)) == cplx(1.0, 0.0));
  CHECK(std::abs(h3.row(row).sum() - 3.0) < 1e-15);

  // pure constrained raising operator: nilpotent
  const auto p4 = pxp(4, 1.0, 0.0);
  const CMatrix h4 = build_pxp_hamiltonian(p4, enumerate_basis(4, Boundary::periodic)).dense();
  CMatrix pow = h4;
  for (int i = 0; i < 4; ++i) pow = pow * h4;
  CHECK(pow.cwiseAbs().maxCoeff() == 0.0);
  for (auto e : full_spectrum(p4)) CHECK(std::abs(e) < 1e-8);

  for (int n : {5, 8})
    for (double alpha : {0.3, 2.0}) {
      const CMatrix h = build_pxp_hamiltonian(pxp(n, 0.0, 0.7, alpha), enumerate_basis(n, Boundary::periodic)).dense();
      CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  const CMatrix h0 = build_pxp_hamiltonian(pxp(6, 0.8, 0.2, 0.0), enumerate_basis(6, Boundary::periodic)).dense();
  CHECK((h0 - h0.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(build_pxp_hamiltonian(pxp(4, 0, 0), enumerate_basis(5, Boundary::periodic)), InvalidInput);
  ModelParams bad = pxp(4, 0, 0);
  bad.alpha = 7.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = pxp(4, 0, 0);
  bad.h_x = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("sector blocks reproduce the full spectrum") {
  for (int n : {4, 6, 7, 10})
    for (double g : {0.0, 0.4, 1.5}) {
      const auto p = pxp(n, g, -0.3);
      ChainSystem sys(n, Boundary::periodic);
      std::vector<cplx> u;
      for (int k = 0; k < n; ++k) {
        const CMatrix hk = sys.sector_matrix(p, k);
        if (g == 0.0) CHECK((hk - hk.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        for (auto e : oracle::as_list(linalg::eigenvalues(hk))) u.push_back(e);
      }
      CHECK(rel_distance(u, full_spectrum(p)) < 1e-9);
    }
  const auto b4 = enumerate_basis(4, Boundary::periodic);
  CHECK(build_sector_hamiltonian(pxp(4, 0, 0), build_momentum_sector(b4, 0)).dim == 3);
  CHECK_THROWS_AS(build_sector_hamiltonian(pxp(4, 0, 0, kPi / 2, Boundary::open), build_momentum_sector(b4, 0)),
                  InvalidInput);
}

TEST_CASE("similarity map") {
  const auto q = similarity_map(pxp(8, 0.6, -0.5));
  CHECK(q.h_x == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(q.g == 0.0);
  CHECK(q.m == -0.5);
  const auto id = similarity_map(pxp(8, 0.0, 0.3));
  CHECK(id.h_x == 1.0);
  CHECK_THROWS_AS(similarity_map(pxp(8, 1.0, 0.0)), UnsupportedRegime);
  CHECK_THROWS_AS(similarity_map(pxp(8, 1.3, 0.0)), UnsupportedRegime);
  CHECK_THROWS_AS(similarity_map(pxp(8, 0.5, 0.0, 0.2)), UnsupportedRegime);
  for (int n : {8, 10, 12})
    for (double g : {0.3, 0.6, 0.9}) {
      const auto p = pxp(n, g, 0.2);
      CHECK(rel_distance(full_spectrum(p), full_spectrum(similarity_map(p))) < 1e-9);
    }
}

TEST_CASE("spectral symmetries") {
  for (int n : {6, 8, 10}) {
    for (double g : {0.4, 1.3}) {
      const auto a = full_spectrum(pxp(n, g, -0.6));
      const auto b = full_spectrum(pxp(n, -g, -0.6));
      CHECK(rel_distance(a, b) < 1e-9);
      std::vector<cplx> conj;
      for (auto e : a) conj.push_back(std::conj(e));
      CHECK(rel_distance(a, conj) < 1e-9);
    }
    // purely imaginary line
    for (auto e : full_spectrum(pxp(n, 1.5, 0.0))) CHECK(std::abs(e.real()) < 1e-9);
    // Hermitian alpha line: h_x -> sqrt(1 + g^2)
    ModelParams h = pxp(n, 0.0, 0.35);
    h.h_x = std::sqrt(1.0 + 0.49);
    CHECK(rel_distance(full_spectrum(pxp(n, 0.7, 0.35, 0.0)), full_spectrum(h)) < 1e-9);
  }
}

TEST_CASE("Ising chains") {
  ModelParams p;
  p.model = Model::ising_parent;
  p.n = 2;
  p.h_x = 0.0;
  p.J = 1.0;
  p.h_z = 0.0;
  p.alpha = 0.0;
  auto ev = oracle::as_list(linalg::eigenvalues(build_ising_hamiltonian(p).dense()));
  CHECK(oracle::multiset_distance(ev, {2.0, 2.0, -2.0, -2.0}) < 1e-12);

  p.n = 6;
  p.h_x = 1.0;
  p.g = 0.4;
  p.h_z = 0.3;
  p.alpha = kPi / 2;
  ev = oracle::as_list(linalg::eigenvalues(build_ising_hamiltonian(p).dense()));
  std::vector<cplx> conj;
  for (auto e : ev) conj.push_back(std::conj(e));
  CHECK(oracle::multiset_distance(ev, conj) < 1e-9);
  // transformed form is isospectral below the exceptional point
  ModelParams t = p;
  t.model = Model::transformed_ising;
  CHECK(oracle::multiset_distance(ev, oracle::as_list(linalg::eigenvalues(build_ising_hamiltonian(t).dense()))) <
        1e-9);
  p.g = 0.0;
  const CMatrix h = build_ising_hamiltonian(p).dense();
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  p.n = 15;
  CHECK_THROWS_AS(build_ising_hamiltonian(p), BudgetExceeded);

  ModelParams parent;
  parent.model = Model::ising_parent;
  parent.J = 1.5;
  parent.h_z = 3.4;
  CHECK(pxp_reduction(parent).m == doctest::Approx(0.2));
}
