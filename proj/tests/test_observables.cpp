#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "yledge/observables.hpp"
#include "yledge/system.hpp"

using namespace yledge;

namespace {

ModelParams pxp(int n, double g, double m) {
  ModelParams p;
  p.n = n;
  p.g = g;
  p.m = m;
  return p;
}

CVector embed(const CVector& v, const ConstrainedBasis& b) {
  CVector out = CVector::Zero(Eigen::Index{1} << b.sites());
  for (std::size_t i = 0; i < b.size(); ++i) out[static_cast<Eigen::Index>(b.state(i))] = v[static_cast<Eigen::Index>(i)];
  return out;
}

// Partial trace over the high sites in the 2^N product space, then -sum l ln l.
double product_space_entropy(const CVector& r, const CVector& l, int n, int la) {
  const int da = 1 << la, db = 1 << (n - la);
  const cplx norm = l.dot(r);
  CMatrix rho = CMatrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int bb = 0; bb < db; ++bb) rho(a, a2) += r[a + da * bb] * std::conj(l[a2 + da * bb]);
  rho /= norm;
  Eigen::ComplexEigenSolver<CMatrix> es(rho);
  cplx s = 0.0;
  for (auto lam : es.eigenvalues())
    if (std::abs(lam) > 1e-12) s -= lam * std::log(lam);
  return s.real();
}

}  // namespace

TEST_CASE("biorthogonal density matrix") {
  const auto p = pxp(8, 0.5, -0.3);
  const auto basis = enumerate_basis(8, Boundary::periodic);
  const auto spec = full_eig(build_pxp_hamiltonian(p, basis).dense());
  const auto g = select_ground_state(spec.eigenvalues);
  const auto rho = biorthogonal_density_matrix(spec, g);
  CHECK(std::abs(rho.rho.trace() - 1.0) < 1e-10);
  CHECK(std::abs((rho.rho * rho.rho).trace() - 1.0) < 1e-8);
  Eigen::ComplexEigenSolver<CMatrix> es(rho.rho);
  int ones = 0;
  for (auto lam : es.eigenvalues()) {
    if (std::abs(lam - 1.0) < 1e-9) ++ones;
    else CHECK(std::abs(lam) < 1e-9);
  }
  CHECK(ones == 1);

  const auto herm = full_eig(build_pxp_hamiltonian(pxp(8, 0.0, -0.3), basis).dense());
  const auto hg = select_ground_state(herm.eigenvalues);
  const CVector psi = herm.right.col(static_cast<Eigen::Index>(hg));
  CHECK((biorthogonal_density_matrix(herm, hg).rho - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reduced density matrices and entropy") {
  // product state: A sees exactly its own bits
  const auto b4 = enumerate_basis(4, Boundary::periodic);
  CVector prod = CVector::Zero(static_cast<Eigen::Index>(b4.size()));
  prod[static_cast<Eigen::Index>(*b4.index_of(0b0101))] = 1.0;
  const auto ra = reduced_density_matrix(prod, prod, b4, Cut{0, 2});
  CHECK(std::abs(ra.rho.trace() - 1.0) < 1e-14);
  for (std::size_t i = 0; i < ra.configs.size(); ++i)
    for (std::size_t j = 0; j < ra.configs.size(); ++j) {
      const double expect = (ra.configs[i] == 0b01 && ra.configs[j] == 0b01) ? 1.0 : 0.0;
      CHECK(std::abs(ra.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expect) < 1e-15);
    }
  CHECK(entanglement_entropy(ra).value == doctest::Approx(0.0));

  // one excitation shared by two open sites, A = {0}
  const auto b2 = enumerate_basis(2, Boundary::open);
  CVector bell = CVector::Zero(static_cast<Eigen::Index>(b2.size()));
  bell[static_cast<Eigen::Index>(*b2.index_of(0b10))] = 1.0 / std::sqrt(2.0);
  bell[static_cast<Eigen::Index>(*b2.index_of(0b01))] = 1.0 / std::sqrt(2.0);
  CHECK(entanglement_entropy(reduced_density_matrix(bell, bell, b2, Cut{0, 1})).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(cut_from_sites({0, 2}, 6, Boundary::periodic), InvalidInput);
  const auto wrap = cut_from_sites({5, 0, 1}, 6, Boundary::periodic);
  CHECK(wrap.start == 5);
  CHECK(wrap.length == 3);
  CHECK_THROWS_AS(cut_from_sites({5, 0}, 6, Boundary::open), InvalidInput);
}

TEST_CASE("entropy against product-space oracles") {
  for (auto [g, m] : {std::pair{0.0, -0.7}, {0.5, -0.6}, {0.5, 0.4}, {1.5, 3.0}}) {
    const int n = 10;
    const auto p = pxp(n, g, m);
    ChainSystem sys(n, Boundary::periodic);
    const auto gr = ground_over_sectors(p, sys, ground_sectors(n));
    const auto lib = entanglement_entropy(reduced_density_matrix(gr.right_full, gr.left_full, sys.basis(),
                                                                 half_chain_cut(n)));
    const CVector r = embed(gr.right_full, sys.basis()), l = embed(gr.left_full, sys.basis());
    CHECK(lib.value == doctest::Approx(product_space_entropy(r, l, n, n / 2)).epsilon(1e-9));
    if (g == 0.0) CHECK(lib.value == doctest::Approx(oracle::schmidt_entropy(r / r.norm(), n, n / 2)).epsilon(1e-9));
    CHECK(lib.imag_residue < 1e-8);
  }
}

TEST_CASE("gauge invariance") {
  std::mt19937 rng(3);
  const auto p = pxp(10, 0.6, -0.5);
  ChainSystem sys(10, Boundary::periodic);
  const auto gr = ground_over_sectors(p, sys, ground_sectors(10));
  const Cut cut = half_chain_cut(10);
  const double s0 = entanglement_entropy(reduced_density_matrix(gr.right_full, gr.left_full, sys.basis(), cut)).value;
  const auto n0 = mean_density(gr.right_full, gr.left_full, sys.basis());
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx c = std::polar(u(rng), 2.0 * u(rng));
    const CVector r = gr.right_full * c;
    const CVector l = gr.left_full / std::conj(c);
    CHECK(std::abs(entanglement_entropy(reduced_density_matrix(r, l, sys.basis(), cut)).value - s0) < 1e-9);
    const auto n1 = mean_density(r, l, sys.basis());
    for (std::size_t j = 0; j < n0.size(); ++j) CHECK(std::abs(n1[j] - n0[j]) < 1e-9);
  }
}

TEST_CASE("mean density") {
  ChainSystem sys(10, Boundary::periodic);
  for (double g : {0.0, 0.5}) {
    const auto gr = ground_over_sectors(pxp(10, g, -0.4), sys, ground_sectors(10));
    const auto nbar = mean_density(gr.right_full, gr.left_full, sys.basis());
    for (double x : nbar) CHECK(std::abs(x - nbar[0]) < 1e-8);
    if (g == 0.0) {
      double ref = 0.0;
      for (std::size_t i = 0; i < sys.basis().size(); ++i)
        if (sys.basis().state(i) & 1u) ref += std::norm(gr.right_full[static_cast<Eigen::Index>(i)]);
      CHECK(nbar[0] == doctest::Approx(ref / gr.right_full.squaredNorm()).epsilon(1e-10));
    }
  }
  const auto big = ground_over_sectors(pxp(10, 0.1, 50.0), sys, ground_sectors(10));
  for (double x : mean_density(big.right_full, big.left_full, sys.basis())) CHECK(x < 1e-3);
}

TEST_CASE("correlation field") {
  // The formula sums ground-state connected correlations over every j, so a
  // strict |l| <= 1 support at t = 0 only holds where the ground state is close
  // to the empty product state.
  const auto confined = correlation_G(pxp(10, 0.1, 5.0), {0.0, 0.5, 1.0, 2.0});
  CHECK(confined.excitation_site == 5);
  CHECK(confined.values.allFinite());
  CHECK(confined.values.minCoeff() >= 0.0);
  const double peak = confined.values.col(0).maxCoeff();
  for (std::size_t li = 0; li < confined.l_range.size(); ++li)
    if (std::abs(confined.l_range[li]) > 1) CHECK(confined.values(static_cast<Eigen::Index>(li), 0) < 1e-3 * peak);

  const auto open = correlation_G([] {
    auto p = pxp(9, 0.2, -0.8);
    p.bc = Boundary::open;
    return p;
  }(), {0.0, 1.5});
  CHECK(open.values.allFinite());
  CHECK(open.l_range.size() == 9);

  CHECK_THROWS_AS(correlation_G(pxp(8, 1.5, -1.0), {0.0, 1.0}), UnsupportedRegime);
  CHECK_THROWS_AS(correlation_G(pxp(10, 0.1, -1.0), {0.0}, 12), InvalidInput);
  CHECK_THROWS_AS(correlation_G(pxp(10, 0.1, -1.0), {}), InvalidInput);
}

TEST_CASE("correlation field gauge invariance and Hermitian oracle") {
  // g = 0: two real-time amplitudes by dense expm in the constrained space
  const int n = 8;
  const auto p = pxp(n, 0.0, -0.6);
  const auto f = correlation_G(p, {0.0, 0.7});
  CHECK(f.max_imag_residue < 1e-10);
  const CMatrix h = oracle::kron_pxp(n, true, 1.0, 0.0, 0.0, -0.6);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector gs = es.eigenvectors().col(0);
  const auto words = oracle::brute_basis(n, true);
  std::vector<double> nbar(n, 0.0);
  for (std::size_t a = 0; a < words.size(); ++a)
    for (int j = 0; j < n; ++j)
      if ((words[a] >> j) & 1u) nbar[j] += std::norm(gs[static_cast<Eigen::Index>(a)]);
  CVector psi = CVector::Zero(gs.size());
  const int site = n / 2;
  for (std::size_t a = 0; a < words.size(); ++a) {
    const auto flipped = words[a] ^ (std::uint64_t{1} << site);
    const auto it = std::find(words.begin(), words.end(), flipped);
    if (it != words.end()) psi[it - words.begin()] += gs[static_cast<Eigen::Index>(a)];
  }
  psi /= psi.norm();
  for (int ti = 0; ti < 2; ++ti) {
    const double t = ti == 0 ? 0.0 : 0.7;
    const CVector pt = oracle::expm(cplx(0, -t) * h) * psi;
    for (int d = 0; d <= n / 2; ++d) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const int k = (j + d) % n;
        cplx x = 0.0;
        for (std::size_t a = 0; a < words.size(); ++a) {
          const double aj = double((words[a] >> j) & 1u) - nbar[j];
          const double ak = double((words[a] >> k) & 1u) - nbar[k];
          x += std::conj(psi[static_cast<Eigen::Index>(a)]) * aj * ak * pt[static_cast<Eigen::Index>(a)];
        }
        acc += std::abs(x);
      }
      CHECK(f.values(d, ti) == doctest::Approx(acc.real()).epsilon(1e-9));
    }
  }
}
