#include "yledge/observables.hpp"

#include <algorithm>
#include <cmath>

#include "yledge/linalg.hpp"

namespace yledge {

BiorthogonalDensity biorthogonal_density_matrix(const BiorthogonalSpectrum& s, std::size_t j) {
  if (j >= s.size()) throw InvalidInput("state index out of range");
  if (s.condition[j] * s.condition[j] < SpectrumOptions{}.ep_tol)
    throw ExceptionalPointError("density matrix of a defective pair");
  const auto c = static_cast<Eigen::Index>(j);
  BiorthogonalDensity d;
  d.rho = s.right.col(c) * s.left.col(c).adjoint();
  d.trace = d.rho.trace();
  d.rho /= d.trace;
  d.right_index = d.left_index = j;
  return d;
}

Cut half_chain_cut(int n) { return {0, n / 2}; }

Cut cut_from_sites(const std::vector<int>& sites, int n, Boundary bc) {
  if (sites.empty()) throw InvalidInput("empty subsystem");
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int s : sites) {
    if (s < 0 || s >= n) throw InvalidInput("subsystem site out of range");
    in[static_cast<std::size_t>(s)] = 1;
  }
  const int len = static_cast<int>(std::count(in.begin(), in.end(), 1));
  for (int start = 0; start < n; ++start) {
    if (!in[static_cast<std::size_t>(start)]) continue;
    if (bc == Boundary::open && start + len > n) continue;
    bool ok = true;
    for (int i = 0; i < len && ok; ++i) ok = in[static_cast<std::size_t>((start + i) % n)];
    if (ok) return {start, len};
  }
  throw InvalidInput("subsystem is not contiguous");
}

namespace {

struct Split {
  std::vector<Word> a_configs, b_configs;
  std::vector<std::size_t> a_of, b_of;  // per basis state
};

Word gather(Word w, int start, int length, int n) {
  Word out = 0;
  for (int i = 0; i < length; ++i)
    if (excited(w, (start + i) % n)) out |= Word{1} << i;
  return out;
}

Split split_basis(const ConstrainedBasis& basis, Cut cut) {
  const int n = basis.sites();
  if (cut.length < 1 || cut.length > n || cut.start < 0 || cut.start >= n)
    throw InvalidInput("invalid subsystem cut");
  if (basis.boundary() == Boundary::open && cut.start + cut.length > n)
    throw InvalidInput("subsystem is not contiguous on an open chain");
  Split s;
  std::vector<Word> aw(basis.size()), bw(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    aw[i] = gather(basis.state(i), cut.start, cut.length, n);
    bw[i] = gather(basis.state(i), (cut.start + cut.length) % n, n - cut.length, n);
  }
  auto uniq = [](std::vector<Word> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  s.a_configs = uniq(aw);
  s.b_configs = uniq(bw);
  s.a_of.resize(basis.size());
  s.b_of.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    s.a_of[i] = static_cast<std::size_t>(
        std::lower_bound(s.a_configs.begin(), s.a_configs.end(), aw[i]) - s.a_configs.begin());
    s.b_of[i] = static_cast<std::size_t>(
        std::lower_bound(s.b_configs.begin(), s.b_configs.end(), bw[i]) - s.b_configs.begin());
  }
  return s;
}

}  // namespace

SubsystemMatrix reduced_density_matrix(const BiorthogonalDensity& rho,
                                       const ConstrainedBasis& basis, Cut cut) {
  if (rho.rho.rows() != static_cast<Eigen::Index>(basis.size()))
    throw InvalidInput("density matrix is not on the full constrained basis");
  const Split s = split_basis(basis, cut);
  // group basis states by their B configuration
  std::vector<std::vector<std::size_t>> by_b(s.b_configs.size());
  for (std::size_t i = 0; i < basis.size(); ++i) by_b[s.b_of[i]].push_back(i);
  SubsystemMatrix out;
  out.configs = s.a_configs;
  const auto da = static_cast<Eigen::Index>(s.a_configs.size());
  out.rho = CMatrix::Zero(da, da);
  for (const auto& group : by_b)
    for (auto i : group)
      for (auto j : group)
        out.rho(static_cast<Eigen::Index>(s.a_of[i]), static_cast<Eigen::Index>(s.a_of[j])) +=
            rho.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  const cplx tr = out.rho.trace();
  if (std::abs(tr) == 0.0) throw NumericalError("reduced density matrix has zero trace");
  out.rho /= tr;
  return out;
}

SubsystemMatrix reduced_density_matrix(const CVector& right, const CVector& left,
                                       const ConstrainedBasis& basis, Cut cut, DensityKind kind) {
  if (right.size() != static_cast<Eigen::Index>(basis.size()) || left.size() != right.size())
    throw InvalidInput("state vectors are not on the full constrained basis");
  const Split s = split_basis(basis, cut);
  const auto da = static_cast<Eigen::Index>(s.a_configs.size());
  const auto db = static_cast<Eigen::Index>(s.b_configs.size());
  CMatrix mr = CMatrix::Zero(da, db), ml = CMatrix::Zero(da, db);
  const CVector& bra = kind == DensityKind::biorthogonal ? left : right;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto a = static_cast<Eigen::Index>(s.a_of[i]);
    const auto b = static_cast<Eigen::Index>(s.b_of[i]);
    mr(a, b) = right[static_cast<Eigen::Index>(i)];
    ml(a, b) = bra[static_cast<Eigen::Index>(i)];
  }
  SubsystemMatrix out;
  out.configs = s.a_configs;
  out.rho = mr * ml.adjoint();
  const cplx tr = out.rho.trace();
  if (std::abs(tr) == 0.0) throw NumericalError("reduced density matrix has zero trace");
  out.rho /= tr;
  return out;
}

EntropyResult entanglement_entropy(const SubsystemMatrix& rho_a) {
  const cplx tr = rho_a.rho.trace();
  if (std::abs(tr - 1.0) > 1e-8) throw InvalidInput("reduced density matrix is not unit trace");
  const CVector lam = linalg::eigenvalues(rho_a.rho);
  EntropyResult r;
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const cplx l = lam[i];
    if (std::abs(l) <= 1e-12) continue;
    if (l.real() < 0.0 && std::abs(l.imag()) <= 1e-12) r.branch_cut.push_back(l);
    sum -= l * std::log(l);
  }
  r.value = sum.real();
  r.imag_residue = std::abs(sum.imag());
  return r;
}

std::vector<double> mean_density(const CVector& right, const CVector& left,
                                 const ConstrainedBasis& basis) {
  if (right.size() != static_cast<Eigen::Index>(basis.size()) || left.size() != right.size())
    throw InvalidInput("state vectors are not on the full constrained basis");
  const int n = basis.sites();
  std::vector<cplx> acc(static_cast<std::size_t>(n), 0.0);
  cplx norm = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const cplx w = std::conj(left[static_cast<Eigen::Index>(i)]) * right[static_cast<Eigen::Index>(i)];
    norm += w;
    const Word word = basis.state(i);
    for (int j = 0; j < n; ++j)
      if (excited(word, j)) acc[static_cast<std::size_t>(j)] += w;
  }
  if (std::abs(norm) == 0.0) throw ExceptionalPointError("self-orthogonal pair");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = (acc[static_cast<std::size_t>(j)] / norm).real();
  return out;
}

CVector constrained_flip(const CVector& v, const ConstrainedBasis& basis, int site) {
  const int n = basis.sites();
  if (site < 0 || site >= n) throw InvalidInput("excitation site out of range");
  CVector out = CVector::Zero(v.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Word w = basis.state(i);
    auto idx = basis.index_of(w ^ (Word{1} << site));
    if (!idx) continue;  // blocked by an excited neighbour
    out[static_cast<Eigen::Index>(*idx)] += v[static_cast<Eigen::Index>(i)];
  }
  return out;
}

}  // namespace yledge
