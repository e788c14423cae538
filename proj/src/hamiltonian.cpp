#include "yledge/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace yledge {

std::string to_string(Model m) {
  switch (m) {
    case Model::detuned_pxp: return "detuned_pxp";
    case Model::ising_parent: return "ising_parent";
    case Model::transformed_ising: return "transformed_ising";
  }
  return "?";
}

Model model_from_string(const std::string& s) {
  if (s == "detuned_pxp" || s == "pxp") return Model::detuned_pxp;
  if (s == "ising_parent" || s == "ising") return Model::ising_parent;
  if (s == "transformed_ising") return Model::transformed_ising;
  throw InvalidInput("unknown model '" + s + "'");
}

void ModelParams::validate() const {
  if (n < 1) throw InvalidInput("site count must be positive");
  if (!(alpha >= 0.0 && alpha < 2 * kPi)) throw InvalidInput("alpha must lie in [0, 2π)");
  if (model == Model::detuned_pxp && !(h_x > 0.0)) throw InvalidInput("h_x must be positive");
  for (double v : {h_x, g, m, J, h_z})
    if (!std::isfinite(v)) throw InvalidInput("non-finite coupling");
}

namespace {

void finalize(OperatorMatrix& op) {
  auto& e = op.entries;
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  std::vector<Eigen::Triplet<cplx>> merged;
  merged.reserve(e.size());
  for (const auto& t : e) {
    if (!merged.empty() && merged.back().row() == t.row() && merged.back().col() == t.col()) {
      merged.back() = {t.row(), t.col(), merged.back().value() + t.value()};
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.value() == cplx(0.0, 0.0); });
  e = std::move(merged);
}

bool neighbours_empty(Word w, int j, int n, Boundary bc) {
  if (bc == Boundary::periodic) {
    return !excited(w, (j + n - 1) % n) && !excited(w, (j + 1) % n);
  }
  bool left = j > 0 && excited(w, j - 1);
  bool right = j + 1 < n && excited(w, j + 1);
  return !left && !right;
}

}  // namespace

CMatrix OperatorMatrix::dense() const {
  CMatrix d = CMatrix::Zero(dim, dim);
  for (const auto& t : entries) d(t.row(), t.col()) += t.value();
  return d;
}

Eigen::SparseMatrix<cplx> OperatorMatrix::sparse() const {
  Eigen::SparseMatrix<cplx> s(dim, dim);
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

bool OperatorMatrix::is_real() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const auto& t) { return t.value().imag() == 0.0; });
}

FlipAmplitudes flip_amplitudes(const ModelParams& p) {
  auto [ca, sa] = exact_cos_sin(p.alpha);
  const cplx c(p.g * ca, p.g * sa);  // g e^{iα}
  const cplx ic = cplx(0, 1) * c;
  return {p.h_x + ic, p.h_x - ic};
}

cplx effective_transverse(const ModelParams& p) {
  auto [ca, sa] = exact_cos_sin(p.alpha);
  const cplx c(p.g * ca, p.g * sa);
  return std::sqrt(cplx(p.h_x * p.h_x) + c * c);
}

OperatorMatrix build_pxp_hamiltonian(const ModelParams& p, const ConstrainedBasis& basis) {
  if (p.model != Model::detuned_pxp) throw InvalidInput("model is not detuned_pxp");
  p.validate();
  if (basis.sites() != p.n) throw InvalidInput("basis and parameter site counts differ");
  const int n = p.n;
  const auto amps = flip_amplitudes(p);
  OperatorMatrix op;
  op.dim = static_cast<Eigen::Index>(basis.size());
  op.basis_tag = "full:" + std::to_string(n) + ":" + to_string(basis.boundary());
  op.entries.reserve(basis.size() * (n / 2 + 2));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const Word w = basis.state(a);
    const auto col = static_cast<Eigen::Index>(a);
    const int count = std::popcount(w);
    if (count) op.entries.emplace_back(col, col, cplx(2.0 * p.m * count, 0.0));
    for (int j = 0; j < n; ++j) {
      if (!neighbours_empty(w, j, n, basis.boundary())) continue;
      const Word flipped = w ^ (Word{1} << j);
      auto b = basis.index_of(flipped);
      if (!b) continue;
      op.entries.emplace_back(static_cast<Eigen::Index>(*b), col,
                              excited(w, j) ? amps.lower : amps.raise);
    }
  }
  finalize(op);
  return op;
}

OperatorMatrix build_sector_hamiltonian(const ModelParams& p, const MomentumSector& sector) {
  if (p.model != Model::detuned_pxp) throw InvalidInput("model is not detuned_pxp");
  p.validate();
  if (p.bc != Boundary::periodic) throw InvalidInput("momentum sectors require periodic bc");
  if (sector.n != p.n) throw InvalidInput("sector and parameter site counts differ");
  const int n = p.n;
  const auto amps = flip_amplitudes(p);
  OperatorMatrix op;
  op.dim = static_cast<Eigen::Index>(sector.dim());
  op.basis_tag = "sector:" + std::to_string(n) + ":k" + std::to_string(sector.k_index);
  for (std::size_t a = 0; a < sector.dim(); ++a) {
    const Word w = sector.reps[a];
    const auto col = static_cast<Eigen::Index>(a);
    const int count = std::popcount(w);
    if (count) op.entries.emplace_back(col, col, cplx(2.0 * p.m * count, 0.0));
    for (int j = 0; j < n; ++j) {
      if (!neighbours_empty(w, j, n, Boundary::periodic)) continue;
      const Word flipped = w ^ (Word{1} << j);
      if (!is_blockade_legal(flipped, n, Boundary::periodic)) continue;
      const auto canon = canonicalize(flipped, n);
      auto b = sector.index_of(canon.rep);
      if (!b) continue;
      const double ratio =
          std::sqrt(static_cast<double>(sector.periods[a]) / sector.periods[*b]);
      const cplx amp = excited(w, j) ? amps.lower : amps.raise;
      op.entries.emplace_back(
          static_cast<Eigen::Index>(*b), col,
          amp * ratio * unit_root(-static_cast<long long>(sector.k_index) * canon.shift, n));
    }
  }
  finalize(op);
  return op;
}

OperatorMatrix build_ising_hamiltonian(const ModelParams& p, int max_sites) {
  if (p.model == Model::detuned_pxp) throw InvalidInput("model is not an Ising chain");
  p.validate();
  const int n = p.n;
  if (n > max_sites)
    throw BudgetExceeded("Ising chain limited to " + std::to_string(max_sites) + " sites");
  FlipAmplitudes amps;
  if (p.model == Model::ising_parent) {
    amps = flip_amplitudes(p);
  } else {
    const cplx h = effective_transverse(p);
    amps = {h, h};
  }
  const Word dim = Word{1} << n;
  OperatorMatrix op;
  op.dim = static_cast<Eigen::Index>(dim);
  op.basis_tag = "ising:" + std::to_string(n) + ":" + to_string(p.bc);
  const int bonds = p.bc == Boundary::periodic ? n : n - 1;
  for (Word w = 0; w < dim; ++w) {
    const auto col = static_cast<Eigen::Index>(w);
    double diag = 0.0;
    for (int j = 0; j < bonds; ++j) {
      const int k = (j + 1) % n;
      diag += p.J * ((excited(w, j) == excited(w, k)) ? 1.0 : -1.0);
    }
    for (int j = 0; j < n; ++j) diag += p.h_z * (excited(w, j) ? 1.0 : -1.0);
    op.entries.emplace_back(col, col, cplx(diag, 0.0));
    for (int j = 0; j < n; ++j) {
      const Word flipped = w ^ (Word{1} << j);
      op.entries.emplace_back(static_cast<Eigen::Index>(flipped), col,
                              excited(w, j) ? amps.lower : amps.raise);
    }
  }
  finalize(op);
  return op;
}

ModelParams similarity_map(const ModelParams& p) {
  if (p.model != Model::detuned_pxp) throw InvalidInput("similarity map needs detuned_pxp");
  auto [ca, sa] = exact_cos_sin(p.alpha);
  if (ca != 0.0) throw UnsupportedRegime("similarity map defined only at alpha = π/2");
  (void)sa;
  if (!(std::abs(p.g) < p.h_x))
    throw UnsupportedRegime("similarity map requires |g| < h_x (coefficient not positive real)");
  ModelParams q = p;
  q.h_x = std::sqrt(p.h_x * p.h_x - p.g * p.g);
  q.g = 0.0;
  return q;
}

ModelParams pxp_reduction(const ModelParams& ising) {
  if (ising.model != Model::ising_parent) throw InvalidInput("reduction needs ising_parent");
  ModelParams q = ising;
  q.model = Model::detuned_pxp;
  q.m = 0.5 * (ising.h_z - 2.0 * ising.J);
  return q;
}

}  // namespace yledge
