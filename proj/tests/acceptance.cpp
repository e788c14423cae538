// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number, e.g. `yledge_acceptance 1 9 12`.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "yledge/cache.hpp"
#include "yledge/cli.hpp"
#include "yledge/linalg.hpp"
#include "yledge/studies.hpp"

using namespace yledge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

ModelParams pxp(int n, double g, double m, double alpha = kPi / 2) {
  ModelParams p;
  p.n = n;
  p.g = g;
  p.m = m;
  p.alpha = alpha;
  return p;
}

std::vector<cplx> full_spectrum(const ModelParams& p) {
  ChainSystem sys(p.n, p.bc);
  return oracle::as_list(linalg::eigenvalues(sys.full_matrix(p)));
}

Outcome similarity_identity() {
  double worst = 0.0;
  for (double g : {0.3, 0.6, 0.9})
    for (double m : {-1.0, -0.5, 0.2})
      for (int n : {8, 10, 12}) {
        const auto p = pxp(n, g, m);
        const auto a = full_spectrum(p), b = full_spectrum(similarity_map(p));
        double scale = 0.0;
        for (auto e : b) scale = std::max(scale, std::abs(e));
        worst = std::max(worst, oracle::multiset_distance(a, b) / scale);
      }
  return {worst < 1e-9, fmt("max relative spectral distance %.2e over 27 points", worst)};
}

std::map<double, EntropyPeakStudy> entropy_studies;

const EntropyPeakStudy& entropy_study(double g) {
  if (!entropy_studies.count(g)) {
    ModelParams base;
    base.g = g;
    entropy_studies[g] = entropy_peak_study(base, {12, 14, 16, 18, 20}, ScanRange{-1.2, -0.2, 0.05});
  }
  return entropy_studies[g];
}

Outcome critical_line() {
  bool ok = true;
  std::string d;
  for (double g : {0.0, 0.1, 0.5}) {
    const auto& s = entropy_study(g);
    const double target = -kConfinementSlope * std::sqrt(1.0 - g * g);
    const double got = s.location_fit.offset;
    ok = ok && std::abs(got - target) <= 0.01;
    d += fmt("g=%.1f m_c=%.5f (line %.5f) ", g, got, target);
  }
  return {ok, d};
}

Outcome central_charge() {
  const auto& s = entropy_study(0.1);
  const double c = s.height_fit.exponent;
  return {std::abs(c - 0.5) <= 0.1, fmt("c=%.4f +- %.4f", c, s.height_fit.se_exponent)};
}

std::optional<EchoStudy> echo;

const EchoStudy& echo_study() {
  if (!echo) {
    ModelParams base;
    base.g = 0.1;
    echo = echo_scaling_study(base, {8, 10, 12, 14, 16, 18});
  }
  return *echo;
}

Outcome echo_nu() {
  const auto& s = echo_study();
  return {std::abs(s.nu - 1.0) <= 0.15, fmt("nu=%.4f from 1-L_min ~ N^%.4f", s.nu, s.echo_fit.exponent)};
}

Outcome gap_z() {
  const auto& s = echo_study();
  return {std::abs(s.z - 1.0) <= 0.15, fmt("z=%.4f", s.z)};
}

Outcome fidelity_nu() {
  const std::vector<int> sizes{8, 10, 12, 14, 16, 18};
  const auto rr = fidelity_study(pxp(8, 0.5, 0.0, 0.0), sizes, FidelityKind::RR);
  const auto rl = fidelity_study(pxp(8, 0.5, 0.0), sizes, FidelityKind::RL);
  const bool ok = std::abs(rr.nu - 1.0) <= 0.15 && std::abs(rl.nu - 1.0) <= 0.15;
  return {ok, fmt("nu_RR=%.4f (alpha=0) nu_RL=%.4f (alpha=pi/2)", rr.nu, rl.nu)};
}

std::optional<YlesStudy> yles;

const YlesStudy& yles_data() {
  if (!yles) {
    ModelParams base;
    base.g = 1.5;
    yles = yles_study(base, {8, 10, 12, 14, 16, 18});
  }
  return *yles;
}

Outcome yles_beta() {
  const auto& s = yles_data();
  int agree = 0;
  for (std::size_t i = 0; i < s.n.size(); ++i)
    if (s.echo_change_point[i] && std::abs(*s.echo_change_point[i] - s.m_c4[i]) < 0.005) ++agree;
  return {std::abs(s.beta - 2.4) <= 0.3,
          fmt("beta=%.4f +- %.4f m_inf=%.6f; echo change point within 0.005 of m_c4 for %d/%zu sizes", s.beta,
              s.fit.se_exponent, s.m_inf, agree, s.n.size())};
}

Outcome yles_ceff() {
  ModelParams base;
  base.g = 1.5;
  const auto s = edge_entropy_study(base, {8, 10, 12, 14, 16, 18}, yles_data().m_inf);
  return {std::abs(s.c_eff - 0.4) <= 0.15, fmt("c_eff=%.4f at m=%.6f", s.c_eff, s.m_eval)};
}

Outcome ep_lines() {
  double worst_abs = 0.0, worst_re = 0.0;
  for (int n = 2; n <= 12; ++n) {
    for (auto e : full_spectrum(pxp(n, 1.0, 0.0))) worst_abs = std::max(worst_abs, std::abs(e));
    for (auto e : full_spectrum(pxp(n, 1.5, 0.0))) worst_re = std::max(worst_re, std::abs(e.real()));
  }
  return {worst_abs < 1e-8 && worst_re < 1e-8,
          fmt("max |E| at (1,0) = %.2e, max |Re E| at (1.5,0) = %.2e for N=2..12", worst_abs, worst_re)};
}

Outcome taxonomy() {
  const auto p = pxp(12, 1.5, 0.0);
  ChainSystem sys(12, p.bc);
  const auto tr = locate_transitions(p, -3.0, 3.0);
  if (!tr.m_c1 || !tr.m_c2 || !tr.m_c4) return {false, "missing transition"};
  const bool order = *tr.m_c1 < *tr.m_c2 && *tr.m_c2 < 0.0 && 0.0 < *tr.m_c4;
  const std::vector<double> probes{0.5 * (*tr.m_c1 + *tr.m_c2), 0.5 * *tr.m_c2, 0.5 * *tr.m_c4, *tr.m_c4 + 0.4};
  const std::vector<Phase> expect{Phase::BR_f1, Phase::BR_1, Phase::BR_f2, Phase::PT_confined};
  bool labels = true;
  std::string seq;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto l = classify_phase(p.with_m(probes[i]), sys, PhaseOptions{});
    labels = labels && l.label == expect[i];
    seq += (i ? " -> " : "") + to_string(l.label);
  }
  const auto fo = first_order_scan(p, ScanRange{-0.3, 0.3, 0.01}.grid());
  const bool kink = fo.discontinuity && std::abs(*fo.discontinuity) <= 0.01;
  return {order && labels && kink,
          fmt("m_c1=%.5f m_c2=%.5f m_c4=%.5f; ", *tr.m_c1, *tr.m_c2, *tr.m_c4) + seq +
              fmt("; dRe E0/dm jump %.3f at m=%s", fo.jump,
                  fo.discontinuity ? fmt("%.3f", *fo.discontinuity).c_str() : "none")};
}

Outcome confinement() {
  std::vector<double> t;
  for (double x = 0.0; x <= 20.0 + 1e-12; x += 0.25) t.push_back(x);
  const auto open = summarize_confinement(correlation_G(pxp(16, 0.1, -5.0), t));
  const auto closed = summarize_confinement(correlation_G(pxp(16, 0.1, 5.0), t));
  const bool ok = open.reach_time && *open.reach_time < 8.0 && closed.support <= 3;
  return {ok, fmt("m=-5 reaches l_max at t=%s; m=5 support |l|<=%d at 10%% of peak",
                  open.reach_time ? fmt("%.2f", *open.reach_time).c_str() : "never", closed.support)};
}

Outcome property_suites() {
  std::vector<std::string> failed;
  auto need = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  std::mt19937 rng(7);

  // biorthonormality and completeness
  double bio = 0.0;
  for (auto [n, g, m] : {std::tuple{10, 0.6, -0.3}, {10, 1.5, 1.0}, {12, 0.9, 0.4}}) {
    ChainSystem sys(n, Boundary::periodic);
    const auto s = full_eig(sys.sector_matrix(pxp(n, g, m), 0));
    const auto id = CMatrix::Identity(s.size(), s.size());
    bio = std::max({bio, (CMatrix(s.left.adjoint() * s.right) - id).cwiseAbs().maxCoeff(),
                    (CMatrix(s.right * s.left.adjoint()) - id).cwiseAbs().maxCoeff()});
  }
  need(bio < 1e-8, "biorthonormality");

  // propagator vs dense exponential
  double prop = 0.0;
  for (int n : {6, 8}) {
    const CMatrix h = oracle::kron_pxp(n, true, 1.0, 0.7, kPi / 2, -0.2);
    const auto s = full_eig(h);
    const CVector psi = oracle::random_vector(h.rows(), rng);
    for (double t : {0.5, 3.0})
      prop = std::max(prop, (evolve(psi, s, t) - oracle::expm(cplx(0, -t) * h) * psi).norm() / psi.norm());
  }
  need(prop < 1e-8, "propagator");

  // brute-force spectrum
  double brute = 0.0;
  for (int n = 2; n <= 6; ++n)
    for (auto [g, m] : {std::pair{0.4, -0.5}, {1.5, 0.7}, {2.0, -1.0}}) {
      const CMatrix h = oracle::kron_pxp(n, true, 1.0, g, kPi / 2, m);
      brute = std::max(brute, oracle::multiset_distance(oracle::charpoly_roots(h), full_spectrum(pxp(n, g, m))));
    }
  need(brute < 1e-7, "brute-force spectrum");

  // g -> -g and conjugation closure
  double flip = 0.0, conj = 0.0;
  for (auto [g, m] : {std::pair{0.5, -0.4}, {1.5, 0.3}, {1.2, -2.0}}) {
    const auto a = full_spectrum(pxp(10, g, m));
    flip = std::max(flip, oracle::multiset_distance(a, full_spectrum(pxp(10, -g, m))));
    std::vector<cplx> c;
    for (auto e : a) c.push_back(std::conj(e));
    conj = std::max(conj, oracle::multiset_distance(a, c));
  }
  need(flip < 1e-8, "g -> -g");
  need(conj < 1e-8, "conjugation closure");

  // determinism and cache round trip
  const auto dir = std::filesystem::temp_directory_path() / ("yledge_accept_" + std::to_string(rng()));
  auto run = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"yledge", "spectrum", "--n", "10", "--g", "0.8", "--m", "-0.1", "--k", "all"};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream out, err;
    cli::run(args, out, err);
    std::istringstream in(out.str());
    std::string line, kept;
    while (std::getline(in, line))
      if (line.rfind("# timestamp", 0) != 0 && line.rfind("# cache", 0) != 0) kept += line + "\n";
    return kept;
  };
  const auto a = run({}), b = run({});
  const auto cold = run({"--cache", dir.string()}), warm = run({"--cache", dir.string()});
  need(a == b, "determinism");
  need(cold == warm, "cache cold/warm");
  SpectrumCache cache(dir);
  ChainSystem sys(10, Boundary::periodic);
  const auto s1 = cache.get_or_compute(pxp(10, 0.8, -0.1), sys, 0);
  bool hit = false;
  const auto s2 = cache.get_or_compute(pxp(10, 0.8, -0.1), sys, 0, {}, &hit);
  need(hit && serialize_spectrum(s1) == serialize_spectrum(s2), "cache round trip");
  std::filesystem::remove_all(dir);

  std::string d = fmt("biortho %.1e, expm %.1e, brute %.1e, g->-g %.1e, conj %.1e", bio, prop, brute, flip, conj);
  for (const auto& f : failed) d += "; failed: " + f;
  return {failed.empty(), d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"similarity-spectrum identity", similarity_identity},
      {"critical line from entropy peaks", critical_line},
      {"central charge", central_charge},
      {"echo scaling nu", echo_nu},
      {"gap scaling z", gap_z},
      {"fidelity exponents", fidelity_nu},
      {"Yang-Lee edge exponent beta", yles_beta},
      {"Yang-Lee edge effective central charge", yles_ceff},
      {"exceptional point and imaginary line", ep_lines},
      {"phase taxonomy at g=1.5", taxonomy},
      {"confinement diagnostic", confinement},
      {"property suites", property_suites},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " [" << criteria[i].first << "] "
              << o.detail << fmt(" (%.1fs)", secs) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
