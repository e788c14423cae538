#include "yledge/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "yledge/cache.hpp"
#include "yledge/linalg.hpp"
#include "yledge/studies.hpp"

namespace yledge::cli {

using json = nlohmann::ordered_json;

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("bad range '" + spec + "': expected A:B:STEP");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw InvalidInput("bad range '" + spec + "': expected A:B:STEP");
  return ScanRange{parts[0], parts[1], parts[2]}.grid();
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("bad integer list '" + spec + "'");
    }
  }
  return out;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_lock;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(fail_lock);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Flags shared by the model-building commands.
struct ModelFlags {
  std::string model = "detuned_pxp";
  std::string bc = "periodic";
  int n = 8;
  double h_x = 1.0, g = 0.0, alpha = kPi / 2, m = 0.0, J = 1.0, h_z = 0.0;

  void attach(CLI::App* app, bool with_m = true) {
    app->add_option("--model", model, "detuned_pxp | ising_parent | transformed_ising")->capture_default_str();
    app->add_option("--n", n, "number of sites")->capture_default_str();
    app->add_option("--bc", bc, "periodic | open")->capture_default_str();
    app->add_option("--hx", h_x, "transverse amplitude")->capture_default_str();
    app->add_option("--g", g, "non-Hermitian amplitude")->capture_default_str();
    app->add_option("--alpha", alpha, "phase of the non-Hermitian term (radians)")
        ->default_str("1.5707963267948966");
    if (with_m) app->add_option("--m", m, "half detuning")->capture_default_str();
    app->add_option("--J", J, "Ising coupling (parent model)")->capture_default_str();
    app->add_option("--hz", h_z, "longitudinal field (parent model)")->capture_default_str();
  }

  ModelParams params() const {
    ModelParams p;
    p.model = model_from_string(model);
    p.n = n;
    p.bc = boundary_from_string(bc);
    p.h_x = h_x;
    p.g = g;
    p.alpha = alpha;
    p.m = m;
    p.J = J;
    p.h_z = h_z;
    p.validate();
    return p;
  }
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidInput("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<int> resolve_sectors(const std::string& spec, const ModelParams& p) {
  if (spec.empty()) return {};
  if (spec == "all") return all_sectors(p.n);
  if (spec == "pi") return {p.n / 2};
  return parse_int_list(spec);
}

json reality_json(const RealityReport& r) {
  return {{"all_real", r.all_real},
          {"ground_real", r.ground_real},
          {"first_excited_complex_pair", r.first_excited_complex_pair},
          {"ground_real_part_degenerate", r.ground_real_part_degenerate},
          {"max_imag", r.max_imag},
          {"tolerance", r.tolerance}};
}

json fit_json(const ScalingFit& f) {
  return {{"family", to_string(f.family)},
          {"exponent", f.exponent},
          {"amplitude", f.amplitude},
          {"offset", f.offset},
          {"se_exponent", f.se_exponent},
          {"se_amplitude", f.se_amplitude},
          {"se_offset", f.se_offset},
          {"residual_rms", f.residual_rms},
          {"points", f.points}};
}

// CSV reader for `fit`: '#' comments, optional header, first two numeric columns.
void read_xy(const std::string& path, std::vector<double>& x, std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (x.empty()) continue;  // header
      throw InvalidInput("malformed row in '" + path + "': " + line);
    }
    x.push_back(a);
    y.push_back(b);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact diagonalization of the non-Hermitian detuned PXP chain", "yledge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string command_line;
  for (const auto& a : args) command_line += (command_line.empty() ? "" : " ") + a;
  // Every option of the active subcommand, defaults included.
  auto parameters = [&] {
    std::vector<std::string> lines;
    for (const auto* sub : app.get_subcommands()) {
      std::istringstream cfg(sub->config_to_str(true, false));
      std::string line;
      while (std::getline(cfg, line))
        if (!line.empty() && line[0] != '[') lines.push_back(line);
    }
    return lines;
  };
  auto header = [&](std::ostream& os) {
    os << "# yledge " << kVersion << "\n# command: " << command_line << "\n";
    for (const auto& l : parameters()) os << "# " << l << "\n";
    os << "# eigensolver: " << linalg::backend_name() << "\n# timestamp: " << timestamp() << "\n";
  };
  auto provenance = [&] {
    return json{{"version", kVersion},
                {"command", command_line},
                {"parameters", parameters()},
                {"eigensolver", linalg::backend_name()},
                {"timestamp", timestamp()}};
  };

  std::string out_path;
  int jobs = 1;
  std::function<void()> action;

  // basis
  auto* basis_cmd = app.add_subcommand("basis", "constrained basis and momentum-sector dimensions");
  ModelFlags bflags;
  std::string bk;
  basis_cmd->add_option("--n", bflags.n)->required();
  basis_cmd->add_option("--bc", bflags.bc)->capture_default_str();
  basis_cmd->add_option("--k", bk, "momentum indices, comma separated, or 'all'");
  basis_cmd->add_option("--out", out_path);
  basis_cmd->callback([&] {
    action = [&] {
      const Boundary bc = boundary_from_string(bflags.bc);
      const auto basis = enumerate_basis(bflags.n, bc);
      json j{{"n", bflags.n}, {"bc", to_string(bc)}, {"dim", basis.size()}, {"sectors", json::array()}};
      std::vector<int> ks;
      if (!bk.empty()) {
        ks = bk == "all" ? all_sectors(bflags.n) : parse_int_list(bk);
      } else if (bc == Boundary::periodic && bflags.n >= 2) {
        ks = all_sectors(bflags.n);
      }
      for (const auto& s : build_momentum_sectors(basis, ks))
        j["sectors"].push_back({{"k_index", s.k_index}, {"dim", s.dim()}});
      j["provenance"] = provenance();
      Output o(out_path, out);
      *o << j.dump(2) << "\n";
    };
  });

  // hamiltonian
  auto* ham_cmd = app.add_subcommand("hamiltonian", "write the Hamiltonian as sparse text");
  ModelFlags hflags;
  hflags.attach(ham_cmd);
  int hk = -1;
  ham_cmd->add_option("--k", hk, "momentum index (default: full basis)");
  ham_cmd->add_option("--out", out_path);
  ham_cmd->callback([&] {
    action = [&] {
      const ModelParams p = hflags.params();
      OperatorMatrix h;
      if (p.model != Model::detuned_pxp) {
        if (hk >= 0) throw InvalidInput("--k applies to the constrained model only");
        h = build_ising_hamiltonian(p);
      } else if (hk >= 0) {
        const auto basis = enumerate_basis(p.n, p.bc);
        h = build_sector_hamiltonian(p, build_momentum_sector(basis, hk));
      } else {
        h = build_pxp_hamiltonian(p, enumerate_basis(p.n, p.bc));
      }
      Output o(out_path, out);
      header(*o);
      *o << "# format: dim nnz, then row col re im (0-based)\n";
      *o << h.dim << " " << h.nnz() << "\n";
      for (const auto& e : h.entries)
        *o << e.row() << " " << e.col() << " " << fmt(e.value().real()) << " " << fmt(e.value().imag()) << "\n";
    };
  });

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "eigenvalues per momentum sector");
  ModelFlags sflags;
  sflags.attach(spec_cmd);
  std::string sk, cache_dir;
  bool as_json = false, as_csv = false, use_cache = false;
  spec_cmd->add_option("--k", sk, "momentum indices, comma separated, 'all' or 'pi' (default: full basis)");
  spec_cmd->add_flag("--json", as_json);
  spec_cmd->add_flag("--csv", as_csv);
  auto* cache_opt = spec_cmd->add_option("--cache", cache_dir, "cache directory (YLEDGE_CACHE overrides the default)")
                        ->expected(0, 1);
  spec_cmd->add_option("--out", out_path);
  spec_cmd->callback([&] {
    action = [&] {
      if (as_json && as_csv) throw InvalidInput("--json and --csv are exclusive");
      use_cache = cache_opt->count() > 0;
      const ModelParams p = sflags.params();
      std::vector<std::pair<int, CVector>> blocks;
      if (p.model != Model::detuned_pxp) {
        if (!sk.empty()) throw InvalidInput("--k applies to the constrained model only");
        blocks.emplace_back(-1, linalg::eigenvalues(build_ising_hamiltonian(p).dense()));
      } else {
        ChainSystem sys(p.n, p.bc);
        std::vector<int> ks = resolve_sectors(sk, p);
        if (ks.empty()) ks.push_back(-1);
        std::optional<SpectrumCache> cache;
        if (use_cache) cache.emplace(cache_dir.empty() ? SpectrumCache::default_dir() : std::filesystem::path(cache_dir));
        for (int k : ks) {
          if (k >= 0 && p.bc != Boundary::periodic) throw InvalidInput("momentum sectors need periodic bc");
          CVector ev;
          if (cache) {
            try {
              ev = cache->get_or_compute(p, sys, k).eigenvalues;
            } catch (const ExceptionalPointError&) {
              ev.resize(0);  // defective: eigenvalues only, nothing cached
            }
          }
          if (ev.size() == 0) {
            const CMatrix h = k < 0 ? sys.full_matrix(p) : sys.sector_matrix(p, k);
            ev = linalg::eigenvalues(h);
            const auto order = spectral_order(ev);
            CVector sorted(ev.size());
            for (Eigen::Index i = 0; i < ev.size(); ++i) sorted[i] = ev[static_cast<Eigen::Index>(order[i])];
            ev = sorted;
          }
          blocks.emplace_back(k, std::move(ev));
        }
      }
      Output o(out_path, out);
      if (as_json) {
        json j{{"provenance", provenance()}, {"blocks", json::array()}};
        std::vector<cplx> all;
        for (const auto& [k, ev] : blocks) {
          json b{{"k_index", k}, {"eigenvalues", json::array()}};
          for (auto e : ev) {
            b["eigenvalues"].push_back({e.real(), e.imag()});
            all.push_back(e);
          }
          j["blocks"].push_back(b);
        }
        CVector u = Eigen::Map<CVector>(all.data(), static_cast<Eigen::Index>(all.size()));
        j["reality"] = reality_json(classify_spectrum_reality(u));
        *o << j.dump(2) << "\n";
      } else {
        header(*o);
        *o << "k_index,re,im\n";
        for (const auto& [k, ev] : blocks)
          for (auto e : ev) *o << k << "," << fmt(e.real()) << "," << fmt(e.imag()) << "\n";
      }
    };
  });

  // entropy
  auto* ent_cmd = app.add_subcommand("entropy", "half-chain entropy of the ground pair versus m");
  ModelFlags eflags;
  eflags.attach(ent_cmd, false);
  std::string e_range, e_cut = "N/2", e_kind = "biortho";
  ent_cmd->add_option("--m-range", e_range, "A:B:STEP")->required();
  ent_cmd->add_option("--cut", e_cut, "subsystem length or N/2")->capture_default_str();
  ent_cmd->add_option("--kind", e_kind, "biortho | self")->capture_default_str();
  ent_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  ent_cmd->add_option("--out", out_path);
  ent_cmd->callback([&] {
    action = [&] {
      const ModelParams base = eflags.params();
      const auto ms = parse_range(e_range);
      Cut cut = half_chain_cut(base.n);
      if (e_cut != "N/2") {
        const auto len = parse_int_list(e_cut);
        if (len.size() != 1 || len[0] < 1 || len[0] >= base.n) throw InvalidInput("--cut must be in [1, N)");
        cut.length = len[0];
      }
      if (e_kind != "biortho" && e_kind != "self") throw InvalidInput("--kind must be biortho or self");
      const DensityKind kind = e_kind == "self" ? DensityKind::self_normal : DensityKind::biorthogonal;
      ChainSystem sys(base.n, base.bc);
      std::vector<EntropyResult> res(ms.size());
      parallel_for(ms.size(), jobs, [&](std::size_t i) {
        const ModelParams p = base.with_m(ms[i]);
        const auto g = ground_over_sectors(p, sys, ground_sectors(p.n));
        res[i] = entanglement_entropy(reduced_density_matrix(g.right_full, g.left_full, sys.basis(), cut, kind));
      });
      Output o(out_path, out);
      header(*o);
      *o << "m,S,imag_residue\n";
      for (std::size_t i = 0; i < ms.size(); ++i)
        *o << fmt(ms[i]) << "," << fmt(res[i].value) << "," << fmt(res[i].imag_residue) << "\n";
    };
  });

  // correlation
  auto* cor_cmd = app.add_subcommand("correlation", "G(l, t) after a local constrained flip");
  ModelFlags cflags;
  cflags.attach(cor_cmd);
  double c_tmax = 10.0, c_dt = 0.25;
  int c_site = -1;
  cor_cmd->add_option("--t-max", c_tmax)->capture_default_str();
  cor_cmd->add_option("--dt", c_dt)->capture_default_str();
  cor_cmd->add_option("--site", c_site, "excitation site (default N/2)");
  cor_cmd->add_option("--out", out_path);
  cor_cmd->callback([&] {
    action = [&] {
      const ModelParams p = cflags.params();
      if (!(c_dt > 0.0) || c_tmax < 0.0) throw InvalidInput("need --dt > 0 and --t-max >= 0");
      const auto t = ScanRange{0.0, c_tmax, c_dt}.grid();
      const auto f = correlation_G(p, t, c_site);
      Output o(out_path, out);
      header(*o);
      *o << "# excitation_site: " << f.excitation_site << "\nl,t,G\n";
      for (std::size_t ti = 0; ti < t.size(); ++ti)
        for (std::size_t li = 0; li < f.l_range.size(); ++li)
          *o << f.l_range[li] << "," << fmt(t[ti]) << ","
             << fmt(f.values(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ti))) << "\n";
    };
  });

  // echo
  auto* echo_cmd = app.add_subcommand("echo", "Loschmidt echo after a quench m_i -> m_i + dm");
  ModelFlags qflags;
  qflags.attach(echo_cmd, false);
  std::string q_kind = "biortho", q_k;
  double q_mi = 0.0, q_dm = 0.01, q_tmax = 150.0, q_dt = 1.0;
  bool q_raw = false;
  echo_cmd->add_option("--kind", q_kind, "biortho | assoc | self")->capture_default_str();
  echo_cmd->add_option("--mi", q_mi)->required();
  echo_cmd->add_option("--dm", q_dm)->capture_default_str();
  echo_cmd->add_option("--t-max", q_tmax)->capture_default_str();
  echo_cmd->add_option("--dt", q_dt)->capture_default_str();
  echo_cmd->add_option("--k", q_k, "candidate sectors for the initial ground state (default 0)");
  echo_cmd->add_flag("--raw", q_raw, "self-normal echo without per-time normalization");
  echo_cmd->add_option("--out", out_path);
  echo_cmd->callback([&] {
    action = [&] {
      QuenchSpec q;
      q.params = qflags.params();
      q.params.m = q_mi;
      q.m_f = q_mi + q_dm;
      q.t_max = q_tmax;
      q.dt = q_dt;
      q.T = q_tmax;
      q.sectors = resolve_sectors(q_k, q.params);
      const EchoKind kind = echo_kind_from_string(q_kind);
      if (q_raw && kind != EchoKind::self_normal) throw InvalidInput("--raw applies to --kind self");
      EchoSeries s = kind == EchoKind::biorthogonal ? biorthogonal_echo(q)
                     : kind == EchoKind::associated ? associated_echo(q)
                                                    : self_normal_echo(q, !q_raw);
      Output o(out_path, out);
      header(*o);
      *o << "t,re,im\n";
      for (std::size_t i = 0; i < s.t.size(); ++i)
        *o << fmt(s.t[i]) << "," << fmt(s.values[i].real()) << "," << fmt(s.values[i].imag()) << "\n";
    };
  });

  // rate-scan
  auto* rate_cmd = app.add_subcommand("rate-scan", "short-time average rate function versus m");
  ModelFlags rflags;
  rflags.attach(rate_cmd, false);
  std::string r_range, r_kind = "biortho";
  double r_dm = 0.01, r_T = 20.0, r_dt = 0.05;
  rate_cmd->add_option("--m-range", r_range, "A:B:STEP")->required();
  rate_cmd->add_option("--dm", r_dm)->capture_default_str();
  rate_cmd->add_option("--T", r_T, "averaging window")->capture_default_str();
  rate_cmd->add_option("--dt", r_dt)->capture_default_str();
  rate_cmd->add_option("--kind", r_kind, "biortho | assoc | self")->capture_default_str();
  rate_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  rate_cmd->add_option("--out", out_path);
  rate_cmd->callback([&] {
    action = [&] {
      const ModelParams base = rflags.params();
      const auto ms = parse_range(r_range);
      const EchoKind kind = echo_kind_from_string(r_kind);
      std::vector<RateResult> res(ms.size());
      parallel_for(ms.size(), jobs, [&](std::size_t i) {
        QuenchSpec q;
        q.params = base.with_m(ms[i]);
        q.m_f = ms[i] + r_dm;
        q.t_max = r_T;
        q.dt = r_dt;
        q.T = r_T;
        res[i] = short_time_average_rate(q, kind);
      });
      Output o(out_path, out);
      header(*o);
      *o << "m,rate,imag_residue\n";
      for (std::size_t i = 0; i < ms.size(); ++i)
        *o << fmt(ms[i]) << "," << fmt(res[i].rate) << "," << fmt(res[i].imag_residue) << "\n";
    };
  });

  // fidelity
  auto* fid_cmd = app.add_subcommand("fidelity", "fidelity susceptibility versus m");
  ModelFlags fflags;
  fflags.attach(fid_cmd, false);
  std::string f_kind = "rl", f_range;
  double f_dm = 1e-4;
  fid_cmd->add_option("--kind", f_kind, "rr | rl")->capture_default_str();
  fid_cmd->add_option("--m-range", f_range, "A:B:STEP")->required();
  fid_cmd->add_option("--dm", f_dm)->capture_default_str();
  fid_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  fid_cmd->add_option("--out", out_path);
  fid_cmd->callback([&] {
    action = [&] {
      const ModelParams base = fflags.params();
      const auto ms = parse_range(f_range);
      const FidelityKind kind = fidelity_kind_from_string(f_kind);
      ChainSystem sys(base.n, base.bc);
      const std::vector<int> k0 = ground_sectors(base.n);
      std::vector<FidelityResult> res(ms.size());
      parallel_for(ms.size(), jobs, [&](std::size_t i) {
        res[i] = fidelity_susceptibility(base.with_m(ms[i]), sys, f_dm, kind, k0);
      });
      Output o(out_path, out);
      header(*o);
      *o << "m,chi,chi_per_site,imag_residue\n";
      for (std::size_t i = 0; i < ms.size(); ++i)
        *o << fmt(ms[i]) << "," << fmt(res[i].chi) << "," << fmt(res[i].chi / base.n) << ","
           << fmt(res[i].imag_residue) << "\n";
    };
  });

  // phase-diagram
  auto* pd_cmd = app.add_subcommand("phase-diagram", "label a (g, m) grid");
  ModelFlags pflags;
  pflags.attach(pd_cmd, false);
  std::string p_grange, p_mrange, p_k;
  double p_budget = 0.0;
  bool p_no_transitions = false;
  pd_cmd->add_option("--g-range", p_grange, "A:B:STEP")->required();
  pd_cmd->add_option("--m-range", p_mrange, "A:B:STEP")->required();
  pd_cmd->add_option("--k", p_k, "sectors used for the reality tests (default 0 and pi)");
  pd_cmd->add_option("--budget", p_budget, "wall-clock budget in seconds (0 = none)")->capture_default_str();
  pd_cmd->add_flag("--no-transitions", p_no_transitions, "skip the bisection of m_c1..m_c4");
  pd_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  pd_cmd->add_option("--out", out_path);
  pd_cmd->callback([&] {
    action = [&] {
      const ModelParams base = pflags.params();
      ScanOptions so;
      so.jobs = jobs;
      so.budget_seconds = p_budget;
      so.transitions = !p_no_transitions;
      so.phase.sectors = resolve_sectors(p_k, base);
      const auto d = scan_phase_diagram(base, parse_range(p_grange), parse_range(p_mrange), so);
      json j{{"provenance", provenance()}, {"n", base.n}, {"complete", d.complete}, {"points", json::array()},
             {"rows", json::array()}};
      for (const auto& pt : d.points) {
        json e{{"g", pt.g}, {"m", pt.m}};
        if (pt.label) {
          e["label"] = to_string(pt.label->label);
          e["max_imag"] = pt.label->report.max_imag;
          e["gap"] = pt.label->gap;
          e["boundary"] = pt.label->boundary;
          e["exceptional_point"] = pt.label->exceptional_point;
        } else {
          e["label"] = nullptr;
        }
        j["points"].push_back(e);
      }
      for (const auto& row : d.rows) {
        json r{{"g", row.g}, {"label_changes", row.label_changes}};
        auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
        r["m_c1"] = opt(row.transitions.m_c1);
        r["m_c2"] = opt(row.transitions.m_c2);
        r["m_c3"] = opt(row.transitions.m_c3);
        r["m_c4"] = opt(row.transitions.m_c4);
        j["rows"].push_back(r);
      }
      Output o(out_path, out);
      *o << j.dump(2) << "\n";
    };
  });

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "scaling fit of (x, y) data");
  std::string fit_family = "power", fit_in;
  fit_cmd->add_option("--family", fit_family, "power | shifted | log")->capture_default_str();
  fit_cmd->add_option("--in", fit_in, "CSV with x,y columns")->required();
  fit_cmd->add_option("--out", out_path);
  fit_cmd->callback([&] {
    action = [&] {
      std::vector<double> x, y;
      read_xy(fit_in, x, y);
      const auto f = fit_scaling(x, y, fit_family_from_string(fit_family));
      json j = fit_json(f);
      j["provenance"] = provenance();
      Output o(out_path, out);
      *o << j.dump(2) << "\n";
    };
  });

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "figure datasets and fit summaries");
  std::string rep_fig, rep_dir, rep_sizes;
  rep_cmd->add_option("figure", rep_fig, "fig2 | fig3 | fig5 | fig6 | figC1 | figD1")->required();
  rep_cmd->add_option("--out-dir", rep_dir, "output directory (default reproduce_<figure>)");
  rep_cmd->add_option("--sizes", rep_sizes, "comma-separated chain lengths overriding the recipe");
  rep_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  rep_cmd->callback([&] {
    action = [&] {
      ReproduceOptions ro;
      ro.figure = rep_fig;
      ro.out_dir = rep_dir.empty() ? std::filesystem::path("reproduce_" + rep_fig) : std::filesystem::path(rep_dir);
      if (!rep_sizes.empty()) ro.sizes = parse_int_list(rep_sizes);
      ro.jobs = jobs;
      std::ostringstream hs;
      header(hs);
      for (const auto& f : reproduce(ro, hs.str())) out << f.string() << "\n";
    };
  });

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  }
  if (jobs < 1) {
    err << "error: --jobs must be at least 1\n";
    return kUsageError;
  }
  try {
    if (action) action();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputeError;
  }
  return kOk;
}

}  // namespace yledge::cli
