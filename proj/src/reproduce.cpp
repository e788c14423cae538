#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "yledge/cli.hpp"
#include "yledge/studies.hpp"

namespace yledge::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr int kMaxSize = 20;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class Writer {
 public:
  Writer(const std::filesystem::path& dir, std::string provenance)
      : dir_(dir), provenance_(std::move(provenance)) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const std::string& columns, const std::vector<std::string>& rows) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << provenance_ << columns << "\n";
    for (const auto& r : rows) out << r << "\n";
    written_.push_back(path);
  }

  void fits(json body) {
    const auto path = dir_ / "fits.json";
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    json j{{"provenance", provenance_}};
    for (auto& [k, v] : body.items()) j[k] = v;
    out << j.dump(2) << "\n";
    written_.push_back(path);
  }

  std::vector<std::filesystem::path> files() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::string provenance_;
  std::vector<std::filesystem::path> written_;
};

json fit_entry(const ScalingFit& f) {
  return {{"family", to_string(f.family)}, {"exponent", f.exponent}, {"se_exponent", f.se_exponent},
          {"amplitude", f.amplitude},      {"offset", f.offset},     {"se_offset", f.se_offset},
          {"residual_rms", f.residual_rms}};
}

std::vector<int> sizes_or(const ReproduceOptions& opt, std::vector<int> fallback) {
  auto s = opt.sizes.empty() ? fallback : opt.sizes;
  if (s.size() < 3) throw InvalidInput("at least three sizes are needed for a scaling fit");
  for (int n : s)
    if (n < 4 || n > kMaxSize || n % 2) throw InvalidInput("sizes must be even and within [4, 20]");
  return s;
}

void fig2(const ReproduceOptions& opt, Writer& w) {
  const auto sizes = sizes_or(opt, {12, 14, 16, 18, 20});
  const ScanRange range{-1.2, -0.2, 0.05};
  const auto grid = range.grid();
  std::vector<std::string> curves, peaks;
  json fits = json::object();
  for (double g : {0.0, 0.1, 0.5}) {
    ModelParams base;
    base.g = g;
    for (int n : sizes) {
      ModelParams p = base;
      p.n = n;
      ChainSystem sys(n, p.bc);
      std::vector<double> s(grid.size());
      parallel_for(grid.size(), opt.jobs, [&](std::size_t i) { s[i] = ground_entropy(p.with_m(grid[i]), sys); });
      for (std::size_t i = 0; i < grid.size(); ++i)
        curves.push_back(num(g) + "," + std::to_string(n) + "," + num(grid[i]) + "," + num(s[i]));
    }
    const auto study = entropy_peak_study(base, sizes, range);
    for (std::size_t i = 0; i < sizes.size(); ++i)
      peaks.push_back(num(g) + "," + std::to_string(sizes[i]) + "," + num(study.peaks.location[i]) + "," +
                      num(study.peaks.value[i]));
    std::ostringstream key;
    key << "g=" << g;
    fits[key.str()] = {{"m_c_extrapolated", study.location_fit.offset},
                       {"m_c_line", -kConfinementSlope * std::sqrt(1.0 - g * g)},
                       {"c", study.height_fit.exponent},
                       {"location_fit", fit_entry(study.location_fit)},
                       {"height_fit", fit_entry(study.height_fit)}};
  }
  w.csv("entropy_curves.csv", "g,N,m,S", curves);
  w.csv("entropy_peaks.csv", "g,N,m_peak,S_peak", peaks);
  w.fits(fits);
}

void fig3(const ReproduceOptions& opt, Writer& w) {
  const auto sizes = sizes_or(opt, {8, 10, 12, 14, 16, 18});
  ModelParams base;
  base.g = 0.1;
  EchoStudyOptions eo;
  const auto grid = eo.range.grid();
  std::vector<std::string> rate_rows, echo_rows, point_rows;
  for (int n : sizes) {
    ModelParams p = base;
    p.n = n;
    ChainSystem sys(n, p.bc);
    std::vector<double> r(grid.size());
    parallel_for(grid.size(), opt.jobs, [&](std::size_t i) { r[i] = rate_at(p.with_m(grid[i]), sys, eo); });
    for (std::size_t i = 0; i < grid.size(); ++i)
      rate_rows.push_back(std::to_string(n) + "," + num(grid[i]) + "," + num(r[i]));
  }
  const auto study = echo_scaling_study(base, sizes, eo);
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    QuenchSpec q;
    q.params = base;
    q.params.n = sizes[j];
    q.params.m = study.m_pc[j];
    q.m_f = study.m_pc[j] + eo.dm;
    q.t_max = 2.0 * study.t_min[j];
    q.dt = 0.05;
    q.T = q.t_max;
    const auto s = biorthogonal_echo(q);
    for (std::size_t i = 0; i < s.t.size(); ++i)
      echo_rows.push_back(std::to_string(sizes[j]) + "," + num(s.t[i]) + "," + num(s.values[i].real()) + "," +
                          num(s.values[i].imag()));
    point_rows.push_back(std::to_string(sizes[j]) + "," + num(study.m_pc[j]) + "," + num(study.rate_peak[j]) +
                         "," + num(study.t_min[j]) + "," + num(study.l_min[j]) + "," + num(study.gap[j]));
  }
  w.csv("rate_scan.csv", "N,m,rate", rate_rows);
  w.csv("echoes.csv", "N,t,re,im", echo_rows);
  w.csv("pseudocritical.csv", "N,m_pc,rate_peak,t_min,L_min,gap", point_rows);
  w.fits({{"g", base.g},
          {"dm", eo.dm},
          {"nu", study.nu},
          {"z", study.z},
          {"echo_fit", fit_entry(study.echo_fit)},
          {"gap_fit", fit_entry(study.gap_fit)}});
}

void fig5(const ReproduceOptions& opt, Writer& w) {
  const int n = opt.sizes.empty() ? 12 : opt.sizes.front();
  if (n < 4 || n > kMaxSize || n % 2) throw InvalidInput("size must be even and within [4, 20]");
  ModelParams base;
  base.n = n;
  base.g = 1.5;
  ChainSystem sys(n, base.bc);
  const auto grid = ScanRange{-3.0, 3.0, 0.05}.grid();
  std::vector<PhaseLabel> labels(grid.size());
  parallel_for(grid.size(), opt.jobs, [&](std::size_t i) {
    labels[i] = classify_phase(base.with_m(grid[i]), sys, PhaseOptions{});
  });
  std::vector<std::string> label_rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    label_rows.push_back(num(grid[i]) + "," + to_string(labels[i].label) + "," + num(labels[i].report.max_imag) +
                         "," + num(labels[i].gap));
  const auto fine = ScanRange{-0.3, 0.3, 0.01}.grid();
  const auto scan = first_order_scan(base, fine);
  std::vector<std::string> e0_rows;
  for (std::size_t i = 0; i < fine.size(); ++i)
    e0_rows.push_back(num(fine[i]) + "," + num(scan.re_e0[i]) + "," +
                      (i == 0 || i + 1 == fine.size() ? std::string() : num(scan.derivative[i - 1])));
  const auto tr = locate_transitions(base, -3.0, 3.0);
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  w.csv("labels.csv", "m,label,max_imag,gap", label_rows);
  w.csv("ground_energy.csv", "m,re_E0,dRe_E0_dm", e0_rows);
  w.fits({{"n", n},
          {"g", base.g},
          {"m_c1", opt_json(tr.m_c1)},
          {"m_c2", opt_json(tr.m_c2)},
          {"m_c3", opt_json(tr.m_c3)},
          {"m_c4", opt_json(tr.m_c4)},
          {"derivative_jump", scan.jump},
          {"derivative_noise", scan.noise},
          {"discontinuity", opt_json(scan.discontinuity)}});
}

void fig6(const ReproduceOptions& opt, Writer& w) {
  const auto sizes = sizes_or(opt, {8, 10, 12, 14, 16, 18});
  ModelParams base;
  base.g = 1.5;
  YlesStudyOptions yo;
  yo.echo_cross_check = false;
  const auto study = yles_study(base, sizes, yo);
  std::vector<std::string> scan_rows, point_rows;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    ModelParams p = base;
    p.n = sizes[j];
    ChainSystem sys(p.n, p.bc);
    std::vector<double> ms;
    for (double m = study.m_c4[j] - yo.echo_window + 0.5 * yo.echo_step; m < study.m_c4[j] + yo.echo_window;
         m += yo.echo_step)
      ms.push_back(m);
    std::vector<double> la(ms.size());
    parallel_for(ms.size(), opt.jobs, [&](std::size_t i) {
      la[i] = associated_echo_scan(p, sys, {ms[i]}, yo.echo_t, yo.echo_dm).log_echo.front();
    });
    for (std::size_t i = 0; i < ms.size(); ++i)
      scan_rows.push_back(std::to_string(p.n) + "," + num(ms[i]) + "," + (std::isnan(la[i]) ? "" : num(la[i])));
    const auto cp = echo_change_point(ms, la);
    point_rows.push_back(std::to_string(p.n) + "," + num(study.m_c4[j]) + "," + (cp ? num(*cp) : ""));
  }
  w.csv("echo_scans.csv", "N,m,ln_abs_L_A", scan_rows);
  w.csv("pseudocritical.csv", "N,m_c4,echo_change_point", point_rows);
  w.fits({{"g", base.g},
          {"beta", study.beta},
          {"m_inf", study.m_inf},
          {"fit", fit_entry(study.fit)}});
}

void figC1(const ReproduceOptions& opt, Writer& w) {
  const auto sizes = sizes_or(opt, {8, 10, 12, 14, 16, 18});
  const ScanRange range{-1.3, -0.2, 0.05};
  const auto grid = range.grid();
  json fits = json::object();
  for (auto kind : {FidelityKind::RR, FidelityKind::RL}) {
    ModelParams base;
    base.g = 0.5;
    base.alpha = kind == FidelityKind::RR ? 0.0 : kPi / 2;
    std::vector<std::string> rows;
    const std::vector<int> k0{0};
    for (int n : sizes) {
      ModelParams p = base;
      p.n = n;
      ChainSystem sys(n, p.bc);
      std::vector<double> chi(grid.size());
      parallel_for(grid.size(), opt.jobs, [&](std::size_t i) {
        chi[i] = fidelity_susceptibility(p.with_m(grid[i]), sys, 1e-4, kind, k0).chi;
      });
      for (std::size_t i = 0; i < grid.size(); ++i)
        rows.push_back(std::to_string(n) + "," + num(grid[i]) + "," + num(chi[i]) + "," + num(chi[i] / n));
    }
    const auto study = fidelity_study(base, sizes, kind, range);
    const std::string tag = kind == FidelityKind::RR ? "rr" : "rl";
    w.csv("chi_" + tag + ".csv", "N,m,chi,chi_per_site", rows);
    fits[tag] = {{"alpha", base.alpha}, {"g", base.g}, {"nu", study.nu}, {"chi_max", study.chi_max},
                 {"m_peak", study.m_peak}, {"fit", fit_entry(study.fit)}};
  }
  w.fits(fits);
}

void figD1(const ReproduceOptions& opt, Writer& w) {
  const auto sizes = sizes_or(opt, {8, 10, 12, 14, 16, 18});
  ModelParams base;
  base.g = 1.5;
  YlesStudyOptions yo;
  yo.echo_cross_check = false;
  const auto yles = yles_study(base, sizes, yo);
  const auto study = edge_entropy_study(base, sizes, yles.m_inf);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    rows.push_back(std::to_string(sizes[i]) + "," + num(std::log(sizes[i])) + "," + num(study.entropy[i]));
  w.csv("entropy_lnN.csv", "N,lnN,S", rows);
  w.fits({{"g", base.g}, {"m_eval", study.m_eval}, {"c_eff", study.c_eff}, {"fit", fit_entry(study.fit)}});
}

}  // namespace

std::vector<std::string> reproducible_figures() { return {"fig2", "fig3", "fig5", "fig6", "figC1", "figD1"}; }

std::vector<std::filesystem::path> reproduce(const ReproduceOptions& opt, const std::string& provenance) {
  if (opt.jobs < 1) throw InvalidInput("jobs must be at least 1");
  const auto figs = reproducible_figures();
  if (std::find(figs.begin(), figs.end(), opt.figure) == figs.end())
    throw InvalidInput("unsupported figure '" + opt.figure + "'");
  Writer w(opt.out_dir, provenance);
  if (opt.figure == "fig2") fig2(opt, w);
  else if (opt.figure == "fig3") fig3(opt, w);
  else if (opt.figure == "fig5") fig5(opt, w);
  else if (opt.figure == "fig6") fig6(opt, w);
  else if (opt.figure == "figC1") figC1(opt, w);
  else figD1(opt, w);
  return w.files();
}

}  // namespace yledge::cli
