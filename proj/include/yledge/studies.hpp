#pragma once

#include <optional>
#include <vector>

#include "yledge/criticality.hpp"
#include "yledge/dynamics.hpp"
#include "yledge/observables.hpp"

namespace yledge {

// Half-chain entropy of the k = 0 ground pair.
double ground_entropy(const ModelParams& p, const ChainSystem& sys,
                      DensityKind kind = DensityKind::biorthogonal);

struct ScanRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.05;
  std::vector<double> grid() const;
};

// Peak of S(m): coarse grid, then Brent inside the bracketing cell.
Peak entropy_peak(const ModelParams& p, const ChainSystem& sys, const ScanRange& range);

struct SizeSeries {
  std::vector<int> n;
  std::vector<double> location;
  std::vector<double> value;
};

// Entropy peaks over sizes; shifted fit of the locations, log fit of the heights.
struct EntropyPeakStudy {
  double g = 0.0;
  SizeSeries peaks;
  ScalingFit location_fit;  // shifted power, offset = extrapolated m_c
  ScalingFit height_fit;    // log law, exponent = c
};

EntropyPeakStudy entropy_peak_study(const ModelParams& base, const std::vector<int>& sizes,
                                    const ScanRange& range);

// Echo pipeline: rate-function peaks, first echo minima at the peaks, and the
// k = 0 gap there.
struct EchoStudyOptions {
  double dm = 0.01;
  ScanRange range{-1.0, -0.4, 0.05};
  double rate_dt = 0.05;
  double rate_T = 20.0;
  double echo_dt = 0.01;
  double echo_t_max = 60.0;
  GapMode gap_mode = GapMode::modulus;
};

struct EchoStudy {
  std::vector<int> n;
  std::vector<double> m_pc;
  std::vector<double> rate_peak;
  std::vector<double> t_min;
  std::vector<double> l_min;
  std::vector<double> gap;
  ScalingFit echo_fit;  // 1 - L_min ~ N^p, nu = 2/p
  ScalingFit gap_fit;   // gap ~ N^p, z = -p
  double nu = 0.0;
  double z = 0.0;
};

double rate_at(const ModelParams& p, const ChainSystem& sys, const EchoStudyOptions& opt);
EchoStudy echo_scaling_study(const ModelParams& base, const std::vector<int>& sizes,
                             const EchoStudyOptions& opt = {});

struct FidelityStudy {
  FidelityKind kind = FidelityKind::RL;
  std::vector<int> n;
  std::vector<double> m_peak;
  std::vector<double> chi_max;
  ScalingFit fit;  // chi_max ~ N^p, nu = 2/p
  double nu = 0.0;
};

FidelityStudy fidelity_study(const ModelParams& base, const std::vector<int>& sizes, FidelityKind kind,
                             const ScanRange& range = {-1.3, -0.2, 0.05}, double dm = 1e-4);

// Yang-Lee edge: pseudocritical m_c4(N) from the k = 0 ground-pair
// exceptional point, with the associated-echo change point as a cross-check.
struct YlesStudyOptions {
  double scan_lo = 1.0;
  double scan_hi = 3.0;
  double bisect_tol = 1e-10;
  bool echo_cross_check = true;
  double echo_window = 0.05;
  double echo_step = 0.0025;
  double echo_t = 150.0;
  double echo_dm = 1e-4;
};

struct YlesStudy {
  std::vector<int> n;
  std::vector<double> m_c4;
  std::vector<std::optional<double>> echo_change_point;
  ScalingFit fit;  // m_c4(N) = m_inf + a N^{-beta}
  double beta = 0.0;
  double m_inf = 0.0;
};

// Upper edge of the complex-ground region of the k = 0 block.
double locate_m_c4(const ModelParams& p, const ChainSystem& sys, double lo, double hi, double tol);

// ln|L_A(t)| across m; the change point is the midpoint of the largest step
// crossing |ln L_A| = 1. Points at an exceptional point are NaN.
struct EchoScan {
  std::vector<double> m;
  std::vector<double> log_echo;
  std::optional<double> change_point;
};
std::optional<double> echo_change_point(const std::vector<double>& m, const std::vector<double>& log_echo);
EchoScan associated_echo_scan(const ModelParams& p, const ChainSystem& sys, const std::vector<double>& m,
                              double t, double dm);

YlesStudy yles_study(const ModelParams& base, const std::vector<int>& sizes,
                     const YlesStudyOptions& opt = {});

// Entropy at a fixed detuning on the PT-symmetric side of the edge.
struct EdgeEntropyStudy {
  double m_eval = 0.0;
  std::vector<int> n;
  std::vector<double> entropy;
  ScalingFit fit;  // log law, exponent = c_eff
  double c_eff = 0.0;
};

EdgeEntropyStudy edge_entropy_study(const ModelParams& base, const std::vector<int>& sizes, double m_eval);

// Correlation front after the local flip.
struct ConfinementSummary {
  std::optional<double> reach_time;  // first t with G(l_max, t) >= fraction * peak
  int support = 0;                   // largest l with G >= fraction * peak over the window
  double peak = 0.0;
};

ConfinementSummary summarize_confinement(const CorrelationField& f, double fraction = 0.1);

}  // namespace yledge
