#pragma once

#include <functional>
#include <limits>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "yledge/hamiltonian.hpp"
#include "yledge/spectrum.hpp"
#include "yledge/system.hpp"

namespace yledge {

// ---- fidelity -------------------------------------------------------------

enum class FidelityKind { RR, RL };
std::string to_string(FidelityKind k);
FidelityKind fidelity_kind_from_string(const std::string& s);

struct FidelityResult {
  double chi = 0.0;
  cplx fidelity;
  double imag_residue = 0.0;
};

FidelityResult fidelity_susceptibility(const ModelParams& p, const ChainSystem& sys, double dm,
                                       FidelityKind kind, std::span<const int> sectors = {});
FidelityResult fidelity_susceptibility(const ModelParams& p, double dm = 1e-4,
                                       FidelityKind kind = FidelityKind::RL);

// ---- peaks ------------------------------------------------------------------

struct Peak {
  double location = 0.0;
  double value = 0.0;
  double curvature = 0.0;  // second derivative at the peak
};

// Grid argmax refined by a parabola through the bracketing samples.
Peak find_pseudocritical(const std::vector<double>& x, const std::vector<double>& y);

// Coarse grid scan of f, then Brent refinement inside the bracketing cell.
Peak refine_peak(const std::function<double(double)>& f, const std::vector<double>& grid,
                 int bits = 40);

// ---- scaling fits -----------------------------------------------------------

enum class FitFamily { power_law, shifted_power, log_law };
std::string to_string(FitFamily f);
FitFamily fit_family_from_string(const std::string& s);

// power_law:     y = a x^p
// shifted_power: y = offset + a x^{-p}
// log_law:       y = (p/3) ln x + offset
struct ScalingFit {
  FitFamily family = FitFamily::power_law;
  double exponent = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double se_exponent = 0.0;
  double se_amplitude = 0.0;
  double se_offset = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;

  double predict(double x) const;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y, FitFamily family);

// ---- phases -----------------------------------------------------------------

enum class Phase { PT_deconfined, PT_confined, BR_f1, BR_f2, BR_1 };
std::string to_string(Phase p);

inline constexpr double kConfinementSlope = 0.655;

// m_c = -0.655 * h_eff when the similarity-transformed transverse coefficient
// is real; empty otherwise.
std::optional<double> confinement_boundary(const ModelParams& p);

struct PhaseOptions {
  std::vector<int> sectors;        // empty: k = 0 and k = π
  double tol = kRealityTol;
  double boundary_tol = 1e-4;      // m-bisection tolerance; flag within 2x
  double spread_threshold = 0.1;   // correlation front fraction for deconfinement
};

struct PhaseLabel {
  Phase label = Phase::PT_confined;
  bool boundary = false;
  bool exceptional_point = false;
  RealityReport report;
  double gap = 0.0;
  double boundary_distance = std::numeric_limits<double>::quiet_NaN();
  std::string confinement_source;  // "analytic" or "correlation"
};

PhaseLabel classify_phase(const ModelParams& p, const PhaseOptions& opt = {});
PhaseLabel classify_phase(const ModelParams& p, const ChainSystem& sys, const PhaseOptions& opt);

// Fraction of the peak correlation reaching the farthest displacement within
// t <= N/2 after a local flip; used where no analytic boundary exists.
double correlation_spread(const ModelParams& p);

struct Transitions {
  std::optional<double> m_c1, m_c2, m_c3, m_c4;
};

// Reality-flag bisections at fixed g on [m_lo, m_hi].
double bisect_flag(const std::function<bool(double)>& flag, double lo, double hi, double tol);
Transitions locate_transitions(const ModelParams& p, double m_lo, double m_hi,
                               const PhaseOptions& opt = {});
// m_c4: the ground pair of the k = 0 block turns real above it.
double ground_pair_ep(const ModelParams& p, const ChainSystem& sys, double lo, double hi,
                      double tol = 1e-10);

struct FirstOrderScan {
  std::vector<double> m;
  std::vector<double> re_e0;
  std::vector<double> derivative;  // centered differences at interior points
  std::optional<double> discontinuity;
  bool inconclusive = true;
  double jump = 0.0;
  double noise = 0.0;
};

FirstOrderScan first_order_scan(const ModelParams& p, const std::vector<double>& m_grid,
                                std::span<const int> sectors = {});
// Detector on an arbitrary (x, y) series.
FirstOrderScan detect_kink(const std::vector<double>& x, const std::vector<double>& y);

struct PhasePoint {
  double g = 0.0;
  double m = 0.0;
  std::optional<PhaseLabel> label;  // empty when the budget ran out
};

struct PhaseRow {
  double g = 0.0;
  Transitions transitions;
  std::vector<double> label_changes;  // midpoints between differing neighbours
};

struct PhaseDiagram {
  std::vector<PhasePoint> points;
  std::vector<PhaseRow> rows;
  bool complete = true;
};

struct ScanOptions {
  PhaseOptions phase;
  int jobs = 1;
  double budget_seconds = 0.0;  // 0 = unlimited
  bool transitions = true;
};

PhaseDiagram scan_phase_diagram(const ModelParams& base, const std::vector<double>& g_values,
                                const std::vector<double>& m_values, const ScanOptions& opt = {});

}  // namespace yledge
