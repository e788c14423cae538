#pragma once

#include <vector>

#include "yledge/hamiltonian.hpp"
#include "yledge/spectrum.hpp"
#include "yledge/system.hpp"

namespace yledge {

// e^{-iHt}|state> from the spectral decomposition, or e^{-iH†t} when dagger.
CVector evolve(const CVector& state, const BiorthogonalSpectrum& spec, double t, bool dagger = false);

struct QuenchSpec {
  ModelParams params;  // params.m is the initial detuning m_i
  double m_f = 0.0;
  double t_max = 150.0;
  double dt = 1.0;
  double T = 150.0;  // averaging window
  std::vector<int> sectors;  // candidate sectors for the initial ground state; empty = {0}

  double dm() const { return m_f - params.m; }
  double m_i() const { return params.m; }
  void validate() const;
  std::vector<double> t_grid() const;
};

enum class EchoKind { biorthogonal, associated, self_normal };
std::string to_string(EchoKind k);
EchoKind echo_kind_from_string(const std::string& s);

struct EchoSeries {
  EchoKind kind = EchoKind::biorthogonal;
  std::vector<double> t;
  std::vector<cplx> values;
  bool normalized = true;
};

// Initial ground pair and post-quench spectrum in one momentum sector.
struct QuenchData {
  int k_index = -1;
  GroundPair initial;
  BiorthogonalSpectrum final_spec;
  RealityReport initial_reality;
  RealityReport final_reality;
};

QuenchData prepare_quench(const QuenchSpec& q, const ChainSystem& sys);

EchoSeries biorthogonal_echo(const QuenchSpec& q);
EchoSeries biorthogonal_echo(const QuenchData& d, const std::vector<double>& t);

CVector associated_left_state(const CVector& state_right, const BiorthogonalSpectrum& spec);

EchoSeries associated_echo(const QuenchSpec& q);
EchoSeries associated_echo(const QuenchData& d, const std::vector<double>& t);

EchoSeries self_normal_echo(const QuenchSpec& q, bool normalize = true);
EchoSeries self_normal_echo(const QuenchData& d, const std::vector<double>& t, bool normalize = true);

struct RateResult {
  double rate = 0.0;
  cplx mean_echo;
  double imag_residue = 0.0;
};

// Trapezoidal average over [0, T]; the last interval is interpolated when T
// is not on the grid.
cplx time_average(const EchoSeries& s, double T);

RateResult short_time_average_rate(const QuenchSpec& q, EchoKind kind = EchoKind::biorthogonal);
RateResult rate_from_series(const EchoSeries& s, double T, int n, double dm);

struct EchoMinimum {
  double t_min = 0.0;
  double value = 0.0;
};

EchoMinimum first_echo_minimum(const EchoSeries& s, double min_depth = 1e-12);

}  // namespace yledge
