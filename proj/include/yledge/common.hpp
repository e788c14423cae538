#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace yledge {

using cplx = std::complex<double>;
using Word = std::uint64_t;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr char kVersion[] = "1.0.0";

enum class Boundary { periodic, open };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

// Base of every library error. The CLI maps InvalidInput to exit code 2
// and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Defective (or numerically coalescing) eigenpairs near an exceptional point.
class ExceptionalPointError : public Error {
 public:
  ExceptionalPointError(const std::string& what, std::vector<cplx> unmatched = {})
      : Error(what), unmatched_(std::move(unmatched)) {}
  const std::vector<cplx>& unmatched() const { return unmatched_; }

 private:
  std::vector<cplx> unmatched_;
};

class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// e^{2πi q/n}, exact at quarter turns so that k=0 and k=π blocks stay real.
cplx unit_root(long long q, long long n);

// (cos a, sin a) snapped to exact values at multiples of π/2.
std::pair<double, double> exact_cos_sin(double a);

}  // namespace yledge
