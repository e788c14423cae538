#include "yledge/common.hpp"

#include <cmath>

namespace yledge {

std::string to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "open"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic" || s == "pbc") return Boundary::periodic;
  if (s == "open" || s == "obc") return Boundary::open;
  throw InvalidInput("unknown boundary condition '" + s + "'");
}

cplx unit_root(long long q, long long n) {
  long long r = ((q % n) + n) % n;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == n) return {-1.0, 0.0};
  if (4 * r == n) return {0.0, 1.0};
  if (4 * r == 3 * n) return {0.0, -1.0};
  double phi = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n);
  return {std::cos(phi), std::sin(phi)};
}

std::pair<double, double> exact_cos_sin(double a) {
  double quarter = a / (kPi / 2);
  double nearest = std::round(quarter);
  if (std::abs(quarter - nearest) < 1e-14) {
    switch (((static_cast<long long>(nearest) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(a), std::sin(a)};
}

}  // namespace yledge
