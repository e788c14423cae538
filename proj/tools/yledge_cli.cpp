#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "yledge/cli.hpp"
#include "yledge/linalg.hpp"

namespace {

// Some OpenBLAS builds pick a kernel whose nonsymmetric eigensolver is broken
// on this CPU. The core type is read when the library loads, so the only fix
// from inside the process is to start again with it pinned.
void maybe_reexec(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE") || std::getenv("YLEDGE_NO_REEXEC")) return;
  if (!__builtin_cpu_supports("avx2")) return;
  if (yledge::linalg::lapack_probe_error() < 1e-8 * 256) return;
  setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  setenv("YLEDGE_NO_REEXEC", "1", 1);
  execv("/proc/self/exe", argv);
}

}  // namespace

int main(int argc, char** argv) {
  maybe_reexec(argv);
  std::vector<std::string> args(argv, argv + argc);
  return yledge::cli::run(args, std::cout, std::cerr);
}
