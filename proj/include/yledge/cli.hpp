#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace yledge::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kComputeError = 1;
inline constexpr int kUsageError = 2;

// Runs one command line (argv[0] is the program name). Output goes to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "A:B:STEP" inclusive of B within half a step.
std::vector<double> parse_range(const std::string& spec);
// "0,3,5" or "all".
std::vector<int> parse_int_list(const std::string& spec);

// Work items [0, count) spread over `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

// Figure recipes for `reproduce`; sizes can be overridden for quick runs.
struct ReproduceOptions {
  std::string figure;
  std::filesystem::path out_dir;
  std::vector<int> sizes;  // empty = recipe default
  int jobs = 1;
};
std::vector<std::string> reproducible_figures();
// Returns the list of files written.
std::vector<std::filesystem::path> reproduce(const ReproduceOptions& opt, const std::string& provenance);

}  // namespace yledge::cli
