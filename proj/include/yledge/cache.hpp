#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "yledge/hamiltonian.hpp"
#include "yledge/spectrum.hpp"
#include "yledge/system.hpp"

namespace yledge {

inline constexpr std::uint8_t kCacheFormatVersion = 1;

// Little-endian layout: magic "YLSC", version byte, rows, cols (u64), then
// eigenvalues, right, left (column-major complex doubles), condition, and a
// trailing SHA-256 of everything before it.
std::vector<std::uint8_t> serialize_spectrum(const BiorthogonalSpectrum& s);
// Throws NumericalError on a bad magic, version, size or checksum.
BiorthogonalSpectrum deserialize_spectrum(const std::vector<std::uint8_t>& bytes);

std::string sha256_hex(const std::string& data);

class SpectrumCache {
 public:
  explicit SpectrumCache(std::filesystem::path dir);

  // YLEDGE_CACHE if set, else $XDG_CACHE_HOME/yledge or ~/.cache/yledge.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }
  std::string key(const ModelParams& p, int k_index, const SpectrumOptions& opt) const;
  std::filesystem::path path_for(const std::string& key) const;

  // Empty when the entry is missing or fails validation.
  std::optional<BiorthogonalSpectrum> load(const std::string& key) const;
  void store(const std::string& key, const BiorthogonalSpectrum& s) const;

  // k_index < 0 selects the full basis.
  BiorthogonalSpectrum get_or_compute(const ModelParams& p, const ChainSystem& sys, int k_index,
                                      const SpectrumOptions& opt = {}, bool* hit = nullptr) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace yledge
