#include "yledge/cache.hpp"

#include <array>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <openssl/sha.h>

namespace yledge {

namespace {

constexpr char kMagic[4] = {'Y', 'L', 'S', 'C'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_c(std::vector<std::uint8_t>& out, cplx z) {
  put_f64(out, z.real());
  put_f64(out, z.imag());
}

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;
  std::size_t end;

  std::uint64_t u64() {
    if (pos + 8 > end) throw NumericalError("cache entry truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  cplx c() {
    const double re = f64();
    return {re, f64()};
  }
};

std::array<std::uint8_t, SHA256_DIGEST_LENGTH> digest(const std::uint8_t* data, std::size_t n) {
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> out{};
  SHA256(data, n, out.data());
  return out;
}

std::string hexfloat(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  const auto d = digest(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
  std::ostringstream os;
  for (auto b : d) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return os.str();
}

std::vector<std::uint8_t> serialize_spectrum(const BiorthogonalSpectrum& s) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kCacheFormatVersion);
  const auto rows = static_cast<std::uint64_t>(s.right.rows());
  const auto cols = static_cast<std::uint64_t>(s.eigenvalues.size());
  put_u64(out, rows);
  put_u64(out, cols);
  for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) put_c(out, s.eigenvalues[j]);
  for (const CMatrix* m : {&s.right, &s.left})
    for (Eigen::Index j = 0; j < m->cols(); ++j)
      for (Eigen::Index i = 0; i < m->rows(); ++i) put_c(out, (*m)(i, j));
  for (double c : s.condition) put_f64(out, c);
  const auto d = digest(out.data(), out.size());
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

BiorthogonalSpectrum deserialize_spectrum(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t head = 4 + 1 + 16;
  if (bytes.size() < head + SHA256_DIGEST_LENGTH) throw NumericalError("cache entry truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw NumericalError("cache entry has a bad magic");
  if (bytes[4] != kCacheFormatVersion) throw NumericalError("cache entry version mismatch");
  const std::size_t body = bytes.size() - SHA256_DIGEST_LENGTH;
  const auto d = digest(bytes.data(), body);
  if (std::memcmp(d.data(), bytes.data() + body, SHA256_DIGEST_LENGTH) != 0)
    throw NumericalError("cache entry checksum mismatch");
  Reader r{bytes, 5, body};
  const auto rows = r.u64(), cols = r.u64();
  const std::uint64_t expect = head + 16 * cols + 2 * 16 * rows * cols + 8 * cols;
  if (rows > (1u << 24) || cols > (1u << 24) || expect != body) throw NumericalError("cache entry size mismatch");
  BiorthogonalSpectrum s;
  const auto nr = static_cast<Eigen::Index>(rows), nc = static_cast<Eigen::Index>(cols);
  s.eigenvalues.resize(nc);
  for (Eigen::Index j = 0; j < nc; ++j) s.eigenvalues[j] = r.c();
  s.right.resize(nr, nc);
  s.left.resize(nr, nc);
  for (CMatrix* m : {&s.right, &s.left})
    for (Eigen::Index j = 0; j < nc; ++j)
      for (Eigen::Index i = 0; i < nr; ++i) (*m)(i, j) = r.c();
  s.condition.resize(cols);
  for (auto& c : s.condition) c = r.f64();
  return s;
}

SpectrumCache::SpectrumCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path SpectrumCache::default_dir() {
  if (const char* env = std::getenv("YLEDGE_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "yledge";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "yledge";
  return std::filesystem::temp_directory_path() / "yledge-cache";
}

std::string SpectrumCache::key(const ModelParams& p, int k_index, const SpectrumOptions& opt) const {
  std::ostringstream os;
  os << "v" << int(kCacheFormatVersion) << '|' << to_string(p.model) << '|' << p.n << '|' << to_string(p.bc)
     << '|' << hexfloat(p.h_x) << '|' << hexfloat(p.g) << '|' << hexfloat(p.alpha) << '|' << hexfloat(p.m) << '|'
     << hexfloat(p.J) << '|' << hexfloat(p.h_z) << '|' << k_index << '|' << hexfloat(opt.ep_tol) << '|'
     << hexfloat(opt.pair_tol) << '|' << hexfloat(opt.cluster_tol);
  return sha256_hex(os.str());
}

std::filesystem::path SpectrumCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / key;
}

std::optional<BiorthogonalSpectrum> SpectrumCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_spectrum(bytes);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

void SpectrumCache::store(const std::string& key, const BiorthogonalSpectrum& s) const {
  const auto target = path_for(key);
  std::filesystem::create_directories(target.parent_path());
  std::random_device rd;
  const auto tmp = target.parent_path() /
                   (key + ".tmp." + std::to_string(rd()) + "." +
                    std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
  const auto bytes = serialize_spectrum(s);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

BiorthogonalSpectrum SpectrumCache::get_or_compute(const ModelParams& p, const ChainSystem& sys, int k_index,
                                                   const SpectrumOptions& opt, bool* hit) const {
  const std::string k = key(p, k_index, opt);
  if (auto s = load(k)) {
    if (hit) *hit = true;
    return std::move(*s);
  }
  if (hit) *hit = false;
  const CMatrix h = k_index < 0 ? sys.full_matrix(p) : sys.sector_matrix(p, k_index);
  BiorthogonalSpectrum s = full_eig(h, opt);
  store(k, s);
  return s;
}

}  // namespace yledge
