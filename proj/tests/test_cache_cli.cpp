#include <doctest.h>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "yledge/cache.hpp"
#include "yledge/cli.hpp"

using namespace yledge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("yledge_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "yledge");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string strip_timestamp(const std::string& s) {
  std::istringstream in(s);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind("# timestamp", 0) != 0 && line.find("\"timestamp\"") == std::string::npos) kept += line + "\n";
  return kept;
}

std::vector<std::string> data_lines(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

ModelParams pxp(int n, double g, double m) {
  ModelParams p;
  p.n = n;
  p.g = g;
  p.m = m;
  return p;
}

bool bit_equal(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0;
}

}  // namespace

TEST_CASE("cache round trip and corruption") {
  TempDir tmp;
  SpectrumCache cache(tmp.path);
  const auto p = pxp(10, 0.7, -0.3);
  ChainSystem sys(10, Boundary::periodic);
  bool hit = true;
  const auto cold = cache.get_or_compute(p, sys, 0, {}, &hit);
  CHECK_FALSE(hit);
  const auto warm = cache.get_or_compute(p, sys, 0, {}, &hit);
  CHECK(hit);
  CHECK(bit_equal(cold.right, warm.right));
  CHECK(bit_equal(cold.left, warm.left));
  CHECK(std::memcmp(cold.eigenvalues.data(), warm.eigenvalues.data(), sizeof(cplx) * cold.eigenvalues.size()) == 0);
  CHECK(cold.condition == warm.condition);

  const auto key = cache.key(p, 0, {});
  const auto file = cache.path_for(key);
  CHECK(file.parent_path().filename() == key.substr(0, 2));
  CHECK(fs::exists(file));

  // flip one payload byte: the checksum rejects it and the entry is recomputed
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    char c;
    f.seekg(40);
    f.get(c);
    f.seekp(40);
    f.put(static_cast<char>(c ^ 0x5a));
  }
  CHECK_FALSE(cache.load(key));
  const auto again = cache.get_or_compute(p, sys, 0, {}, &hit);
  CHECK_FALSE(hit);
  CHECK(bit_equal(again.right, cold.right));
  CHECK(cache.load(key));

  auto bytes = serialize_spectrum(cold);
  bytes.resize(bytes.size() - 5);
  CHECK_THROWS_AS(deserialize_spectrum(bytes), NumericalError);
  bytes = serialize_spectrum(cold);
  bytes[4] = 99;
  CHECK_THROWS_AS(deserialize_spectrum(bytes), NumericalError);

  // every key component matters
  CHECK(cache.key(p, 1, {}) != key);
  CHECK(cache.key(p.with_m(-0.3 + 1e-15), 0, {}) != key);
  auto q = p;
  q.alpha = 1.0;
  CHECK(cache.key(q, 0, {}) != key);
  q = p;
  q.bc = Boundary::open;
  CHECK(cache.key(q, 0, {}) != key);
  SpectrumOptions tighter;
  tighter.ep_tol *= 0.5;
  CHECK(cache.key(p, 0, tighter) != key);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cli examples") {
  auto r = run({"basis", "--n", "4", "--bc", "periodic"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["dim"] == 7);
  CHECK(j.contains("provenance"));

  r = run({"spectrum", "--n", "8", "--g", "1", "--m", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# yledge", 0) == 0);
  const auto rows = data_lines(r.out);
  CHECK(rows.size() > 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ls(rows[i]);
    std::string k, re, im;
    std::getline(ls, k, ',');
    std::getline(ls, re, ',');
    std::getline(ls, im, ',');
    CHECK(std::abs(std::stod(re)) < 1e-8);
    CHECK(std::abs(std::stod(im)) < 1e-8);
  }

  r = run({"basis", "--n", "4", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"nosuch"}).code == 2);
  CHECK(run({"basis", "--n", "-3"}).code == 2);
  CHECK(run({"entropy", "--n", "8", "--m-range", "-1:0:0.5", "--jobs", "0"}).code == 2);
  CHECK(run({"reproduce", "fig9"}).code == 2);
  // computational failure: the correlation function refuses a complex spectrum
  r = run({"correlation", "--n", "8", "--g", "1.5", "--m", "0", "--t-max", "1", "--dt", "0.5"});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli determinism and cache") {
  TempDir tmp;
  const std::vector<std::string> args{"spectrum", "--n", "10", "--g", "0.4", "--m", "-0.2", "--k", "all",
                                      "--cache", tmp.path.string()};
  const auto cold = run(args);
  const auto warm = run(args);
  CHECK(cold.code == 0);
  CHECK(strip_timestamp(cold.out) == strip_timestamp(warm.out));
  CHECK(fs::recursive_directory_iterator(tmp.path) != fs::recursive_directory_iterator());
  const auto plain = run({"spectrum", "--n", "10", "--g", "0.4", "--m", "-0.2", "--k", "all"});
  CHECK(data_lines(plain.out) == data_lines(cold.out));

  const auto e1 = run({"entropy", "--n", "8", "--g", "0.3", "--m-range=-1:0:0.25", "--jobs", "2"});
  const auto e2 = run({"entropy", "--n", "8", "--g", "0.3", "--m-range", "-1:0:0.25"});
  CHECK(e1.code == 0);
  CHECK(data_lines(e1.out) == data_lines(e2.out));
  CHECK(data_lines(e1.out).size() == 6);

  const auto ec = run({"echo", "--n", "8", "--g", "0.1", "--mi", "-0.6", "--dm", "0.01", "--t-max", "5", "--dt", "1"});
  CHECK(ec.code == 0);
  CHECK(strip_timestamp(ec.out) ==
        strip_timestamp(run({"echo", "--n", "8", "--g", "0.1", "--mi", "-0.6", "--dm", "0.01", "--t-max", "5",
                             "--dt", "1"}).out));
}

TEST_CASE("cli fit and output file") {
  TempDir tmp;
  const auto csv = tmp.path / "pts.csv";
  {
    std::ofstream f(csv);
    f << std::setprecision(17) << "# synthetic\nx,y\n";
    for (int n = 8; n <= 18; n += 2) f << n << "," << 2.5 * std::pow(n, -2.4) << "\n";
  }
  const auto out = tmp.path / "fit.json";
  const auto r = run({"fit", "--family", "power", "--in", csv.string(), "--out", out.string()});
  CHECK(r.code == 0);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  CHECK(std::abs(j["exponent"].get<double>() + 2.4) < 1e-8);
  CHECK(run({"fit", "--family", "cubic", "--in", csv.string()}).code == 2);
}

TEST_CASE("range parsing") {
  const auto g = cli::parse_range("-1:0:0.25");
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(std::abs(g.back()) < 1e-12);
  CHECK(cli::parse_range("0.3") == std::vector<double>{0.3});
  CHECK_THROWS(cli::parse_range("1:0:0.1"));
  CHECK_THROWS(cli::parse_range("0:1:0"));
  CHECK(cli::parse_int_list("0,3,5") == std::vector<int>{0, 3, 5});
  CHECK(cli::reproducible_figures().size() == 6);
}
