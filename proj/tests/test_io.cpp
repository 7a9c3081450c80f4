#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "warpft/io.hpp"

using namespace warpft;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("warpft_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kErb =
    "# erb system\n"
    "warp.kind = erb\n"
    "warp.c1 = 9.265\n"
    "warp.c2 = 228.8\n"
    "prototype.kind = smooth_bump\n"
    "prototype.radius = 0.75\n"
    "delta = 0.5\n"
    "sample_rate = 16000\n"
    "length = 1024\n";

KeyValues parse(const std::string& s) {
  std::istringstream is(s);
  return parse_key_values(is, "cfg");
}

std::string error_of(const std::string& cfg) {
  try {
    params_from_config(parse(cfg));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("config parsing") {
  const SystemParams p = params_from_config(parse(kErb));
  CHECK(p.warp.kind == WarpKind::Erb);
  CHECK(p.prototype.kind == PrototypeKind::SmoothBump);
  CHECK(p.prototype.radius == 0.75);
  CHECK(p.delta == 0.5);
  CHECK(p.grid.N == 1024);
  CHECK(p.normalize);
  const SystemParams q = params_from_config(parse("warp.kind = log\nprototype.kind = gaussian\ndelta=1\nsample_rate=8\nlength=64\n"));
  CHECK(q.prototype.sigma == 1.0);
  CHECK(q.time_scale == 1.0);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("warp.kind = erb\nbogus line\n").find("line 2") != std::string::npos);
  CHECK(error_of("warp.kind = erb\nwarp.kind = log\n").find("first on line 1") != std::string::npos);
  CHECK(error_of(std::string(kErb) + "colour = blue\n").find("line 10") != std::string::npos);
  CHECK(error_of(std::string(kErb) + "warp.l = 2\n").find("not a parameter of erb") != std::string::npos);
  CHECK(error_of("warp.kind = erb\nprototype.kind = smooth_bump\ndelta = x\nsample_rate=1\nlength=64\n")
            .find("line 3") != std::string::npos);
  CHECK(error_of("warp.kind = twisted\n").find("unknown warp kind") != std::string::npos);
  CHECK(error_of("warp.kind = erb\nprototype.kind = smooth_bump\nsample_rate=1\nlength=64\n").find("delta") !=
        std::string::npos);
  CHECK(error_of("warp =\n").find("empty value") != std::string::npos);
  CHECK(error_of(" = 3\n").find("empty key") != std::string::npos);
}

TEST_CASE("descriptor round trip and determinism") {
  TempDir t;
  const WarpedSystem sys = build_system(params_from_config(parse(kErb)));
  write_descriptor(sys, t / "a.sys");
  write_descriptor(build_system(params_from_config(parse(kErb))), t / "b.sys");
  CHECK(slurp(t / "a.sys") == slurp(t / "b.sys"));
  const WarpedSystem back = read_descriptor(t / "a.sys");
  REQUIRE(back.size() == sys.size());
  for (std::size_t l = 0; l < sys.size(); ++l) {
    CHECK(back.channels[l].center_hz == sys.channels[l].center_hz);
    CHECK(back.atoms[l].values == sys.atoms[l].values);
  }
  std::string text = slurp(t / "a.sys");
  CHECK(text.rfind("# warpft system descriptor", 0) == 0);
  const auto pos = text.find("channel.3 = ");
  REQUIRE(pos != std::string::npos);
  text[text.find('=', pos) + 3] = text[text.find('=', pos) + 3] == '9' ? '8' : '9';
  std::ofstream(t / "c.sys", std::ios::binary) << text;
  try {
    read_descriptor(t / "c.sys");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
}

TEST_CASE("coefficient container") {
  TempDir t;
  const WarpedSystem sys = build_system(params_from_config(parse(kErb)));
  Coefficients c = zero_coefficients(sys);
  c.channels[2].values(1) = {1.5, -2.25};
  write_coefficients(c, t / "c.wtc");
  const Coefficients back = read_coefficients(t / "c.wtc");
  REQUIRE(back.size() == c.size());
  for (std::size_t l = 0; l < c.size(); ++l) {
    CHECK(back.channels[l].values == c.channels[l].values);
    CHECK(back.channels[l].center_hz == c.channels[l].center_hz);
    CHECK(back.channels[l].hop_seconds == c.channels[l].hop_seconds);
  }
  std::string bytes = slurp(t / "c.wtc");
  CHECK(bytes.substr(0, 4) == "WTC1");
  auto expect_format = [&](const std::string& data) {
    std::istringstream is(data);
    try {
      read_coefficients(is);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Format);
    }
  };
  std::string bad = bytes;
  bad[0] = 'X';
  expect_format(bad);
  expect_format(bytes.substr(0, bytes.size() - 3));
  expect_format(bytes + "x");
  expect_format("");
}

TEST_CASE("atom cache") {
  TempDir t;
  WarpedSystem sys = build_system(params_from_config(parse(kErb)));
  write_atom_cache(sys, t / "a.wts");
  WarpedSystem other = build_system(params_from_config(parse(kErb)));
  load_atom_cache(other, t / "a.wts");
  for (std::size_t l = 0; l < sys.size(); ++l) CHECK(other.atoms[l].values == sys.atoms[l].values);
  std::string cfg = kErb;
  cfg.replace(cfg.find("delta = 0.5"), 11, "delta = 0.25");
  WarpedSystem finer = build_system(params_from_config(parse(cfg)));
  CHECK_THROWS_AS(load_atom_cache(finer, t / "a.wts"), Error);
}

TEST_CASE("raw signals") {
  TempDir t;
  Signal f(3);
  f << std::complex<double>(1, 2), std::complex<double>(-0.5, 0), std::complex<double>(1e-300, 7);
  write_signal(f, t / "s.bin");
  CHECK(fs::file_size(t / "s.bin") == 48);
  CHECK(read_signal(t / "s.bin") == f);
  std::ofstream(t / "odd.bin", std::ios::binary) << "12345";
  try {
    read_signal(t / "odd.bin");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
}
