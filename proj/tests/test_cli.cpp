#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace qgi;
using namespace qgi::cli;
namespace fs = std::filesystem;

namespace {

const std::string kTwoPoint = R"(configuration: degenerate_arm
geometry:
  d1: 10 m
  d2: 1 mm
  L1: 1 m
  L2: auto
  f: 10 cm
  R: 1 cm
source:
  n_degenerate: 2
  lambda1: 1 um
  lambda2: 1 um
object:
  type: two_point
  separation: [300 um, 0 m]
detection:
  type: bucket
  width: 1 cm
  height: 1 cm
image:
  samples: 81
seed: 1
)";

const std::string kSpeckle = R"(configuration: degenerate_arm
geometry:
  d1: 10 m
  d2: 1 mm
  L1: 3 m
  L2: auto
  f: 10 cm
  R: 1 cm
source:
  n_degenerate: 2
  lambda1: 1 um
  lambda2: 1 um
object:
  type: slit
  pitch: 75 um
  pixels: 6
detection:
  type: bucket
  width: 1 cm
  height: 1 cm
ensemble:
  realizations: 60
  detector_samples: 16
  grid:
    samples: 53
seed: 99
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qgi_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at == std::string::npos) throw std::logic_error("pattern not found: " + from);
  return s.replace(at, from.size(), to);
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "scn.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run(const std::string& command, const RunOptions& opt, std::string* err_text = nullptr) {
  std::ostringstream log, err;
  const int rc = run_command(command, opt, log, err);
  if (err_text) *err_text = err.str();
  return rc;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(QGI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseLength, UnitsAndErrors) {
  EXPECT_DOUBLE_EQ(parse_length("10 m", "d1"), 10.0);
  EXPECT_DOUBLE_EQ(parse_length("2.5 cm", "f"), 0.025);
  EXPECT_DOUBLE_EQ(parse_length("1 mm", "d2"), 1e-3);
  EXPECT_DOUBLE_EQ(parse_length("75 um", "pitch"), 75e-6);
  EXPECT_DOUBLE_EQ(parse_length("633 nm", "lambda1"), 633e-9);
  EXPECT_THROW(parse_length("10", "d1"), ConfigError);
  EXPECT_THROW(parse_length("10 furlong", "d1"), ConfigError);
  EXPECT_THROW(parse_length("ten m", "d1"), ConfigError);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(config_error(replace(kTwoPoint, "d2: 1 mm", "d2: 1")).find("scn.yaml:4:"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kTwoPoint, "  R: 1 cm", "  R: 1 cm\n  radius: 2 cm"))
                .find("scn.yaml:9: unknown key 'radius'"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kTwoPoint, "n_degenerate: 2", "n_degenerate: 0")).find("scn.yaml:"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kTwoPoint, "lambda2: 1 um", "lambda2: [1 um")).find("scn.yaml:"),
            std::string::npos);
  EXPECT_FALSE(config_error(replace(kTwoPoint, "configuration: degenerate_arm", "configuration: x"))
                   .empty());
  EXPECT_TRUE(config_error(kTwoPoint).empty());
}

TEST(Config, CanonicalFormRoundTrips) {
  std::vector<std::string> texts{kTwoPoint, kSpeckle};
  for (const auto& entry : fs::directory_iterator(QGI_CONFIG_DIR)) {
    if (entry.path().extension() == ".yaml") texts.push_back(slurp(entry.path()));
  }
  ASSERT_GE(texts.size(), 3u);
  for (const auto& text : texts) {
    const auto cfg = parse_config(text, "scn.yaml", QGI_CONFIG_DIR);
    const auto canon = canonical_yaml(cfg);
    const auto again = parse_config(canon, "canon.yaml", QGI_CONFIG_DIR);
    EXPECT_EQ(canonical_yaml(again), canon);
    EXPECT_EQ(config_hash(again), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 64u);
  }
}

TEST(Config, HashIgnoresSpellingButNotPhysics) {
  const auto base = config_hash(parse_config(kTwoPoint));
  // Same lengths in other units, plus an output directory.
  auto respelled = replace(kTwoPoint, "d2: 1 mm", "d2: 1000 um");
  respelled = replace(respelled, "f: 10 cm", "f: 0.1 m");
  EXPECT_EQ(config_hash(parse_config(respelled + "output: somewhere/else\n")), base);
  EXPECT_NE(config_hash(parse_config(replace(kTwoPoint, "d2: 1 mm", "d2: 2 mm"))), base);
  EXPECT_NE(config_hash(parse_config(replace(kTwoPoint, "seed: 1", "seed: 2"))), base);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Output, CsvQuotingAndNumbers) {
  EXPECT_EQ(csv_quote("plain"), "plain");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_quote("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_text({"x", "y,z"}, {{0.5, -2.0}}), "x,\"y,z\"\r\n0.5,-2\r\n");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_THROW(format_double(NAN), OutputError);
  EXPECT_THROW(format_double(-INFINITY), OutputError);
  EXPECT_THROW(csv_text({"x"}, {{1.0, 2.0}}), OutputError);
  EXPECT_THROW(csv_text({"x"}, {{NAN}}), OutputError);
  EXPECT_THROW(require_finite(json{{"a", {1.0, INFINITY}}}, "t.json"), OutputError);
  EXPECT_NO_THROW(require_finite(json{{"a", {1.0, 2.0}}, {"b", "text"}}, "t.json"));
}

TEST(Output, ManifestListsEveryFile) {
  TempDir tmp;
  ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
  OutputSet out(tmp.path / "run", "psf", "abc");
  out.write_text("z.txt", "zzz");
  out.write_csv("a.csv", {"x"}, {{1.0}});
  out.finish();
  const auto m = json::parse(slurp(tmp.path / "run" / "manifest.json"));
  EXPECT_EQ(m["created"], "1970-01-02T00:00:00Z");
  ASSERT_EQ(m["outputs"].size(), 2u);
  EXPECT_EQ(m["outputs"][0]["file"], "a.csv");
  EXPECT_EQ(m["outputs"][1]["sha256"], sha256_hex("zzz"));
  EXPECT_THROW(out.write_json("bad.json", json{{"v", NAN}}), OutputError);
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST(RunCommand, ExitCodes) {
  TempDir tmp;
  RunOptions opt;
  opt.config_path = tmp.write("ok.yaml", kTwoPoint);
  opt.out_dir = (tmp.path / "psf").string();
  EXPECT_EQ(run("psf", opt), kExitOk);
  for (const char* f : {"psf.csv", "airy.csv", "summary.json", "config.canonical.yaml", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(tmp.path / "psf" / f)) << f;
  }
  // The written canonical config reproduces the hash in the manifest.
  const auto m = json::parse(slurp(tmp.path / "psf" / "manifest.json"));
  EXPECT_EQ(m["config_sha256"],
            config_hash(parse_config(slurp(tmp.path / "psf" / "config.canonical.yaml"))));

  std::string err;
  opt.config_path = tmp.write("bad.yaml", replace(kTwoPoint, "d2: 1 mm", "d2: 1 parsec"));
  EXPECT_EQ(run("psf", opt, &err), kExitConfig);
  EXPECT_NE(err.find("bad.yaml:4:"), std::string::npos) << err;

  opt.config_path = (tmp.path / "missing.yaml").string();
  EXPECT_EQ(run("image", opt), kExitConfig);

  RunOptions validate;
  EXPECT_EQ(run("validate", validate), kExitOk);
  validate.inject_fault = "somb";
  EXPECT_EQ(run("validate", validate), kExitRuntime);
}

TEST(RunCommand, SpeckleOutputsAreIdenticalAcrossJobs) {
  TempDir tmp;
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  RunOptions opt;
  opt.config_path = tmp.write("speckle.yaml", kSpeckle);
  opt.jobs = 1;
  opt.out_dir = (tmp.path / "j1").string();
  ASSERT_EQ(run("speckle", opt), kExitOk);
  opt.jobs = 3;
  opt.out_dir = (tmp.path / "j3").string();
  ASSERT_EQ(run("speckle", opt), kExitOk);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(tmp.path / "j1")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(tmp.path / "j3" / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 4);
  // A different seed changes the ensemble.
  opt.seed = 100;
  opt.out_dir = (tmp.path / "s100").string();
  ASSERT_EQ(run("speckle", opt), kExitOk);
  EXPECT_NE(slurp(tmp.path / "s100" / "speckle.csv"), slurp(tmp.path / "j1" / "speckle.csv"));
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST(Binary, ExitStatus) {
  TempDir tmp;
  const auto ok = tmp.write("ok.yaml", kTwoPoint);
  const auto bad = tmp.write("bad.yaml", replace(kTwoPoint, "R: 1 cm", "R: -1 cm"));
  const auto out = (tmp.path / "out").string();
  EXPECT_EQ(run_binary("psf --config " + ok + " --out " + out), 0);
  EXPECT_EQ(run_binary("psf --config " + bad + " --out " + out), 2);
  EXPECT_EQ(run_binary("psf --out " + out), 2);
  EXPECT_EQ(run_binary("psf --config " + ok + " --jobs 0"), 2);
  EXPECT_EQ(run_binary("nonsense"), 2);
  EXPECT_EQ(run_binary("validate --inject-fault somb"), 1);
  EXPECT_EQ(run_binary("--version"), 0);
}
