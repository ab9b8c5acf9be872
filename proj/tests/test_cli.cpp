#include "lapmap/cli.hpp"
#include "lapmap/map_io.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <unistd.h>

using namespace lapmap;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lapmap_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string fixture(const std::string& name) { return oracle::fixture(name).string(); }

}  // namespace

TEST_CASE("entropy on u_2") {
  TempDir dir;
  const auto r = run({"entropy", "--map", fixture("tent2.map"), "--max-iter", "10", "--out", dir / "e.json"});
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(read_text_file(dir / "e.json"));
  CHECK(std::fabs(report["h_point"].get<double>() - std::log(2.0)) <= 1e-12);
  CHECK(report["rows"].size() == 10);
  CHECK(report["rows"][9]["laps"] == "1024");
  CHECK(report["rows"][9]["variation"] == "1024");
  CHECK(report["truncated"] == false);
}

TEST_CASE("verify accepts the identity semi-conjugacy of u_2") {
  TempDir dir;
  std::string csv = "x,psi_x\n";
  for (int i = 0; i <= 100; ++i) {
    const std::string v = format_decimal(i / 100.0);
    csv += v + "," + v + "\n";
  }
  write_file_atomic(dir / "psi.csv", csv);
  const auto r = run({"verify", "--map", fixture("tent2.map"), "--psi", dir / "psi.csv", "--model",
                      fixture("tent2.map"), "--tol", "1e-3"});
  CHECK(r.status == 0);
  CHECK(r.out == "residual 0\n");
}

TEST_CASE("verify rejects a wrong model") {
  TempDir dir;
  write_file_atomic(dir / "psi.csv", "x,psi_x\n0,0\n0.5,0.5\n1,1\n");
  const auto r = run({"verify", "--map", fixture("tent2.map"), "--psi", dir / "psi.csv", "--model",
                      fixture("tent3_2.map"), "--tol", "1e-3"});
  CHECK(r.status == cli::kVerifyFailed);
  CHECK(r.err.rfind("ERROR verify: ", 0) == 0);
}

TEST_CASE("linearize then verify on the distorted tent; outputs are deterministic") {
  TempDir dir;
  std::vector<std::string> args{"linearize", "--map",   fixture("distorted_tent.map"),
                                "--grid",    "1001",    "--terms",
                                "auto",      "--tail-tol", "1e-6",
                                "--out",     dir / "psi.csv", "--model",
                                dir / "g.map", "--report", dir / "lin.json"};
  REQUIRE(run(args).status == 0);
  const auto psi1 = read_text_file(dir / "psi.csv");
  const auto g1 = read_text_file(dir / "g.map");
  const auto lin1 = read_text_file(dir / "lin.json");
  REQUIRE(run(args).status == 0);
  CHECK(read_text_file(dir / "psi.csv") == psi1);
  CHECK(read_text_file(dir / "g.map") == g1);
  CHECK(read_text_file(dir / "lin.json") == lin1);

  const auto report = nlohmann::json::parse(lin1);
  CHECK(report["residual"].get<double>() <= 1e-3);
  CHECK(report["plateaus"].empty());
  CHECK(report["collapsed_laps"] == 0);
  CHECK(report.contains("pre_clamp_violation"));
  CHECK(psi1.rfind("x,psi_x\n0,0\n", 0) == 0);

  const auto v = run({"verify", "--map", fixture("distorted_tent.map"), "--psi", dir / "psi.csv",
                      "--model", dir / "g.map", "--tol", "1e-3"});
  CHECK(v.status == 0);
  CHECK_FALSE(fs::exists(dir / "psi.csv.tmp"));
}

TEST_CASE("linearize reports plateaus for the collapse fixture") {
  TempDir dir;
  const auto r = run({"linearize", "--map", fixture("collapse.map"), "--grid", "201", "--out",
                      dir / "psi.csv", "--report", dir / "lin.json"});
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(read_text_file(dir / "lin.json"));
  REQUIRE(report["plateaus"].size() >= 1);
  CHECK(report["plateaus"][0][1].get<double>() - report["plateaus"][0][0].get<double>() >= 0.05);
}

TEST_CASE("cycles and tent commands") {
  TempDir dir;
  REQUIRE(run({"cycles", "--beta", "1.3", "--out", dir / "c.json"}).status == 0);
  const auto c = nlohmann::json::parse(read_text_file(dir / "c.json"));
  CHECK(c["period"] == 2);
  CHECK(c["p"] == 1);
  CHECK(c["valid"] == true);
  CHECK(c["components"][0]["lo"] == "91/200");
  CHECK(c["escape_fraction"].get<double>() >= 0.999);
  CHECK(c["renormalization"]["d"] == "13/23");

  const auto s = run({"cycles", "--beta", "sqrt(2)", "--precision", "200", "--grid", "100"});
  REQUIRE(s.status == 0);
  const auto sj = nlohmann::json::parse(s.out);
  CHECK(sj["exact"] == false);
  CHECK(sj["touching"] == true);
  CHECK(sj["renormalization"]["defect"].get<double>() <= 1e-12);

  REQUIRE(run({"tent", "--beta", "3/2", "--out", dir / "u.map"}).status == 0);
  CHECK(read_map_file(dir / "u.map") == read_map_file(fixture("tent3_2.map")));
  CHECK(run({"tent", "--beta", "sqrt(2)"}).status == cli::kDomain);
}

TEST_CASE("errors are single machine-parsable lines with distinct statuses") {
  TempDir dir;
  auto r = run({"entropy", "--map", dir / "missing.map"});
  CHECK(r.status == cli::kIo);
  CHECK(r.err.rfind("ERROR io: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  write_file_atomic(dir / "bad.map", "interval 0 1\nbreakpoints: 0, 1/2, 1\nvalues: 0, 2, 0\n");
  r = run({"entropy", "--map", dir / "bad.map"});
  CHECK(r.status == cli::kInvariant);
  CHECK(r.err.find("values-in-interval") != std::string::npos);

  write_file_atomic(dir / "garbage.map", "interval 0 1\nbreakpoints: 0, x, 1\nvalues: 0, 1, 0\n");
  CHECK(run({"entropy", "--map", dir / "garbage.map"}).status == cli::kParse);

  r = run({"linearize", "--map", fixture("tent2.map"), "--out", dir / "same", "--report", dir / "same"});
  CHECK(r.status == cli::kConfig);
  CHECK_FALSE(fs::exists(dir / "same"));

  CHECK(run({"linearize", "--map", fixture("tent2.map"), "--terms", "abc"}).status == cli::kConfig);
  CHECK(run({"cycles", "--beta", "0.9"}).status == cli::kDomain);
  CHECK(run({"frobnicate"}).status == cli::kUsage);
  CHECK(run({"entropy"}).status == cli::kUsage);
  CHECK(run({"--precision", "8", "cycles", "--beta", "1.3"}).status == cli::kUsage);

  const auto id = dir / "id.map";
  write_file_atomic(id, "interval 0 1\nbreakpoints: 0, 1\nvalues: 0, 1\n");
  r = run({"linearize", "--map", id});
  CHECK(r.status == cli::kUnsupported);
}

TEST_CASE("the iterate cap can be lowered from the environment") {
  ::setenv("LAPMAP_MEM_CAP", "100", 1);
  auto r = run({"entropy", "--map", fixture("tent2.map"), "--max-iter", "12"});
  CHECK(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["truncated"] == true);
  ::setenv("LAPMAP_MEM_CAP", "lots", 1);
  r = run({"entropy", "--map", fixture("tent2.map")});
  CHECK(r.status == cli::kConfig);
  ::unsetenv("LAPMAP_MEM_CAP");
}

TEST_CASE("help") {
  const auto r = run({"--help"});
  CHECK(r.status == 0);
  CHECK(r.out.find("linearize") != std::string::npos);
}
