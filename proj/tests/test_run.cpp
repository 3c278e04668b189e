#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "extremal/error.hpp"
#include "extremal/report.hpp"
#include "extremal/run.hpp"

using namespace extremal;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "extremal_test_run" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config_for(const std::string& doc, const std::filesystem::path& out) {
  auto values = parse_document(doc);
  values["out"] = ConfigValue{out.string()};
  return build_config(values);
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip", "[report]") {
  REQUIRE(format_number(0.1) == "0.1");
  REQUIRE(std::stod(format_number(1e-4)) == 1e-4);
  REQUIRE(format_number(12.0) == "12");
  REQUIRE(format_number(1.0 / 3.0) == "0.3333333333333333");
  REQUIRE(std::stod(format_number(2.0 / 3.0)) == 2.0 / 3.0);
  REQUIRE(format_number(-0.0) == "-0");
}

TEST_CASE("sha256 of a known file", "[report]") {
  const auto dir = scratch("sha");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "abc") << "abc";
  REQUIRE(sha256_file(dir / "abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("bounds command writes result and manifest", "[run]") {
  const auto dir = scratch("bounds");
  const auto m = run(config_for("command = \"bounds\"\nfamily = \"exp\"", dir));
  REQUIRE(m.exit_code == 0);
  REQUIRE(m.result["bounds"]["max_dim"] == 12);
  REQUIRE(std::filesystem::exists(dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  REQUIRE(manifest["version"].get<std::string>().rfind("0.1.0", 0) == 0);
  REQUIRE(manifest["config"]["family"]["name"] == "exp");
  REQUIRE(manifest["operations"][0]["status"] == "ok");
  REQUIRE(manifest["files"][0]["path"] == "result.json");
  REQUIRE(manifest["files"][0]["sha256"] == sha256_file(dir / "result.json"));
}

TEST_CASE("core errors are serialised with a nonzero exit", "[run]") {
  const auto dir = scratch("tlogt");
  // t log t has tau -> 1 too slowly for the extrapolation to settle.
  const auto m = run(config_for("command = \"bounds\"\nfamily = \"t_log_t\"", dir));
  REQUIRE(m.exit_code != 0);
  REQUIRE(m.document["operations"][0]["status"] == "error");
  REQUIRE(m.document["operations"][0].contains("message"));
}

TEST_CASE("failed certificate gives a nonzero exit", "[run]") {
  const auto dir = scratch("cert");
  const auto m = run(config_for(
      "command = \"certify\"\nformula = \"B\"\ntau_lo = 1\ntau_hi = 1.7", dir));
  REQUIRE(m.exit_code != 0);
  REQUIRE(m.result["certificates"][0]["certified"] == false);
}

TEST_CASE("unwritable output is rejected before computing", "[run]") {
  auto values = parse_document("command = \"sweep\"");
  values["out"] = ConfigValue{std::string("/etc/hostname/sub")};
  REQUIRE_THROWS_AS(run(build_config(values)), ConfigError);
}

TEST_CASE("sweep writes one CSV per alpha with the fixed header", "[run]") {
  const auto dir = scratch("sweep");
  const auto m = run(config_for(
      "command = \"sweep\"\nM = 128\nstep = 0.5\nfloor = 1e-3\nalphas = [0.8, 2]", dir));
  REQUIRE(m.exit_code == 0);
  const std::string header =
      "lambda,u0,mu_min,margin_lemma21,int_f,int_neglap,energy,key_ineq_lhs,key_ineq_rhs,I_alpha\n";
  for (const char* name : {"branch_alpha0.8.csv", "branch_alpha2.csv"}) {
    const auto body = slurp(dir / name);
    REQUIRE(body.rfind(header, 0) == 0);
  }
  // u0 column is increasing.
  std::istringstream in(slurp(dir / "branch_alpha2.csv"));
  std::string line;
  std::getline(in, line);
  double last = -1.0;
  while (std::getline(in, line)) {
    const auto first = line.find(',');
    const double u0 = std::stod(line.substr(first + 1, line.find(',', first + 1) - first - 1));
    REQUIRE(u0 > last);
    last = u0;
  }
}

TEST_CASE("verify is deterministic", "[run]") {
  const auto a = scratch("verify_a");
  const auto b = scratch("verify_b");
  const std::string doc = "command = \"verify\"\nM = 128\nstep = 0.5\nfloor = 1e-3";
  const auto ma = run(config_for(doc, a));
  const auto mb = run(config_for(doc, b));
  REQUIRE(ma.exit_code == 0);
  std::size_t csvs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++csvs;
    REQUIRE(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  REQUIRE(csvs >= 5);
  REQUIRE(slurp(a / "result.json") == slurp(b / "result.json"));
}
