#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "trapnet/api.hpp"
#include "trapnet/cli.hpp"
#include "trapnet/export.hpp"

using namespace trapnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trapnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("trapnet_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("gen writes a deterministic deployment") {
  TempDir tmp;
  const auto a = cli({"gen", "-n", "60", "--seed", "3", "-o", tmp / "a.csv"});
  const auto b = cli({"gen", "-n", "60", "--seed", "3"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(tmp / "a.csv") == b.out);
  CHECK(b.out.rfind("id,label,x_km,y_km\n", 0) == 0);
  CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 61);
  CHECK(cli({"gen", "--bbox", "0,0,1"}).code == 1);
  CHECK(cli({"gen", "--bbox", "5,0,1,1"}).code == 1);
}

TEST_CASE("metrics, sweep and simulate") {
  TempDir tmp;
  const std::string input = tmp / "d.csv";
  REQUIRE(cli({"gen", "-o", input}).code == 0);

  const auto m = cli({"metrics", "-i", input, "--range", "10"});
  CHECK(m.code == 0);
  CHECK(m.out.rfind(std::string(kSweepHeader) + "\n10,60,", 0) == 0);

  const auto s = cli({"sweep", "-i", input});
  CHECK(s.code == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 10);
  CHECK(s.out == cli({"sweep", "-i", input}).out);

  const auto sj = cli({"sweep", "-i", input, "--ranges", "8,10", "--simulate", "--export", "json"});
  CHECK(sj.code == 0);
  const auto rows = Json::parse(sj.out);
  CHECK(rows.size() == 2);
  CHECK(rows[1].contains("latency_minutes"));

  const auto t = cli({"simulate", "-i", input, "--range", "10", "--behavior", "collect", "--capacity", "inf"});
  CHECK(t.code == 0);
  const auto trace = Json::parse(t.out);
  CHECK(trace["config"]["link_capacity"] == "unlimited");
  CHECK(trace["summary"]["quiescent"] == true);
  CHECK(t.out == cli({"simulate", "-i", input, "--range", "10", "--behavior", "collect", "--capacity", "inf"}).out);

  const auto csv = cli({"simulate", "-i", input, "--range", "10", "--behavior", "route", "--export", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("round,", 0) == 0);
}

TEST_CASE("simulate exits 1 without quiescence but still writes the trace") {
  TempDir tmp;
  const std::string input = tmp / "d.csv";
  REQUIRE(cli({"gen", "-o", input}).code == 0);
  const auto r = cli({"simulate", "-i", input, "--range", "10", "--behavior", "route", "--max-rounds", "2"});
  CHECK(r.code == 1);
  CHECK(Json::parse(r.out)["summary"]["quiescent"] == false);
  CHECK(r.err.find("quiescence") != std::string::npos);
}

TEST_CASE("build exports graphs") {
  TempDir tmp;
  const std::string input = tmp / "d.csv";
  REQUIRE(cli({"gen", "-n", "10", "-o", input}).code == 0);
  const auto dot = cli({"build", "-i", input, "--range", "8"});
  CHECK(dot.code == 0);
  CHECK(dot.out.rfind("graph trapnet {", 0) == 0);
  const auto wind = cli({"build", "-i", input, "--wind-v", "2", "--wind-t", "4", "--wind-bearing", "45"});
  CHECK(wind.code == 0);
  CHECK(wind.out.rfind("digraph trapnet {", 0) == 0);
  const auto wj = cli({"build", "-i", input, "--wind-v", "2", "--wind-t", "4", "--wind-bearing", "45", "--export",
                       "json"});
  CHECK(Json::parse(wj.out)["range_km"] == 8.0);
  const auto geo = cli({"build", "-i", input, "--range", "8", "--export", "geojson"});
  CHECK(Json::parse(geo.out)["type"] == "FeatureCollection");
  CHECK(cli({"build", "-i", input, "--wind-v", "2"}).code == 2);
  CHECK(cli({"build", "-i", input}).code == 2);
}

TEST_CASE("geographic input and projection") {
  TempDir tmp;
  const std::string input = tmp / "g.csv";
  std::ofstream(input) << "id,label,lon,lat\n1,a,105.6,9.8\n2,b,105.6,9.86\n3,c,105.7,9.8\n";
  const auto m = cli({"metrics", "-i", input, "--range", "7", "--export", "json"});
  REQUIRE(m.code == 0);
  CHECK(Json::parse(m.out)["undirected_edges"] == 1);
  const auto p = cli({"build", "-i", input, "--range", "7", "--planar", "--export", "json"});
  REQUIRE(p.code == 0);
  CHECK(Json::parse(p.out)["coordinate_mode"] == "planar");
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"metrics", "-i", "x.csv"}).code == 2);  // --range missing
  CHECK(cli({"simulate", "-i", "x.csv", "--range", "5", "--behavior", "dance"}).code == 2);
  CHECK(cli({"--help"}).code == 0);

  const auto missing = cli({"metrics", "-i", tmp / "none.csv", "--range", "5"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error: cannot open", 0) == 0);

  const std::string bad = tmp / "bad.csv";
  std::ofstream(bad) << "id,label,x_km,y_km\n1,a,0,0\n1,b,1,1\n";
  const auto dup = cli({"metrics", "-i", bad, "--range", "5"});
  CHECK(dup.code == 1);
  CHECK(dup.err.find("duplicate id 1") != std::string::npos);

  const std::string ok = tmp / "ok.csv";
  std::ofstream(ok) << "id,label,x_km,y_km\n1,a,0,0\n2,b,1,0\n3,c,9,9\n";
  CHECK(cli({"metrics", "-i", ok, "--range", "5", "--gateway", "3"}).code == 1);
  CHECK(cli({"metrics", "-i", ok, "--range", "-5"}).code == 1);
  CHECK(cli({"simulate", "-i", ok, "--range", "5", "--behavior", "collect", "--capacity", "0"}).code == 1);
}

TEST_CASE("CLI and API agree byte for byte") {
  TempDir tmp;
  const std::string input = tmp / "d.csv";
  REQUIRE(cli({"gen", "-o", input}).code == 0);
  std::ifstream f(input);
  const ApiService api(load_deployment(f, DeploymentFormat::csv));

  CHECK(cli({"metrics", "-i", input, "--range", "9", "--export", "json"}).out ==
        api.handle("/api/metrics", {{"range_km", "9"}}).body);
  CHECK(cli({"sweep", "-i", input, "--export", "json"}).out == api.handle("/api/sweep", {}).body);
  CHECK(cli({"simulate", "-i", input, "--range", "10", "--behavior", "elect"}).out ==
        api.handle("/api/simulate", {{"range_km", "10"}, {"behavior", "elect"}}).body);
  CHECK(cli({"build", "-i", input, "--range", "8", "--export", "json"}).out ==
        api.handle("/api/graph", {{"range_km", "8"}}).body);
}
