#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = tvflow::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("tvflow-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("task reports on fixtures") {
  auto r = cli({"perim", "--fixture", "seven-path", "--set", "@inner"});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["task"] == "perim");
  CHECK(j["result"]["ratio"].get<double>() == doctest::Approx(0.2));

  r = cli({"cheeger", "--fixture", "seven-path", "--omega", "x2,x3,x4,x5,x6"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["result"]["witness"] == Json::array({"x3", "x4", "x5"}));

  r = cli({"calibrable", "--fixture", "eight-path", "--omega", "@omega", "--method", "exhaustive"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["calibrable"] == false);

  r = cli({"eigencheck", "--fixture", "two-node", "--lambda", "0.5", "--fn", "@u0"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["certified"] == true);

  r = cli({"poincare", "--fixture", "two-node", "--p", "inf"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["constant"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("flow and iso emit CSV") {
  auto r = cli({"flow", "--fixture", "two-node", "--tau", "0.25", "--t-end", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,a,b,mass,tv,dist2\n", 0) == 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 6);

  auto dir = scratch("csv");
  r = cli({"iso", "--fixture", "k5", "--out", (dir / "iso.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["sobolev"]["holds"] == true);
  std::ifstream csv(dir / "iso.csv");
  std::getline(csv, line);
  CHECK(line == "volume,min_perimeter,witness");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"perim", "--set", "a"}).code == 2);
  CHECK(cli({"perim", "--fixture", "nope", "--set", "a"}).code == 2);
  CHECK(cli({"perim", "--fixture", "seven-path", "--set", "x1", "--space", "a.json"}).code == 2);
  CHECK(cli({"perim", "--fixture", "seven-path", "--set", "nowhere"}).code == 2);
  CHECK(cli({"cheeger", "--fixture", "seven-path", "--mode", "magic"}).code == 2);
  CHECK(cli({"perim", "--space", "/nonexistent/space.json", "--set", "a"}).code == 2);
  CHECK(cli({"fixture", "--name", "seven-path", "--param", "bogus=1"}).code == 2);
}

TEST_CASE("numerical failures exit with 1") {
  auto r = cli({"extinction", "--fixture", "two-node", "--tau", "0.01", "--t-end", "3", "--extinction-tol", "-1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("HorizonTooShort") != std::string::npos);
}

TEST_CASE("fixture emission and build round trip") {
  auto dir = scratch("build");
  auto r = cli({"fixture", "--name", "seven-path", "--emit", "space", "--out", (dir / "s.json").string()});
  REQUIRE(r.code == 0);
  r = cli({"build", "--space", (dir / "s.json").string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "s.json");
  std::stringstream original;
  original << in.rdbuf();
  CHECK(r.out == original.str());
  CHECK(Json::parse(r.err).contains("stochasticity_residual"));

  r = cli({"build", "--grid", "3x2", "--wrap"});
  CHECK(r.code == 0);
  r = cli({"build", "--grid", "3by2"});
  CHECK(r.code == 2);

  write(dir / "pts.json", R"({"points": [{"id": "p", "coords": [0]}, {"id": "q", "coords": [1]}]})");
  r = cli({"build", "--points", (dir / "pts.json").string(), "--epsilon", "1.5"});
  CHECK(r.code == 0);

  r = cli({"fixture", "--list"});
  CHECK(r.code == 0);
  CHECK(r.out.find("z2-omega5") != std::string::npos);

  r = cli({"fixture", "--name", "z2-omega5", "--halo", "1", "--emit", "sets"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["omega"].size() == 25);
}

TEST_CASE("selftest subset") {
  auto r = cli({"selftest", "--only", "seven-path"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(cli({"selftest", "--only", "unknown"}).code == 2);
}

TEST_CASE("experiment configs") {
  auto dir = scratch("run");
  write(dir / "empty.json", R"({"space": {"fixture": "two-node"}, "tasks": []})");
  auto r = cli({"run", "--config", (dir / "empty.json").string(), "--out", (dir / "out-empty").string()});
  CHECK(r.code == 0);
  CHECK(fs::is_directory(dir / "out-empty"));
  CHECK(fs::is_empty(dir / "out-empty"));

  write(dir / "unknown.json", R"({"space": {"fixture": "two-node"}, "tasks": [{"task": "perim", "set": "a"}, {"task": "dance"}]})");
  r = cli({"run", "--config", (dir / "unknown.json").string(), "--out", (dir / "out-unknown").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("dance") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out-unknown" / "00-perim.json"));

  write(dir / "bad-param.json", R"({"space": {"fixture": "two-node"}, "tasks": [{"task": "perim", "sett": "a"}]})");
  r = cli({"run", "--config", (dir / "bad-param.json").string(), "--out", (dir / "out-bad").string()});
  CHECK(r.code == 2);

  fs::create_directories(dir / "data");
  write(dir / "data" / "space.json", R"({"graph": {"edges": [["a", "b", 1.0], ["b", "c", 1.0]]}})");
  write(dir / "data" / "u0.json", R"({"values": {"a": 1.0, "b": 0.0, "c": -1.0}})");
  write(dir / "full.json", R"({"space": "data/space.json", "seed": 3, "tasks": [
      {"task": "perim", "set": "a,b"},
      {"task": "flow", "u0": "data/u0.json", "tau": 0.1, "t_end": 0.5},
      {"task": "poincare", "p": 2, "q": 1},
      {"task": "iso", "n": 2}]})");
  r = cli({"run", "--config", (dir / "full.json").string(), "--out", (dir / "out-full").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "out-full" / "00-perim.json"));
  CHECK(fs::exists(dir / "out-full" / "01-flow.json"));
  CHECK(fs::exists(dir / "out-full" / "01-flow.csv"));
  CHECK(fs::exists(dir / "out-full" / "03-iso.csv"));
  std::ifstream rep(dir / "out-full" / "00-perim.json");
  auto j = Json::parse(rep);
  CHECK(j["result"]["perimeter"].get<double>() == doctest::Approx(1.0));

  write(dir / "broken.json", "{ not json");
  CHECK(cli({"run", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()}).code == 2);
}

TEST_CASE("experiment reports are deterministic") {
  auto dir = scratch("determinism");
  write(dir / "cfg.json", R"({"space": {"fixture": "triangle"}, "seed": 5, "tasks": [
      {"task": "cheeger", "mode": "ipm"},
      {"task": "flow", "tau": 0.1, "t_end": 1.0},
      {"task": "iso"}]})");
  for (const char* o : {"a", "b"})
    REQUIRE(cli({"run", "--config", (dir / "cfg.json").string(), "--out", (dir / o).string()}).code == 0);
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    auto slurp = [](const fs::path& p) {
      std::stringstream ss;
      ss << std::ifstream(p).rdbuf();
      return ss.str();
    };
    INFO(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
  }
}

TEST_CASE("flow past extinction ends at the mean") {
  auto r = cli({"flow", "--fixture", "two-node", "--tau", "0.01", "--t-end", "2.5"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line, last;
  while (std::getline(lines, line))
    if (!line.empty()) last = line;
  std::istringstream row(last);
  std::string cell;
  std::vector<double> v;
  while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
  REQUIRE(v.size() == 6);
  CHECK(v[0] == doctest::Approx(2.5));
  CHECK(std::abs(v[1]) <= 1e-6);
  CHECK(std::abs(v[2]) <= 1e-6);
}
