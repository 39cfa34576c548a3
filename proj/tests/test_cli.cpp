#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Scratch directory that lives as long as one test case.
class Workdir {
 public:
  Workdir() : path_(fs::temp_directory_path() / ("sinepalm_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  Workdir(const Workdir&) = delete;
  Workdir& operator=(const Workdir&) = delete;

  const fs::path& path() const { return path_; }

  void write(const std::string& name, const json& j) const { std::ofstream(path_ / name) << j.dump(); }

  RunResult run(const std::string& args) const {
    const fs::path err = path_ / "stderr.txt";
    const std::string cmd = "cd '" + path_.string() + "' && '" SINEPALM_CLI "' " + args + " 2> '" + err.string() + "'";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path path_;
};

json lattice_measure() {
  const double theta = std::numbers::pi / 3.0;
  json angles = json::array(), weights = json::array();
  for (int k = 0; k < 4; ++k) {
    angles.push_back((theta + 2.0 * std::numbers::pi * k) / 4.0);
    weights.push_back(0.25);
  }
  return json{{"angles", angles}, {"weights", weights}};
}

}  // namespace

TEST_CASE("spectrum of the equally weighted rotated lattice") {
  Workdir w;
  w.write("mu.json", lattice_measure());
  const RunResult r = w.run("spectrum --measure mu.json --window -10 10 --side left");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const double theta = std::numbers::pi / 3.0;
  // eigenvalues theta + 2 pi k inside [-10, 10), each with weight 2
  const double expect[] = {theta - 2.0 * std::numbers::pi, theta, theta + 2.0 * std::numbers::pi};
  REQUIRE(j["atoms"].size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(j["atoms"][i][0].get<double>() - expect[i]) < 1e-10);
    CHECK(std::abs(j["atoms"][i][1].get<double>() - 2.0) < 1e-9);
  }

  const RunResult csv = w.run("spectrum --measure mu.json --window -10 10 --format csv");
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("lambda,weight\r\n", 0) == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
}

TEST_CASE("sampling, Palm transform and measure conversion chain through files") {
  Workdir w;
  REQUIRE(w.run("kn-sample --n 6 --beta 2 --seed 11 --out g.json").code == 0);
  const json g = json::parse(slurp(w.path() / "g.json"));
  CHECK(g["seed"] == 11);
  CHECK(g["kind"] == "modified");
  CHECK(g["values"].size() == 6);

  REQUIRE(w.run("palm --coeffs g.json --out p.json").code == 0);
  const RunResult m = w.run("measure --coeffs p.json");
  REQUIRE(m.code == 0);
  const json mu = json::parse(m.out);
  REQUIRE(mu["angles"].size() == 6);
  bool atom_at_zero = false;
  for (const json& a : mu["angles"]) {
    const double t = a.get<double>();
    atom_at_zero = atom_at_zero || std::min(t, 2.0 * std::numbers::pi - t) < 1e-9;
  }
  CHECK(atom_at_zero);

  // the same seed gives the same file, an unseeded run reports its seed
  REQUIRE(w.run("kn-sample --n 6 --beta 2 --seed 11 --out g2.json").code == 0);
  CHECK(slurp(w.path() / "g.json") == slurp(w.path() / "g2.json"));
  const RunResult fresh = w.run("kn-sample --n 3 --beta 1");
  REQUIRE(fresh.code == 0);
  CHECK(json::parse(fresh.out)["seed"].is_number_unsigned());
}

TEST_CASE("verify is reproducible for a fixed seed") {
  Workdir w;
  const RunResult a = w.run("verify --suite core --seed 7");
  const RunResult b = w.run("verify --suite core --seed 7 --jobs 1");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["suite"] == "core");
  CHECK(j["pass"] == true);
  CHECK(j["reports"].size() == 8);
}

TEST_CASE("exit codes") {
  Workdir w;
  const RunResult unknown = w.run("kn-sample --n 3 --bogus 1");
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("bogus") != std::string::npos);

  CHECK(w.run("no-such-command").code == 2);
  CHECK(w.run("kn-sample --n -3").code == 2);

  const RunResult noseed = w.run("verify --suite core");
  CHECK(noseed.code == 2);
  CHECK(noseed.err.find("--seed") != std::string::npos);

  w.write("bad.json", json{{"angles", {0.0, 1e-12}}, {"weights", {0.5, 0.5}}});
  const RunResult bad = w.run("spectrum --measure bad.json");
  CHECK(bad.code == 1);
  const json e = json::parse(bad.err);
  CHECK(e["error"]["command"] == "spectrum");
  CHECK(e["error"]["type"] == "invalid_argument");
  CHECK_FALSE(e["error"]["message"].get<std::string>().empty());

  const RunResult both = w.run("measure");
  CHECK(both.code == 1);
  CHECK(json::parse(both.err)["error"]["message"] == "give exactly one of --coeffs and --measure");
}

TEST_CASE("sine-beta output feeds the spectrum command") {
  Workdir w;
  REQUIRE(w.run("sine-beta --beta 2 --cells 512 --q infinity --seed 3 --window -5 5 --out s.json").code == 0);
  const json s = json::parse(slurp(w.path() / "s.json"));
  CHECK(s["operator"]["u1"] == "infinity");
  const RunResult r = w.run("spectrum --operator s.json --window -5 5");
  REQUIRE(r.code == 0);
  // same atoms as the spectrum embedded in the sine-beta record
  CHECK(json::parse(r.out)["atoms"] == s["spectrum"]["atoms"]);
  bool zero = false;
  for (const json& a : s["spectrum"]["atoms"]) zero = zero || std::abs(a[0].get<double>()) < 1e-10;
  CHECK(zero);
}

TEST_CASE("config file supplies unset options") {
  Workdir w;
  w.write("cfg.json", json{{"n", 4}, {"beta", 3.0}, {"seed", 5}});
  const RunResult from_cfg = w.run("kn-sample --config cfg.json");
  const RunResult direct = w.run("kn-sample --n 4 --beta 3 --seed 5");
  REQUIRE(from_cfg.code == 0);
  CHECK(from_cfg.out == direct.out);
  // explicit flags win over the file
  const RunResult override_n = w.run("kn-sample --config cfg.json --n 2");
  REQUIRE(override_n.code == 0);
  CHECK(json::parse(override_n.out)["values"].size() == 2);
}
