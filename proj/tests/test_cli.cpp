#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <torlevy/symbol.hpp>

#ifndef TORLEVY_CLI_PATH
#define TORLEVY_CLI_PATH "torlevy"
#endif

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("torlevy-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(TORLEVY_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int ret = std::system(cmd.c_str());
  return WEXITSTATUS(ret);
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  f << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json canonical_config() {
  return Json{
      {"grid", {{"d", 1}, {"n", 64}}},
      {"measure",
       {{"alpha", 1.5},
        {"atoms", Json::array({Json::array({Json::array({1.0}), 0.5}),
                               Json::array({Json::array({-1.0}), 0.5})})},
        {"density", {{"name", "constant"}, {"c", 1.0}}}}},
      {"kernel", {{"name", "separable-sin-power"}, {"ax", 0.2}, {"ay", 0.2}, {"gamma", 0.6}}},
      {"drift", {{"name", "cos"}, {"amp", 0.15}}},
      {"problem",
       {{"initial", {{"name", "sin"}, {"k", 1}}},
        {"forcing",
         {{"name", "separable"},
          {"space", {{"name", "random-trig"}, {"kmax", 4}, {"seed", 9}}},
          {"time", {{"name", "exp-decay"}, {"rate", 1.0}}}}},
        {"horizon", 0.5},
        {"p", 2.0},
        {"route", "imex"},
        {"steps", 24}}},
  };
}

}  // namespace

TEST_CASE("validate: canonical config passes with positive margins") {
  TempDir tmp;
  auto cfg = canonical_config();
  write_file(tmp.path / "c.json", cfg.dump(2));
  int code = run_cli("validate --config " + (tmp.path / "c.json").string() + " --out " +
                     tmp.path.string());
  CHECK(code == 0);
  Json rep = Json::parse(slurp(tmp.path / "validate.json"));
  CHECK(rep["passed"].get<bool>());
  CHECK(rep.contains("config_digest"));
  bool found = false;
  for (const auto& c : rep["checks"]) {
    CHECK(c["passed"].get<bool>());
    if (c["name"] == "nondegeneracy") {
      found = true;
      CHECK(c["margin"].get<double>() > 0.0);
    }
  }
  CHECK(found);
}

TEST_CASE("validate: alpha = 1 with an unpaired atom fails the cancellation check") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["measure"]["alpha"] = 1.0;
  cfg["measure"]["atoms"] = Json::array({Json::array({Json::array({1.0}), 1.0})});
  write_file(tmp.path / "c.json", cfg.dump(2));
  int code = run_cli("validate --config " + (tmp.path / "c.json").string() + " --out " +
                     tmp.path.string());
  CHECK(code == 1);
  Json rep = Json::parse(slurp(tmp.path / "validate.json"));
  bool named = false;
  for (const auto& c : rep["checks"])
    if (c["name"] == "alpha1-cancellation-nu" && !c["passed"].get<bool>()) named = true;
  CHECK(named);
}

TEST_CASE("validate: p near alpha/(alpha-1) fails the exclusion") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["problem"]["p"] = 3.0001;  // alpha = 1.5 excludes p = 3
  write_file(tmp.path / "c.json", cfg.dump(2));
  int code = run_cli("validate --config " + (tmp.path / "c.json").string() + " --out " +
                     tmp.path.string());
  CHECK(code == 1);
  Json rep = Json::parse(slurp(tmp.path / "validate.json"));
  bool named = false;
  for (const auto& c : rep["checks"])
    if (c["name"] == "p-exclusion" && !c["passed"].get<bool>()) named = true;
  CHECK(named);
}

TEST_CASE("parse failures exit with code 2") {
  TempDir tmp;
  write_file(tmp.path / "bad.json", "{ not json");
  CHECK(run_cli("validate --config " + (tmp.path / "bad.json").string()) == 2);

  auto cfg = canonical_config();
  cfg["unknown_section"] = 1;
  write_file(tmp.path / "unknown.json", cfg.dump());
  CHECK(run_cli("validate --config " + (tmp.path / "unknown.json").string()) == 2);

  auto cfg2 = canonical_config();
  cfg2["problem"].erase("initial");
  write_file(tmp.path / "noinit.json", cfg2.dump());
  CHECK(run_cli("solve --config " + (tmp.path / "noinit.json").string() + " --out " +
                tmp.path.string()) == 2);
}

TEST_CASE("verify: zero ensemble is a usage error, quick norms suite passes") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["verify"] = {{"suite", "norms"}, {"ensemble", 0}};
  write_file(tmp.path / "c.json", cfg.dump());
  CHECK(run_cli("verify --config " + (tmp.path / "c.json").string() + " --out " +
                tmp.path.string()) == 2);

  cfg["verify"] = {{"suite", "norms"}, {"ensemble", 10}, {"quick", true}, {"n", 64}};
  write_file(tmp.path / "c2.json", cfg.dump());
  CHECK(run_cli("verify --config " + (tmp.path / "c2.json").string() + " --out " +
                tmp.path.string()) == 0);
  Json rep = Json::parse(slurp(tmp.path / "verify-norms.json"));
  CHECK(rep["passed"].get<bool>());
  CHECK(fs::exists(tmp.path / "verify-norms-norm-inequalities.csv"));
}

TEST_CASE("sample-levy: fixed seed reruns are byte-identical") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["sampler"] = {{"r_cut", 0.1}, {"paths", 500}, {"seed", 42}};
  write_file(tmp.path / "c.json", cfg.dump());
  fs::create_directories(tmp.path / "run1");
  fs::create_directories(tmp.path / "run2");
  CHECK(run_cli("sample-levy --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "run1").string()) == 0);
  CHECK(run_cli("sample-levy --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "run2").string()) == 0);
  CHECK(slurp(tmp.path / "run1" / "ledger.csv") == slurp(tmp.path / "run2" / "ledger.csv"));
  CHECK(slurp(tmp.path / "run1" / "sample-levy.json") ==
        slurp(tmp.path / "run2" / "sample-levy.json"));
  // the ledger embeds the digest
  CHECK(slurp(tmp.path / "run1" / "ledger.csv").rfind("# config_digest=", 0) == 0);
}

TEST_CASE("solve: imex route writes solution, manifest, and a priori report") {
  TempDir tmp;
  write_file(tmp.path / "c.json", canonical_config().dump());
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                tmp.path.string()) == 0);
  CHECK(fs::exists(tmp.path / "solution.csv"));
  Json manifest = Json::parse(slurp(tmp.path / "solve.json"));
  CHECK(manifest["route"] == "imex");
  CHECK(manifest["residual"].get<double>() < 1.0);
  Json apriori = Json::parse(slurp(tmp.path / "apriori.json"));
  CHECK(apriori["ratio"].get<double>() > 0.0);
  // CSV header and at least one data row
  std::string csv = slurp(tmp.path / "solution.csv");
  CHECK(csv.find("t,x,u") != std::string::npos);
}

TEST_CASE("solve: duhamel route on a variable kernel is a route mismatch (exit 1)") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["problem"]["route"] = "duhamel";
  write_file(tmp.path / "c.json", cfg.dump());
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                tmp.path.string()) == 1);
}

TEST_CASE("solve: nonlinear demo has non-increasing energy") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["measure"]["alpha"] = 1.2;
  cfg["problem"]["route"] = "nonlinear";
  cfg["problem"]["steps"] = 150;
  write_file(tmp.path / "c.json", cfg.dump());
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                tmp.path.string()) == 0);
  Json manifest = Json::parse(slurp(tmp.path / "solve.json"));
  auto energy = manifest["energy"].get<std::vector<double>>();
  REQUIRE(energy.size() > 10);
  for (std::size_t i = 1; i < energy.size(); ++i)
    CHECK(energy[i] <= energy[i - 1] + 1e-6 * energy.front());
  CHECK(fs::exists(tmp.path / "energy.csv"));
}

TEST_CASE("solve reruns with the same config are byte-identical") {
  TempDir tmp;
  write_file(tmp.path / "c.json", canonical_config().dump());
  fs::create_directories(tmp.path / "a");
  fs::create_directories(tmp.path / "b");
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "a").string()) == 0);
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "b").string()) == 0);
  CHECK(slurp(tmp.path / "a" / "solution.csv") == slurp(tmp.path / "b" / "solution.csv"));
}

TEST_CASE("verify reruns with a fixed seed are byte-identical") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["verify"] = {{"suite", "norms"}, {"ensemble", 8}, {"quick", true}, {"n", 64}, {"seed", 5}};
  write_file(tmp.path / "c.json", cfg.dump());
  fs::create_directories(tmp.path / "a");
  fs::create_directories(tmp.path / "b");
  CHECK(run_cli("verify --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "a").string()) == 0);
  CHECK(run_cli("verify --config " + (tmp.path / "c.json").string() + " --out " +
                (tmp.path / "b").string()) == 0);
  CHECK(slurp(tmp.path / "a" / "verify-norms-norm-inequalities.csv") ==
        slurp(tmp.path / "b" / "verify-norms-norm-inequalities.csv"));
}

TEST_CASE("solve route=operator dumps the evaluation as CSV") {
  TempDir tmp;
  auto cfg = canonical_config();
  cfg["problem"]["route"] = "operator";
  write_file(tmp.path / "c.json", cfg.dump());
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                tmp.path.string()) == 0);
  std::string csv = slurp(tmp.path / "operator.csv");
  CHECK(csv.find("x,value,tail_bound") != std::string::npos);
  CHECK(csv.rfind("# config_digest=", 0) == 0);
}

TEST_CASE("solve: frozen plane-wave solution file matches the exponent oracle") {
  TempDir tmp;
  Json cfg{
      {"grid", {{"d", 1}, {"n", 64}}},
      {"measure",
       {{"alpha", 1.5},
        {"atoms", Json::array({Json::array({Json::array({1.0}), 0.5}),
                               Json::array({Json::array({-1.0}), 0.5})})},
        {"density", {{"name", "constant"}, {"c", 1.0}}}}},
      {"kernel", {{"name", "constant"}, {"c", 1.0}}},
      {"problem",
       {{"initial", {{"name", "sin"}, {"k", 2}}},
        {"horizon", 0.5},
        {"p", 2.0},
        {"route", "duhamel"},
        {"steps", 8}}},
  };
  write_file(tmp.path / "c.json", cfg.dump());
  REQUIRE(run_cli("solve --config " + (tmp.path / "c.json").string() + " --out " +
                  tmp.path.string()) == 0);

  // independent oracle: u(T, x) = e^{T psi(2)} sin(2x)
  auto nu = torlevy::BoundedLevyMeasure::constant(
      torlevy::StableLevyMeasure(1.5, torlevy::SphericalMeasure::symmetric_pair_1d()), 1.0);
  double decay = std::exp(0.5 * torlevy::char_exponent(nu, torlevy::vec1(2.0)).real());

  std::istringstream csv(slurp(tmp.path / "solution.csv"));
  std::string line;
  double worst = 1.0;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    double t, x, u;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &u) == 3);
    if (std::abs(t - 0.5) > 1e-12) continue;
    worst = std::max(std::abs(u - decay * std::sin(2.0 * x)), worst == 1.0 ? 0.0 : worst);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("--threads does not change the output bytes") {
  TempDir tmp;
  write_file(tmp.path / "c.json", canonical_config().dump());
  fs::create_directories(tmp.path / "t1");
  fs::create_directories(tmp.path / "t4");
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --threads 1 --out " +
                (tmp.path / "t1").string()) == 0);
  CHECK(run_cli("solve --config " + (tmp.path / "c.json").string() + " --threads 4 --out " +
                (tmp.path / "t4").string()) == 0);
  CHECK(slurp(tmp.path / "t1" / "solution.csv") == slurp(tmp.path / "t4" / "solution.csv"));
}
