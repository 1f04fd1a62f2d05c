#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string output;
};

Outcome cli(const std::string& args) {
  const std::string command = std::string(CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Outcome out;
  std::array<char, 4096> buffer{};
  while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) out.output += buffer.data();
  const int raw = pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(TEST_SCRATCH_DIR) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("classify prints the branch record") {
  const auto dir = scratch("classify");
  const auto r = cli("classify -N 100 --gamma 0.5 --F1 0.6 --F2 0.2 --out " + dir.string());
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["kind"] == "localized");
  CHECK(j["kappa"].get<double>() == doctest::Approx(0.962424).epsilon(1e-6));
  CHECK(std::abs(j["Lambda_N"].get<double>() - 0.025976) < 1e-6);
  CHECK(fs::exists(dir / "classify.json"));
}

TEST_CASE("skin-factor from a config file") {
  const auto dir = scratch("skin");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "fig1.cfg");
    cfg << "# skin setup\nN = 100\nJ = 1\ngamma = 0.5\nF1 = 0\nF2 = 1\n";
  }
  const auto r = cli("skin-factor --config " + (dir / "fig1.cfg").string() + " --out " +
                     (dir / "out").string());
  REQUIRE(r.status == 0);
  const auto sidecar = nlohmann::json::parse(slurp(dir / "out" / "skin_factor.json"));
  const double fitted = sidecar["power_law_fit"]["exponent"].get<double>();
  CHECK(fitted >= 0.48);
  CHECK(fitted <= 0.52);
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "N = 100\ngamma = 0.5\nF1 = 0.6\nF2 = 0.2\n";
  }
  const auto r = cli("classify --config " + (dir / "run.cfg").string() + " --F1 0.2 --set N=50 --out " +
                     dir.string());
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["kind"] == "oscillatory");
  const auto sidecar = nlohmann::json::parse(slurp(dir / "classify.json"));
  CHECK(sidecar["config"]["params"]["N"] == 50);
}

TEST_CASE("errors give a nonzero exit and a message") {
  const auto dir = scratch("errors");
  const auto split = cli("skin-factor -N 20 -J 1 --gamma 2 --F2 0.1 --out " + dir.string());
  CHECK(split.status != 0);
  CHECK(split.output.find("bond") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "skin_factor.csv"));

  const auto empty = cli("localization-map -N 20 --F2 0.2 --set gamma_count=0 --out " + dir.string());
  CHECK(empty.status != 0);
  CHECK_FALSE(fs::exists(dir / "map.csv"));

  const auto typo = cli("classify --set gama=0.3 --out " + dir.string());
  CHECK(typo.status != 0);
  CHECK(typo.output.find("gama") != std::string::npos);

  CHECK(cli("reproduce fig7").status != 0);
  CHECK(cli("").status != 0);
}

TEST_CASE("reproduce fig1 twice gives identical manifests") {
  const auto a = scratch("fig1_a");
  const auto b = scratch("fig1_b");
  REQUIRE(cli("reproduce fig1 --out " + a.string()).status == 0);
  REQUIRE(cli("reproduce fig1 --threads 3 --out " + b.string()).status == 0);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  CHECK(fs::exists(a / "fig1_loglog.csv"));
  CHECK(fs::exists(a / "fig1_increment.csv"));
}

TEST_CASE("help lists every subcommand") {
  const auto r = cli("--help");
  CHECK(r.status == 0);
  for (const char* sub : {"skin-factor", "classify", "localization-map", "entanglement", "spectrum",
                          "reproduce"}) {
    CHECK(r.output.find(sub) != std::string::npos);
  }
}
