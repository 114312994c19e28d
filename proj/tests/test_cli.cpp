#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// end to end checks of the command line tool: exit codes, artifact layout,
// provenance comments and byte level determinism

namespace fs = std::filesystem;

namespace {

const char* kBin = DBLROT_BIN;

int run(const std::string& args) {
  std::string cmd = std::string(kBin) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dblrot_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// drop lines mentioning the timestamp, the only run dependent bytes
std::string without_timestamp(const std::string& text) {
  std::stringstream in(text), out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("timestamp") == std::string::npos) out << line << "\n";
  return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("bad invocations exit with code 1") {
  CHECK(run("") == 1);
  CHECK(run("classify") == 1);  // neither preset nor config
  CHECK(run("classify --preset nosuch") == 1);
  CHECK(run("nosuchcommand --preset interval") == 1);
  fs::path bad = work_dir() / "bad.json";
  spit(bad, "{ not json");
  CHECK(run("classify --config " + bad.string()) == 1);
}

TEST_CASE("classify writes the verdict with full provenance") {
  fs::path out = work_dir() / "classify_out";
  REQUIRE(run("classify --preset interval --out " + out.string()) == 0);
  std::string j = slurp(out / "classify" / "interval.json");
  CHECK(j.find("\"verdict\": \"diverges\"") != std::string::npos);
  CHECK(j.find("\"z\": null") != std::string::npos);
  CHECK(j.find("\"seeds\"") != std::string::npos);
  CHECK(j.find("\"timestamp\"") != std::string::npos);
  CHECK(j.find("\"kind\"") != std::string::npos);  // embedded set descriptor
}

TEST_CASE("phi emits the requested displacement row") {
  fs::path out = work_dir() / "phi_out";
  REQUIRE(run("phi --preset interval --eps 0.1 --out " + out.string()) == 0);
  std::string csv = slurp(out / "phi" / "interval.csv");
  REQUIRE(!csv.empty());
  CHECK(csv.rfind("# config ", 0) == 0);
  // the extra eps row goes last: eps_1,r,phi,exact,stderr
  std::stringstream ss(csv);
  std::string line, last;
  while (std::getline(ss, line))
    if (!line.empty()) last = line;
  std::vector<std::string> cells = split_csv_line(last);
  REQUIRE(cells.size() == 5);
  CHECK(std::abs(std::stod(cells[0]) - 0.1) <= 1e-15);
  CHECK(std::abs(std::stod(cells[2]) - 0.2) <= 1e-12);
  CHECK(cells[3] == "1");
}

TEST_CASE("identical configs give byte identical artifacts") {
  fs::path cfg = work_dir() / "det.json";
  spit(cfg, "{\"experiment\": {\"seeds\": [1, 2], \"m\": 32, "
            "\"n_ensemble\": 2000}}");
  fs::path out = work_dir() / "det_out";
  std::string args = "ensemble --preset interval --config " + cfg.string() +
                     " --out " + out.string();
  REQUIRE(run(args) == 0);
  std::string csv1 = slurp(out / "ensemble" / "interval.csv");
  std::string json1 = slurp(out / "ensemble" / "interval.json");
  fs::remove_all(out);
  REQUIRE(run(args + " --threads 2") == 0);
  CHECK(slurp(out / "ensemble" / "interval.csv") == csv1);
  CHECK(without_timestamp(slurp(out / "ensemble" / "interval.json")) ==
        without_timestamp(json1));
  CHECK(json1.find("\"timestamp\"") != std::string::npos);
}

TEST_CASE("seed flag overrides the config seed list") {
  fs::path out = work_dir() / "seed_out";
  std::string base = "ensemble --preset interval --seed 11 --seed 12 --out " +
                     out.string();
  fs::path cfg = work_dir() / "seeds.json";
  spit(cfg, "{\"experiment\": {\"m\": 32, \"n_ensemble\": 500}}");
  REQUIRE(run(base + " --config " + cfg.string()) == 0);
  std::string csv = slurp(out / "ensemble" / "interval.csv");
  CHECK(csv.find("\"seeds\":[11,12]") != std::string::npos);
  CHECK(csv.find("\n11,") != std::string::npos);
  CHECK(csv.find("\n12,") != std::string::npos);
  CHECK(csv.find("\n1,") == std::string::npos);
}

TEST_CASE("attractor capacity abort keeps the partial report") {
  fs::path cfg = work_dir() / "cap.json";
  spit(cfg, "{\"experiment\": {\"seeds\": [3], \"n_attractor\": 32, "
            "\"component_cap\": 1}}");
  fs::path out = work_dir() / "cap_out";
  CHECK(run("attractor --preset interval --config " + cfg.string() +
            " --out " + out.string()) == 2);
  std::string csv = slurp(out / "attractor" / "interval.csv");
  CHECK(csv.find("seed,n,components") != std::string::npos);
  CHECK(!fs::exists(out / "attractor" / "interval.json"));
}

TEST_CASE("stationary density requests on a diverging system exit 3") {
  fs::path out = work_dir() / "stat_out";
  CHECK(run("diffchain --preset interval --out " + out.string()) == 3);
}
