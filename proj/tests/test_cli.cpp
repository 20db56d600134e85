#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_tool;
std::string g_fixture;

int run(const std::string& args) {
  std::string cmd = g_tool + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// parse a CSV with a header row into column-major doubles
std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>& header) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  header.clear();
  {
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) header.push_back(cell);
  }
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    size_t j = 0;
    while (std::getline(row, cell, ',')) {
      REQUIRE(j < cols.size());
      cols[j++].push_back(std::stod(cell));
    }
    REQUIRE(j == cols.size());
  }
  return cols;
}

double simpson_uniform(const std::vector<double>& y, double a, double b) {
  REQUIRE(y.size() >= 3);
  REQUIRE(y.size() % 2 == 1);  // even number of intervals
  double h = (b - a) / static_cast<double>(y.size() - 1);
  double sum = y.front() + y.back();
  for (size_t i = 1; i + 1 < y.size(); ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("sample: zero draws produce a header-only CSV") {
  fs::path dir = fresh_dir("sample_empty");
  fs::path out = dir / "s.csv";
  CHECK(run("sample --target uniform --set cube -n 0 --seed 1 --out " + out.string()) == 0);
  CHECK(slurp(out) == "x1\n");
}

TEST_CASE("sample: identical seeds give byte-identical files") {
  fs::path dir = fresh_dir("sample_det");
  fs::path a = dir / "a.csv", b = dir / "b.csv", c = dir / "c.csv";
  CHECK(run("sample --target sin10 --set [0,0.5] -n 200 --seed 7 --out " + a.string()) == 0);
  CHECK(run("sample --target sin10 --set [0,0.5] -n 200 --seed 7 --out " + b.string()) == 0);
  CHECK(run("sample --target sin10 --set [0,0.5] -n 200 --seed 8 --out " + c.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));

  std::vector<std::string> header;
  auto cols = read_csv(a, header);
  REQUIRE(header == std::vector<std::string>{"x1"});
  CHECK(cols[0].size() == 200);
  for (double x : cols[0]) {
    CHECK(x >= 0.0);
    CHECK(x <= 0.5);
  }
}

TEST_CASE("verify subcommand exit codes") {
  CHECK(run("verify --suite pinsker") == 0);
  CHECK(run("verify --suite pinsker --json") == 0);
  CHECK(run("verify --suite not_a_suite") == 2);
}

TEST_CASE("fit: population mode on a polynomial truth") {
  fs::path dir = fresh_dir("fit_population");
  fs::path config = dir / "config.json";
  {
    std::ofstream out(config);
    out << R"json({"target": "polynomial(0.8,-0.5)", "set": "[0,0.5]",
               "mode": "population", "fit": {"degree": 4}})json";
  }
  fs::path outdir = dir / "out";
  fs::create_directories(outdir);
  CHECK(run("fit --config " + config.string() + " --out " + outdir.string()) == 0);

  for (const char* name :
       {"fit_report.json", "metrics.json", "density_truth.csv", "density_fit.csv",
        "run_meta.txt"})
    CHECK(fs::exists(outdir / name));

  auto metrics = nlohmann::json::parse(slurp(outdir / "metrics.json"));
  CHECK(metrics.at("schema_version").get<std::string>() == "1");
  // the truth lies inside the model class, so extrapolation is exact
  CHECK(metrics.at("tv_on_K").get<double>() <= 1e-4);
  CHECK(std::abs(metrics.at("kl_on_S").get<double>()) <= 1e-6);

  auto report = nlohmann::json::parse(slurp(outdir / "fit_report.json"));
  CHECK(report.at("schema_version").get<std::string>() == "1");
  CHECK(report.at("coeffs").at("d").get<int>() == 1);
  CHECK(report.at("coeffs").at("k").get<int>() == 4);

  std::vector<std::string> header;
  auto cols = read_csv(outdir / "density_fit.csv", header);
  REQUIRE(header == std::vector<std::string>{"x", "pdf_on_K", "logpdf_on_K", "pdf_on_S",
                                             "logpdf_on_S"});
  // the emitted curve must itself integrate to one
  CHECK(std::abs(simpson_uniform(cols[1], 0.0, 1.0) - 1.0) <= 1e-6);
}

TEST_CASE("fit: small stochastic run end to end") {
  fs::path dir = fresh_dir("fit_psgd");
  fs::path config = dir / "config.json";
  {
    std::ofstream out(config);
    out << R"json({"target": "uniform", "set": "cube", "mode": "psgd",
               "fit": {"degree": 2, "bound_C": 1.0, "steps": 2000, "seed": 5}})json";
  }
  fs::path outdir = dir / "out";
  fs::create_directories(outdir);
  CHECK(run("fit --config " + config.string() + " --out " + outdir.string()) == 0);
  auto metrics = nlohmann::json::parse(slurp(outdir / "metrics.json"));
  CHECK(metrics.at("kl_on_S").get<double>() >= -1e-9);
  auto report = nlohmann::json::parse(slurp(outdir / "fit_report.json"));
  CHECK(!report.at("trajectory").empty());
}

TEST_CASE("fit: configuration errors exit with code 2") {
  fs::path dir = fresh_dir("fit_errors");
  fs::path config = dir / "config.json";
  {
    std::ofstream out(config);
    out << R"json({"target": "uniform", "set": "cube", "mode": "population", "fit": {"degree": 2}})json";
  }
  CHECK(run("fit --config " + config.string() + " --out " + (dir / "missing").string()) == 2);
  CHECK(run("fit --config " + (dir / "nonexistent.json").string()) == 2);

  fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << R"json({"target": "uniform", "unknown_key": 1})json";
  }
  CHECK(run("fit --config " + bad.string() + " --out " + dir.string()) == 2);
  CHECK(run("nonsense-subcommand") == 2);
}

TEST_CASE("example-1d reproduces the extrapolation study") {
  fs::path dir = fresh_dir("example1d");
  CHECK(run("example-1d --out " + dir.string() + " --fixtures " + g_fixture) == 0);
  for (const char* name : {"truth.csv", "summary.csv", "fit_k10.csv", "fit_k20.csv"})
    CHECK(fs::exists(dir / name));

  std::vector<std::string> header;
  auto cols = read_csv(dir / "summary.csv", header);
  REQUIRE(header == std::vector<std::string>{"degree", "tv_on_S", "tv_on_K"});
  CHECK(cols[0].size() == 8);
  // on-S error decreases with degree; the last entry is essentially zero
  CHECK(cols[1].back() <= 1e-6);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli <tool-path> <fixture-json>\n");
    return 1;
  }
  g_tool = argv[1];
  g_fixture = argv[2];
  doctest::Context ctx;
  return ctx.run();
}
