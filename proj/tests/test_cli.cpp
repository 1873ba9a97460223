#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MDYN_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("expand prints the exact orbit") {
    const auto r = run("expand --family nakada --alpha 39/100 --x 39/100 --steps 5");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0] == std::vector<std::string>{"step", "value", "digit", "approx"});
    CHECK(rows[1][1] == "39/100");
    CHECK(rows[2][1] == "-17/39");
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(run("").code == 2);
    CHECK(run("expand --family nakada --alpha 3/0 --x 0").code == 2);
    CHECK(run("expand --family bogus --x 0").code == 2);
    CHECK(run("entropy --family nakada --alpha 1 --method birkhoff").code == 2);
    CHECK(run("flowcheck --family nakada --alpha 1").code == 2);
  }

  TEST_CASE("domain of T_{3,1} has two cells") {
    const auto r = run("domain --family cks --n 3 --alpha 1");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["construction"] == "cks_omega_one");
    CHECK(j["region"]["cells"].size() == 2);
    CHECK(j["region"]["mass"] == "inf");
  }

  TEST_CASE("domain SVG has one polygon per interval and the hyperbola") {
    const std::string path = "cli_lambda.svg";
    const auto r = run("domain --family nakada --alpha 39/100 --json - --svg " + path);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    size_t intervals = 0;
    for (const auto& c : j["region"]["cells"]) intervals += c["ys"].size();
    const std::string svg = slurp(path);
    size_t polys = 0;
    for (size_t at = svg.find("<polygon"); at != std::string::npos; at = svg.find("<polygon", at + 1)) ++polys;
    CHECK(polys == intervals);
    CHECK(svg.find("class=\"hyperbola\"") != std::string::npos);
    std::remove(path.c_str());
  }

  TEST_CASE("measure of the unit square") {
    const auto r = run("measure --box 0 1 0 1");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }

  TEST_CASE("certify names the failed hypothesis") {
    const auto r = run("certify --family cks --n 3 --alpha 1");
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK_FALSE(j["certificate"]["granted"].get<bool>());
    const auto failed = j["certificate"]["failed"].get<std::vector<std::string>>();
    CHECK(std::find(failed.begin(), failed.end(), "b") != failed.end());
  }

  TEST_CASE("quilt report") {
    const auto r = run("quilt --family nakada --alpha 7/10 --alpha2 699/1000");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["report"]["established"].get<bool>());
    CHECK(j["report"]["groups"][0]["d"] == 2);
    CHECK(j["report"]["groups"][0]["a"] == 1);
  }

  TEST_CASE("entropy output is reproducible") {
    const std::string args = "entropy --family nakada --alpha 1 --method both --samples 200000 --seed 9";
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = csv(a.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"alpha", "method", "value", "error", "N", "seed"});
    CHECK(rows[1][1] == "rohlin");
    CHECK(rows[2][1] == "birkhoff");
    CHECK(rows[2][5] == "9");
  }

  TEST_CASE("flowcheck writes JSON and a histogram") {
    const std::string path = "cli_hist.csv";
    const auto r = run("flowcheck --family nakada --alpha 1 --samples 2000 --seed 4 --bins 8 --csv " + path);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["residual_max"].get<double>() < 1e-10);
    CHECK(j["det_plus"].get<long>() == 0);  // Gauss digits all have determinant -1
    CHECK(j["first_return"]["negative"] == 0);
    const auto rows = csv(slurp(path));
    CHECK(rows.size() == 9);
    long total = 0;
    for (size_t i = 1; i < rows.size(); ++i) total += std::stol(rows[i][2]);
    CHECK(total == j["samples"].get<long>());
    std::remove(path.c_str());
  }
}
