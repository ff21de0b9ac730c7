#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef QPHASE_CLI_PATH
#error "QPHASE_CLI_PATH must point at the built executable"
#endif

namespace {

using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = true) {
  std::string cmd = std::string(QPHASE_CLI_PATH) + " " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  int rc = pclose(pipe);
  res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("usage errors exit with the domain code") {
  CHECK(run_cli("").code == 2);                      // missing subcommand
  CHECK(run_cli("grid --basis x").code == 2);        // invalid enum value
  CHECK(run_cli("grid --no-such-flag 1").code == 2);
  CHECK(run_cli("moments --nbar 0.5 --theta 1.0").code == 2);  // mutually exclusive
}

TEST_CASE("singular distribution exits 2 and names the condition") {
  RunResult r = run_cli("grid --r 0.5 --p 1");
  CHECK(r.code == 2);
  CHECK(r.out.find("not a normalizable Gaussian") != std::string::npos);
}

TEST_CASE("vacuum grid: header, shape and the center value") {
  RunResult r = run_cli("grid", false);
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 1u + 256u * 256u);
  CHECK(lines[0] == "e1,e2,W");
  // cell (128,128) sits half a step off the origin on a 256-point axis
  std::string center = lines[1 + 128 * 256 + 128];
  double e1 = 0.0, e2 = 0.0, w = 0.0;
  REQUIRE(std::sscanf(center.c_str(), "%lf,%lf,%lf", &e1, &e2, &w) == 3);
  CHECK(std::abs(e1 - 0.015625) <= 1e-12);
  CHECK(std::abs(e2 - 0.015625) <= 1e-12);
  CHECK(std::abs(w - 2.0 / 3.14159265358979323846) <= 1e-2);
}

TEST_CASE("json grid carries metadata and the normalization residual") {
  RunResult r = run_cli("grid --samples 16 --format json", false);
  CHECK(r.code == 0);
  json root = json::parse(r.out);
  CHECK(root["metadata"]["version"] == "0.1.0");
  CHECK(root["metadata"]["command"] == "grid");
  CHECK(root["metadata"]["basis"] == "B");
  CHECK(root["metadata"]["distribution"] == "Wigner");
  CHECK(root["metadata"]["grid"]["n_re"] == 16);
  CHECK(root["metadata"]["normalization_residual"].get<double>() <= 1e-6);
  CHECK(root["data"].size() == 256u);
  CHECK(root["data"][0].size() == 3u);
}

TEST_CASE("anti-normal grid is nonnegative") {
  RunResult r = run_cli("grid --r 0.5 --p -1 --samples 64", false);
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 1u + 64u * 64u);
  double min_w = 1.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    double e1 = 0.0, e2 = 0.0, w = 0.0;
    REQUIRE(std::sscanf(lines[k].c_str(), "%lf,%lf,%lf", &e1, &e2, &w) == 3);
    min_w = std::min(min_w, w);
  }
  CHECK(min_w >= 0.0);
}

TEST_CASE("chi slice: header, count and the exact midpoint") {
  RunResult r = run_cli("chi-slice --nbar 0.4 --r 0.3 --samples 33", false);
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 1u + 33u);
  CHECK(lines[0] == "xi_re,xi_im,chi_re,chi_im,chi_abs");
  double xr = 0.0, xi = 0.0, cr = 0.0, ci = 0.0, ca = 0.0;
  REQUIRE(std::sscanf(lines[1 + 16].c_str(), "%lf,%lf,%lf,%lf,%lf", &xr, &xi, &cr, &ci, &ca) == 5);
  CHECK(xr == 0.0);
  CHECK(cr == 1.0);
  CHECK(ca == 1.0);
}

TEST_CASE("moment reports at pinned parameter points") {
  RunResult th = run_cli("moments --nbar 0.5 --p 1", false);
  CHECK(th.code == 0);
  json d = json::parse(th.out)["data"][0];
  CHECK(d["mean"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d["variance"].get<double>() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(d["delta_n2"].get<double>() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(d["method"] == "closed");

  RunResult coh = run_cli("moments --alpha-re 0.6 --alpha-im -0.8 --p 1", false);
  json dc = json::parse(coh.out)["data"][0];
  CHECK(dc["mean"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dc["variance"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

  RunResult theta = run_cli("moments --theta 1.0 --p 1", false);
  json dt = json::parse(theta.out)["data"][0];
  CHECK(dt["mean"].get<double>() == doctest::Approx(0.5819767068693265).epsilon(1e-12));
}

TEST_CASE("moment cross-verification passes in the regular regime") {
  RunResult r = run_cli("moments --alpha-re 0.3 --r 0.4 --nbar 0.3 --p 0 --verify", false);
  CHECK(r.code == 0);
  json v = json::parse(r.out)["data"][0]["verify"];
  CHECK(v["pass"].get<bool>());
  CHECK(v["finite_difference"]["dev_mean"].get<double>() <= 1e-6);
  CHECK(v["oracle"]["dev_mean"].get<double>() <= 1e-6);
  CHECK(v["quadrature"]["dev_mean"].get<double>() <= 1e-4);
}

TEST_CASE("oracle cap surfaces as exit 4") {
  RunResult r = run_cli("moments --r 2 --nbar 1 --p 1 --verify");
  CHECK(r.code == 4);
  CHECK(r.out.find("too hot/squeezed") != std::string::npos);
}

TEST_CASE("unwritable output path exits 3") {
  RunResult r = run_cli("grid --samples 16 --out /nonexistent-dir/x.csv");
  CHECK(r.code == 3);
}

TEST_CASE("identical invocations produce identical bytes") {
  std::string cmd = "grid --alpha-re 0.4 --r 0.6 --nbar 0.2 --samples 32 --format json";
  RunResult a = run_cli(cmd, false);
  RunResult b = run_cli(cmd, false);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("config file fills gaps and flags override it") {
  std::string path = "/tmp/qphase_cli_test_config.json";
  {
    std::ofstream f(path);
    f << "{\"r\": 0.5, \"p\": -1, \"nbar\": 0.2}\n";
  }
  RunResult r = run_cli("moments --config " + path + " --nbar 0.8", false);
  CHECK(r.code == 0);
  json meta = json::parse(r.out)["metadata"];
  CHECK(meta["params"]["r"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(meta["params"]["nbar"].get<double>() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(meta["p"].get<double>() == doctest::Approx(-1.0).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("quick verification: passes, fast, byte-stable") {
  auto t0 = std::chrono::steady_clock::now();
  RunResult a = run_cli("verify --quick", false);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(a.code == 0);
  CHECK(secs < 10.0);
  CHECK(a.out.find("result: PASS") != std::string::npos);
  CHECK(a.out.rfind("qphase verification suite", 0) == 0);

  RunResult b = run_cli("verify --quick", false);
  CHECK(a.out == b.out);
}

TEST_CASE("mutation canary: corrupted cross term must fail the suite") {
  RunResult r = run_cli("verify --quick --flip-c-sign", false);
  CHECK(r.code == 1);
  CHECK(r.out.find("[FAIL] fourier_consistency") != std::string::npos);
  CHECK(r.out.find("result: FAIL") != std::string::npos);
}
