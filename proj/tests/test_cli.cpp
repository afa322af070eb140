#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SWIPTSEC_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("swiptsec_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("solve --bogus").code == 1);
  CHECK(run("solve --scheme scheme9").code == 1);
  CHECK(run("solve --tol -1").code == 1);
  const auto d = scratch("bad");
  write(d / "bad.json", "{ \"trials\": ");
  CHECK(run("sweep --config " + (d / "bad.json").string()).code == 1);
  CHECK(run("solve --config " + (d / "missing.json").string()).code == 1);
  CHECK(run("oracle --config " + (d / "bad.json").string()).code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("seeded scheme-2 solve reports its provenance") {
  const auto r = run("solve --seed 7 --scheme scheme2");
  CHECK(r.code == 0);
  CHECK(r.out.find("GlobalOptimal") != std::string::npos);
  CHECK(r.out.find("residuals") != std::string::npos);
}

TEST_CASE("solve, store and certify") {
  const auto d = scratch("certify");
  const auto s = run("solve --seed 3 --scheme relaxed --out " + d.string());
  REQUIRE(s.code == 0);
  REQUIRE(fs::exists(d / "instance.json"));
  REQUIRE(fs::exists(d / "solution.json"));
  const auto c = run("certify " + (d / "instance.json").string() + " " + (d / "solution.json").string() +
                     " --out " + d.string());
  CHECK(c.code == 0);
  CHECK(c.out.find("certified   yes") != std::string::npos);
  CHECK(fs::exists(d / "certificate.json"));

  // a baseline solution is certified through a re-solve
  const auto b = scratch("certify_b");
  REQUIRE(run("solve --seed 3 --scheme baseline1 --out " + b.string()).code == 0);
  CHECK(run("certify " + (b / "instance.json").string() + " " + (b / "solution.json").string()).code == 0);
}

TEST_CASE("infeasible instance exits with 2") {
  const auto d = scratch("infeasible");
  write(d / "inst.json", R"({"params": {"p_max": 1e-6}, "seed": 1})");
  const auto r = run("solve --config " + (d / "inst.json").string());
  CHECK(r.code == 2);
}

TEST_CASE("oracle comparison on two antennas") {
  const auto r = run("oracle --seed 3");
  CHECK(r.code == 0);
  const auto pos = r.out.find("gap");
  REQUIRE(pos != std::string::npos);
  const double gap = std::stod(r.out.substr(r.out.find_first_of("-0123456789", pos)));
  CHECK(gap >= 0.0);
  CHECK(gap <= 2.0);
}

TEST_CASE("sweep writes the figure files") {
  const auto d = scratch("sweep");
  write(d / "cfg.json", R"({"trials": 2, "sweeps": [{"axis": "gamma_req_db", "grid": [0, 9]},
                                                    {"axis": "k_receivers", "grid": [2, 4]}]})");
  const auto r = run("sweep --config " + (d / "cfg.json").string() + " --out " + d.string() + " --seed 5");
  CHECK(r.code == 0);
  for (const char* f : {"records.csv", "aggregate.csv", "fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv"})
    CHECK(fs::exists(d / f));
}
