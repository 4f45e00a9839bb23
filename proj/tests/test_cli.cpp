#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "perdec/io.hpp"
#include "test_support.hpp"

using namespace perdec;
using namespace testing_support;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(PERDEC_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fx(const std::string& name) { return std::string(PERDEC_FIXTURES) + "/" + name; }

std::string write_temp(const std::string& name, const Json& j) {
  std::string path = testing::TempDir() + name;
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace

TEST(Cli, MachineOutputIsDeterministic) {
  for (auto name : {"example1.json", "example2.json", "example3.json"}) {
    auto a = run("decouple --format machine " + fx(name));
    auto b = run("decouple --format machine " + fx(name));
    EXPECT_EQ(a.code, 0) << name;
    EXPECT_EQ(a.out, b.out) << name;
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, ExampleOneLawAfterStabilization) {
  auto r = run("decouple --format machine " + fx("example1.json"));
  ASSERT_EQ(r.code, 0);
  Json j = Json::parse(r.out);
  auto s = fixture("example1.json");
  auto inner = law_from_json(j["decoupling_law"], s);
  EXPECT_EQ(inner.F[0], qm({{-1, 0}, {0, 0}}));
  EXPECT_EQ(inner.F[1], qm({{0, -1}, {0, 0}}));
  EXPECT_EQ(inner.G[0], qm({{1, -1}, {0, 1}}));
  EXPECT_EQ(inner.G[1], qm({{-1, 1}, {1, 0}}));
  EXPECT_TRUE(j["verification"]["diagonal"].get<bool>());
}

TEST(Cli, UnstableSystemIsRejected) {
  Json doc = load_json_file(fx("example1.json"));
  doc.erase("stabilizing_feedback");
  auto r = run("decouple --format machine " + write_temp("perdec_cli_nostab.json", doc));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(Json::parse(r.out)["error"], "NotStable");
}

TEST(Cli, VerifyUsesSynthesizedLaw) {
  auto d = run("decouple --format machine " + fx("example3.json"));
  ASSERT_EQ(d.code, 0);
  std::string report = write_temp("perdec_cli_report3.json", Json::parse(d.out));
  EXPECT_EQ(run("verify " + fx("example3.json")).code, 2);
  auto v = run("verify --format machine --law " + report + " " + fx("example3.json"));
  EXPECT_EQ(v.code, 0);
  EXPECT_TRUE(Json::parse(v.out)["verification"]["diagonal"].get<bool>());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("analyze /nonexistent.json").code, 1);
  std::string bad = testing::TempDir() + "perdec_cli_bad.json";
  std::ofstream(bad) << "{\n";
  EXPECT_EQ(run("analyze " + bad).code, 1);
  Json doc = load_json_file(fx("example3.json"));
  doc["A"][1][1][2] = 2;  // monodromy eigenvalue 2
  EXPECT_EQ(run("decouple " + write_temp("perdec_cli_unstable3.json", doc)).code, 3);
  Json zero = load_json_file(fx("example2.json"));
  for (auto& m : zero["C"])
    for (auto& row : m)
      for (auto& x : row) x = 0;
  for (auto& m : zero["D"])
    for (auto& row : m)
      for (auto& x : row) x = 0;
  EXPECT_EQ(run("decouple " + write_temp("perdec_cli_zero.json", zero)).code, 4);
  EXPECT_EQ(run("analyze " + fx("example2.json")).code, 0);
  EXPECT_EQ(run("hermite " + fx("example3.json")).code, 0);
}

TEST(Cli, SimulateImpulseTable) {
  auto r = run("simulate --format machine --steps 4 " + fx("example3.json"));
  ASSERT_EQ(r.code, 0);
  Json j = Json::parse(r.out);
  auto y = matrix_from_json(j["impulse_u2"], 4, 2, "y");
  auto s = fixture("example3.json");
  std::vector<QMatrix> u(4, QMatrix(s.m, 1));
  u[0](1, 0) = 1;
  auto tr = simulate(s, QMatrix(s.n(0), 1), u, 0, 4);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < s.p; ++i) EXPECT_EQ(y(k, i), tr.y[k](i, 0));
}
