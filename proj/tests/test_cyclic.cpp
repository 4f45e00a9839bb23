#include <gtest/gtest.h>

#include <random>

#include "perdec/cyclic.hpp"
#include "test_support.hpp"

using namespace perdec;
using namespace testing_support;

namespace {

PeriodicSystem ex1_stab() {
  auto s = fixture("example1.json");
  return apply_feedback(s, fixture_stabilizer("example1.json", s));
}

RatMat eq24() {
  return rm({{"0", "0", "0", "z^-1"}, {"0", "z^-2", "z^-1", "z^-1"}, {"z^-1", "z^-1", "0", "z^-2"}, {"0", "z^-1", "0", "0"}});
}

}  // namespace

TEST(Cyclic, ExampleOneTransfer) {
  auto b = build_cyclic(ex1_stab(), 0);
  EXPECT_EQ(b.Wbar, eq24());
  EXPECT_EQ(b.Sbar, eq24());
}

TEST(Cyclic, ExampleTwoTransfers) {
  auto b = build_cyclic(fixture("example2.json"), 0);
  RatMat reference = rm({{"0", "z^-2", "0", "0", "0", "z^-1"},
                       {"0", "0", "z^-2", "0", "0", "z^-1"},
                       {"0", "0", "0", "0", "0", "0"},
                       {"0", "z^-1", "0", "0", "0", "0"},
                       {"0", "0", "z^-1", "0", "0", "0"}});
  // Columns 1-5 agree with the reference matrix.  Column 6 follows B(1), whose
  // last column (0, 1, 1) drives states 2 and 3 of x(0); the reference column
  // has (1, 1, 0), which would make entry (2,6) of W equal -4z^-1 instead of
  // the reference z^-1.
  EXPECT_EQ(b.Sbar.block(0, 0, 5, 5), reference.block(0, 0, 5, 5));
  EXPECT_EQ(b.Sbar.block(0, 5, 5, 1), rm({{"0"}, {"z^-1"}, {"z^-1"}, {"0"}, {"0"}}));
  EXPECT_EQ(b.Wbar, rm({{"1", "0", "0", "0", "0", "0"},
                        {"1", "1-4z^-2", "0", "0", "0", "z^-1"},
                        {"0", "0", "0", "1", "0", "0"},
                        {"0", "0", "0", "0", "1", "0"}}));
}

TEST(Cyclic, ExampleThreeTransfers) {
  auto b = build_cyclic(fixture("example3.json"), 0);
  EXPECT_EQ(b.Sbar, rm({{"0", "z^-2", "0", "z^-1", "0", "0"},
                        {"0", "0", "0", "0", "0", "z^-1"},
                        {"0", "z^-1", "0", "0", "0", "0"},
                        {"0", "0", "z^-1", "0", "0", "0"},
                        {"z^-1", "0", "0", "0", "0", "z^-2"}}));
  EXPECT_EQ(b.Wbar, rm({{"1", "0", "0", "0", "0", "0"},
                        {"0", "z^-2", "0", "z^-1", "0", "0"},
                        {"0", "0", "0", "1", "0", "0"},
                        {"0", "z^-1", "0", "0", "1", "0"}}));
}

TEST(Cyclic, PeriodOneIsOrdinaryTransfer) {
  PeriodicSystem s;
  s.T = 1;
  s.dims = {1};
  s.m = s.p = 1;
  s.A = {qm({{0}})};
  s.B = {qm({{1}})};
  s.C = {qm({{2}})};
  s.D = {qm({{1}})};
  auto b = build_cyclic(s, 0);
  EXPECT_EQ(b.Abar, s.A[0]);
  EXPECT_EQ(b.Wbar, rm({{"1 + 2z^-1"}}));
}

TEST(Cyclic, SampledTransferBlocksMatchTransfer) {
  for (auto s : {ex1_stab(), fixture("example2.json"), fixture("example3.json")})
    for (long tau : {0L, 1L}) {
      auto b = build_cyclic(s, tau);
      for (int i = 0; i < s.T; ++i)
        for (int j = 0; j < s.T; ++j) {
          int k = mod(i - j, s.T);
          RatMat expect = RatFun::zinv(k) * sampled_transfer(s, k, tau + i);
          EXPECT_EQ(b.Wbar.block(i * s.p, j * s.m, s.p, s.m), expect) << "tau=" << tau << " block " << i << "," << j;
        }
    }
  EXPECT_EQ(sampled_transfer(ex1_stab(), 0, 0), rm({{"0", "0"}, {"0", "z^-2"}}));
}

TEST(Cyclic, SampledTransferSeriesMatchesMarkov) {
  auto s = fixture("example2.json");
  auto mk = markov(s, 3 * s.T + 2);
  for (long tau : {0L, 1L})
    for (int i = 0; i < s.T; ++i) {
      // H_i(z^T) = sum_k M_{i + kT}(tau) z^{-kT}
      auto coeffs = series_coeffs(sampled_transfer(s, i, tau), 3 * s.T + 1);
      for (int k = 0; k < 3; ++k) EXPECT_EQ(coeffs[k * s.T], mk[i + k * s.T][tau]) << i << " " << k;
    }
}

TEST(Cyclic, ShiftTau) {
  for (auto s : {ex1_stab(), fixture("example2.json"), fixture("example3.json")}) {
    auto b0 = build_cyclic(s, 0);
    auto b1 = shift_tau(b0);
    auto ref = build_cyclic(s, 1);
    EXPECT_EQ(b1.Wbar, ref.Wbar);
    EXPECT_EQ(b1.Sbar, ref.Sbar);
    EXPECT_EQ(b1.Abar, ref.Abar);
    auto back = b0;
    for (int k = 0; k < s.T; ++k) back = shift_tau(back);
    EXPECT_EQ(back.Wbar, b0.Wbar);
    EXPECT_EQ(back.Abar, b0.Abar);
  }
}

TEST(Cyclic, StructureCheck) {
  EXPECT_TRUE(check_cyclic_structure(eq24(), 2, 2, 2));
  RatMat delta = rm({{"0", "0", "z^-1", "0"}, {"0", "0", "0", "z^-1"}, {"z^-1", "0", "0", "0"}, {"0", "z^-1", "0", "0"}});
  EXPECT_TRUE(check_cyclic_structure(delta, 2, 2, 2));
  RatMat bad = RatMat::identity(4);
  bad(0, 3) = RatFun(1);
  EXPECT_FALSE(check_cyclic_structure(bad, 2, 2, 2));
}

TEST(Cyclic, CycleSignal) {
  std::vector<QMatrix> v(4, qm({{1}}));
  auto c = cycle_signal(v, 0, 2);
  EXPECT_EQ(c[0], qm({{1}, {0}}));
  EXPECT_EQ(c[1], qm({{0}, {1}}));
  EXPECT_EQ(c[2], qm({{1}, {0}}));
  auto id = cycle_signal(v, 0, 1);
  EXPECT_EQ(id[3], qm({{1}}));
}

TEST(Cyclic, CycledSimulationConsistency) {
  auto s = ex1_stab();
  auto b = build_cyclic(s, 0);
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> val(-3, 3);
  int steps = 8;
  std::vector<QMatrix> u;
  for (int k = 0; k < steps; ++k) u.push_back(qm({{val(rng)}, {val(rng)}}));
  QMatrix x0 = qm({{1}, {-2}});
  auto tr = simulate(s, x0, u, 0, steps);

  PeriodicSystem lifted;
  lifted.T = 1;
  lifted.dims = {b.total_states()};
  lifted.m = s.m * s.T;
  lifted.p = s.p * s.T;
  lifted.A = {b.Abar};
  lifted.B = {b.Bbar};
  lifted.C = {b.Cbar};
  lifted.D = {b.Dbar};
  auto ubar = cycle_signal(u, 0, s.T);
  auto xbar0 = cycle_signal({x0}, 0, s.T)[0];
  auto trb = simulate(lifted, xbar0, ubar, 0, steps);
  auto ybar = cycle_signal(tr.y, 0, s.T);
  for (int k = 0; k < steps; ++k) EXPECT_EQ(trb.y[k], ybar[k]) << k;
}

TEST(Cyclic, CharacteristicPolynomialRelation) {
  for (auto s : {ex1_stab(), fixture("example1.json"), fixture("example2.json"), fixture("example3.json")})
    for (long tau : {0L, 1L}) {
      auto b = build_cyclic(s, tau);
      Poly lhs = charpoly(b.Abar);
      // det(zI - A) = +-det(z^T I - Psi(tau)) z^e, e = sum n - T n(tau), read
      // as a polynomial identity when e < 0.
      Poly inner = charpoly(monodromy(s, tau).psi).inflate(s.T);
      long e = b.total_states() - s.T * s.n(tau);
      Poly rhs = inner * Poly::z(std::max(0L, e));
      lhs = lhs * Poly::z(std::max(0L, -e));
      EXPECT_TRUE(lhs == rhs || lhs == -rhs) << lhs.to_string() << " vs " << rhs.to_string();
      EXPECT_EQ(is_stable(s), schur_stable(lhs));
      EXPECT_EQ(output_reachable(s), normal_rank(b.Wbar) == s.p * s.T);
    }
}

TEST(CyclicHermite, ExampleOne) {
  auto b = build_cyclic(ex1_stab(), 0);
  auto r = cyclic_hermite(b);
  EXPECT_EQ(r.shift, 1);
  EXPECT_EQ(r.hermite.H,
            rm({{"0", "0", "z^-1", "0"}, {"0", "0", "0", "z^-1"}, {"z^-1", "0", "0", "0"}, {"0", "z^-1", "0", "0"}}));
  EXPECT_EQ(r.hermite.U,
            rm({{"1", "-1", "-z^-1", "0"}, {"0", "1", "0", "0"}, {"0", "-z^-1", "-1", "1"}, {"0", "0", "1", "0"}}));
  for (const auto& v : cyclic_hermite_violations(b, r)) ADD_FAILURE() << v;
  EXPECT_TRUE(r.log.empty());
}

TEST(CyclicHermite, ExampleTwoIsFixedPoint) {
  auto b = build_cyclic(fixture("example2.json"), 0);
  auto r = cyclic_hermite(b);
  EXPECT_EQ(r.hermite.H, b.Wbar);
  EXPECT_EQ(r.hermite.U, RatMat::identity(6));
  for (const auto& v : cyclic_hermite_violations(b, r)) ADD_FAILURE() << v;
}

// The paired blocks of Example 3 are already in Hermite form, but entry (4,2)
// lies in another block of a row whose diagonal entry is a unit, so its
// residue is zero.
TEST(CyclicHermite, ExampleThreeCrossBlockResidue) {
  auto b = build_cyclic(fixture("example3.json"), 0);
  auto r = cyclic_hermite(b);
  RatMat expect = b.Wbar;
  expect(3, 1) = RatFun();
  EXPECT_EQ(r.hermite.H, expect);
  RatMat u = RatMat::identity(6);
  u(4, 1) = laurent("-z^-1");
  EXPECT_EQ(r.hermite.U, u);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(r.hermite.H.block(2 * i, 3 * i, 2, 3), b.Wbar.block(2 * i, 3 * i, 2, 3));
  for (const auto& v : cyclic_hermite_violations(b, r)) ADD_FAILURE() << v;
}

TEST(CyclicHermite, RejectsUnstable) {
  auto b = build_cyclic(fixture("example1.json"), 0);
  EXPECT_THROW(cyclic_hermite(b), Error);
}
