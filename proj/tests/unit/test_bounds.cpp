#include <gtest/gtest.h>

#include <cmath>

#include "../oracle_values.hpp"
#include "erm/bounds.hpp"
#include "erm/errors.hpp"
#include "erm/risk.hpp"
#include "erm/rng.hpp"

using namespace erm;

namespace {

void expect_rel(double actual, double expected, double tol = 1e-12) {
  EXPECT_LE(std::abs(actual - expected), tol * std::abs(expected)) << actual << " vs " << expected;
}

BoundInputs main_example() {
  BoundInputs in;
  in.d = 1;
  in.widths = {1, 8, 1};
  in.L = 1;
  in.a = 0;
  in.b = 1;
  in.u = 0;
  in.v = 1;
  in.c = 2;
  in.B = 2;
  in.M = 1e6;
  in.K = 1e6;
  in.p = 2;
  in.A = 2;
  return in;
}

// Random inputs satisfying the main hypotheses.
BoundInputs random_admissible(Stream& s) {
  BoundInputs in;
  in.d = 1 + s.below(3);
  const std::size_t depth = 1 + s.below(3);
  in.widths = {in.d};
  for (std::size_t i = 1; i < depth; ++i) in.widths.push_back(1 + s.below(6));
  in.widths.push_back(1);
  in.a = s.uniform(-2, 0);
  in.b = in.a + s.uniform(0.1, 2);
  in.u = s.uniform(-1, 0);
  in.v = in.u + s.uniform(0.1, 2);
  in.L = s.uniform(0, 3);
  const double need = std::max({1.0, in.L, std::abs(in.a), std::abs(in.b), 2 * std::abs(in.u), 2 * std::abs(in.v)});
  in.c = need * s.uniform(1, 2);
  in.B = in.c * s.uniform(1, 2);
  in.M = std::floor(std::pow(10.0, s.uniform(0, 6)));
  in.K = std::floor(std::pow(10.0, s.uniform(0, 6)));
  in.p = s.uniform(1, 5);
  return in;
}

}  // namespace

TEST(Covering, Examples) {
  EXPECT_EQ(covering_number_bound(1, 0, 1, 0.5, kInfNorm).count, 1u);
  EXPECT_EQ(covering_number_bound(2, 0, 1, 0.25, kInfNorm).count, 4u);
  EXPECT_EQ(covering_number_bound(2, 0, 1, 0.5, 1.0).count, 4u);
  EXPECT_EQ(covering_number_bound(1, 0, 1, 0.5, kInfNorm).coarse, 1.0);
  EXPECT_DOUBLE_EQ(covering_number_bound(2, 0, 1, 0.25, kInfNorm).coarse, 16.0);
  EXPECT_THROW(covering_number_bound(1, 0, 1, 0.0, kInfNorm), ContractError);
  EXPECT_THROW(covering_number_bound(1, 1, 0, 0.5, kInfNorm), ContractError);
  EXPECT_THROW(covering_number_bound(20, 0, 1, 1e-6, kInfNorm), CapabilityError);
}

TEST(Covering, BruteForceExamples) {
  // The 4 midpoints cover [0,1]^2 at sup-radius 0.25 and at 1-radius 0.5.
  const auto grid = covering_grid(2, 0, 1, 2);
  ASSERT_EQ(grid.size(), 4u);
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      const std::vector<double> x = {i / 100.0, j / 100.0};
      double best_inf = 1e9, best_one = 1e9;
      for (const auto& g : grid) {
        best_inf = std::min(best_inf, lp_distance(x, g, kInfNorm));
        best_one = std::min(best_one, lp_distance(x, g, 1.0));
      }
      EXPECT_LE(best_inf, 0.25 + 1e-15);
      EXPECT_LE(best_one, 0.5 + 1e-15);
    }
}

TEST(Covering, GridLayout) {
  EXPECT_EQ(covering_grid(1, 0, 1, 2), (std::vector<std::vector<double>>{{0.25}, {0.75}}));
  EXPECT_EQ(covering_grid(3, -1, 1, 1), (std::vector<std::vector<double>>{{0, 0, 0}}));
  const auto g = covering_grid(2, 0, 1, 2);
  EXPECT_EQ(g[1], (std::vector<double>{0.25, 0.75}));  // last coordinate fastest
  EXPECT_DOUBLE_EQ(covering_radius(2, 0, 1, 4, kInfNorm), 0.125);
  EXPECT_DOUBLE_EQ(covering_radius(2, 0, 1, 4, 1.0), 0.25);
}

TEST(Covering, RandomPointsCovered) {
  const auto grid = covering_grid(3, 0, 1, 4);
  const double r = covering_radius(3, 0, 1, 4, kInfNorm);
  Stream s = derive_stream(1, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> x = {s.uniform(), s.uniform(), s.uniform()};
    double best = 1e9;
    for (const auto& g : grid) best = std::min(best, lp_distance(x, g, kInfNorm));
    ASSERT_LE(best, r);
  }
}

TEST(Covering, CountDominatesCoarseForm) {
  Stream s = derive_stream(2, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 1 + s.below(3);
    const double p = std::array<double, 3>{1.0, 2.0, kInfNorm}[s.below(3)];
    const double r = s.uniform(0.05, 2.0);
    const CoveringBound cb = covering_number_bound(d, 0, 1, r, p);
    EXPECT_LE(static_cast<double>(cb.count), cb.coarse * (1 + 1e-12));
  }
}

TEST(ConstantNet, Construction) {
  const Architecture arch({2, 3, 1});
  const ParamVector t = construct_constant_net(arch, 0, 1, 0.7);
  EXPECT_EQ(t.sup_norm(), 0.7);
  EXPECT_EQ(t[arch.param_count() - 1], 0.7);
  const ClippedNet net(arch, 0, 1);
  EXPECT_EQ(forward(net, construct_constant_net(arch, 0, 1, 0.0), std::vector<double>{0.3, 0.9})[0], 0.0);
  EXPECT_THROW(construct_constant_net(arch, 0, 1, 1.5), ContractError);
  EXPECT_THROW(construct_constant_net(Architecture({1, 2}), 0, 1, 0.5), ContractError);
}

TEST(ConstantNet, SupErrorWithinBound) {
  Stream s = derive_stream(3, {StreamPurpose::probe, 0, 0});
  for (std::size_t d : {1u, 2u}) {
    const TargetFn f = TargetFn::max_affine({{std::vector<double>(d, 0.8), -0.3}, {std::vector<double>(d, -0.5), 0.6}},
                                            0, 1);
    const std::vector<double> mid(d, 0.5);
    const ClippedNet net(Architecture({d, 1}), 0, 1);
    const ParamVector t = construct_constant_net(net.arch(), 0, 1, f(mid));
    const double bound = constant_net_error_bound(d, f.lipschitz(), 0, 1);
    const int n = d == 1 ? 10001 : 101;
    std::vector<double> x(d);
    for (int i = 0; i < (d == 1 ? n : n * n); ++i) {
      x[0] = (i % n) / double(n - 1);
      if (d == 2) x[1] = (i / n) / double(n - 1);
      EXPECT_LE(std::abs(forward(net, t, x)[0] - f(x)), bound);
    }
  }
  EXPECT_DOUBLE_EQ(constant_net_error_bound(2, 1.5, -1, 1), 3.0);
}

TEST(Approx, Examples) {
  EXPECT_DOUBLE_EQ(approx_bound(1, 1, 0, 1, 8), 0.375);
  EXPECT_DOUBLE_EQ(approx_bound(2, 2, 0, 1, 36), 2.0);
  EXPECT_GT(approx_bound(2, 1, 0, 1, 10), approx_bound(2, 1, 0, 1, 11));
  EXPECT_THROW(approx_bound(1, 1, 0, 1, 0), ContractError);
}

TEST(Capacity, Examples) {
  EXPECT_EQ(arch_capacity_A(Architecture({2, 3, 1})), 2u);
  EXPECT_EQ(arch_capacity_A(Architecture({5, 1})), 1u);
  EXPECT_EQ(arch_capacity_A(Architecture({1, 5, 7, 1})), 3u);
  EXPECT_EQ(arch_capacity_A(Architecture({1, 8, 1, 1})), 1u);
}

TEST(Admissibility, Examples) {
  EXPECT_TRUE(arch_admissible_for_A(Architecture({1, 1}), 1, 6).admissible);
  EXPECT_TRUE(arch_admissible_for_A(Architecture({2, 1}), 2, 36).admissible);
  EXPECT_TRUE(arch_admissible_for_A(Architecture({1, 7, 6, 4, 2, 1}), 1, 7).admissible);

  const Admissibility shallow = arch_admissible_for_A(Architecture({1, 7, 6, 4, 1}), 1, 7);
  EXPECT_FALSE(shallow.admissible);
  EXPECT_EQ(shallow.violated_layer, 0u);
  EXPECT_DOUBLE_EQ(shallow.required, 4.5);

  const Admissibility thin1 = arch_admissible_for_A(Architecture({1, 6, 6, 4, 2, 1}), 1, 7);
  EXPECT_EQ(thin1.violated_layer, 1u);
  EXPECT_DOUBLE_EQ(thin1.required, 7.0);

  const Admissibility thin2 = arch_admissible_for_A(Architecture({1, 7, 5, 4, 2, 1}), 1, 7);
  EXPECT_EQ(thin2.violated_layer, 2u);
  EXPECT_DOUBLE_EQ(thin2.required, 6.0);
  const Admissibility thin3 = arch_admissible_for_A(Architecture({1, 7, 6, 3, 2, 1}), 1, 7);
  EXPECT_EQ(thin3.violated_layer, 3u);
  EXPECT_DOUBLE_EQ(thin3.required, 4.0);
  const Admissibility thin4 = arch_admissible_for_A(Architecture({1, 7, 6, 4, 1, 1}), 1, 7);
  EXPECT_EQ(thin4.violated_layer, 4u);
  EXPECT_DOUBLE_EQ(thin4.required, 2.0);
}

TEST(Generalization, OracleValues) {
  const FineCoarse g = generalization_bound(2, 0, 1, Architecture({1, 1}), 1e4, 1, 1);
  expect_rel(g.fine, oracle::kGenFine);
  expect_rel(g.coarse, oracle::kGenCoarse);
  EXPECT_TRUE(g.warnings.empty());
}

TEST(Generalization, MonotoneInM) {
  const Architecture arch({2, 3, 1});
  // ln(eM)/sqrt(M) only starts decreasing past M = e.
  double prev = generalization_bound(1, 0, 1, arch, 3, 1, 1).coarse;
  for (double M = 4; M < 1e7; M *= 2) {
    const double cur = generalization_bound(1, 0, 1, arch, M, 1, 1).coarse;
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  EXPECT_FALSE(generalization_bound(1, 0, 0.5, arch, 10, 1, 1).warnings.empty());
}

TEST(Optimization, OracleValues) {
  const FineCoarse o = optimization_bound(1, 0, 1, Architecture({2, 3, 1}), 1, 2, 1000);
  expect_rel(o.fine, oracle::kOptFine);
  expect_rel(o.coarse, oracle::kOptCoarse);
}

TEST(Optimization, Examples) {
  const Architecture arch({1, 1});
  const FineCoarse k1 = optimization_bound(1, 0, 1, arch, 1, 1, 1);
  EXPECT_DOUBLE_EQ(k1.fine, 4.0 * 1 * 1 * 2);
  EXPECT_DOUBLE_EQ(k1.coarse, k1.fine);
  EXPECT_DOUBLE_EQ(optimization_bound(1, 0, 1, arch, 1, 1, 100).fine, k1.fine / 10);
}

TEST(Mmc, OracleAndExamples) {
  const FineCoarse m = mmc_bound(3, 2, 0, 1.5, 2, 50);
  expect_rel(m.fine, oracle::kMmcFine);
  expect_rel(m.coarse, oracle::kMmcCoarse);
  EXPECT_DOUBLE_EQ(mmc_bound(2, 1, 0, 1, 2, 1e4).fine, 0.01);
  EXPECT_DOUBLE_EQ(mmc_bound(1, 1, 0, 1, 2, 1e4).fine, 0.01);
  double prev = 1e9;
  for (double K = 1; K < 1e6; K *= 3) {
    const double cur = mmc_bound(1, 1, 0, 1, 3, K).fine;
    EXPECT_LE(cur, prev);
    prev = cur;
  }
}

TEST(LipschitzRisk, ExamplesAndRandomPairs) {
  EXPECT_DOUBLE_EQ(lipschitz_risk_bound(Architecture({1, 1}), 0, 1, 1, 1), 4.0);
  EXPECT_DOUBLE_EQ(lipschitz_risk_bound(Architecture({1, 1}), 0, 2, 1, 1), 8.0);

  const Architecture arch({1, 2, 1});
  const ClippedNet net(arch, 0, 1);
  const double bound = lipschitz_risk_bound(arch, 0, 1, 1, 1);
  Stream s = derive_stream(4, {StreamPurpose::probe, 0, 0});
  std::vector<Sample> batch;
  for (int j = 0; j < 16; ++j) batch.push_back({{s.uniform(-1, 1)}, s.uniform()});
  for (int i = 0; i < 5000; ++i) {
    ParamVector a(7), b(7), diff(7);
    for (int j = 0; j < 7; ++j) {
      a[j] = s.uniform(-1, 1);
      b[j] = std::clamp(a[j] + s.uniform(-0.01, 0.01), -1.0, 1.0);
      diff[j] = a[j] - b[j];
    }
    EXPECT_LE(std::abs(empirical_risk(net, a, batch) - empirical_risk(net, b, batch)),
              bound * diff.sup_norm() * (1 + 1e-12));
  }
}

TEST(MainBound, OracleValues) {
  const BoundReport r = overall_bound_main(main_example());
  EXPECT_EQ(r.formula_id, "main");
  expect_rel(r.approx, oracle::kMainApprox);
  expect_rel(r.opt, oracle::kMainOpt);
  expect_rel(r.gen, oracle::kMainGen);
  expect_rel(r.total, oracle::kMainTotal);
  EXPECT_EQ(r.total, r.approx + r.gen + r.opt);
  EXPECT_TRUE(r.warnings.empty());

  const BoundReport c = overall_bound_main_coarse(main_example());
  expect_rel(c.approx, oracle::kMainCoarseApprox);
  expect_rel(c.opt, oracle::kMainCoarseOpt);
  expect_rel(c.gen, oracle::kMainCoarseGen);
}

TEST(MainBound, HypothesisWarnings) {
  BoundInputs in = main_example();
  in.c = 0.5;
  in.B = 0.5;
  EXPECT_FALSE(overall_bound_main(in).warnings.empty());
  in = main_example();
  in.B = 1;
  const auto w = overall_bound_main(in).warnings;
  EXPECT_NE(std::find(w.begin(), w.end(), "B < c"), w.end());
}

TEST(MainBound, FineBelowCoarseOnAdmissibleInputs) {
  Stream s = derive_stream(5, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 1000; ++i) {
    const BoundInputs in = random_admissible(s);
    const BoundReport f = overall_bound_main(in);
    const BoundReport c = overall_bound_main_coarse(in);
    EXPECT_LE(f.approx, c.approx * (1 + 1e-12));
    EXPECT_LE(f.gen, c.gen * (1 + 1e-12));
    EXPECT_LE(f.opt, c.opt * (1 + 1e-12));
    const BoundReport lf = sgd_l1_bound(in);
    const BoundReport lc = sgd_l1_bound_coarse(in);
    EXPECT_LE(lf.approx, lc.approx * (1 + 1e-12));
    EXPECT_LE(lf.gen, lc.gen * (1 + 1e-12));
    EXPECT_LE(lf.opt, lc.opt * (1 + 1e-12));
    for (const auto* r : {&f, &c, &lf, &lc}) {
      EXPECT_GE(r->approx, 0.0);
      EXPECT_GE(r->gen, 0.0);
      EXPECT_GE(r->opt, 0.0);
      EXPECT_EQ(r->total, r->approx + r->gen + r->opt);
    }
  }
}

TEST(FineCoarse, RandomOrdering) {
  Stream s = derive_stream(6, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::size_t> widths = {1 + s.below(3)};
    for (std::size_t j = 0, depth = s.below(3); j < depth; ++j) widths.push_back(1 + s.below(8));
    widths.push_back(1);
    const Architecture arch(widths);
    const double p = s.uniform(1, 6);
    const double u = s.uniform(-1, 0), v = u + s.uniform(1, 3);
    const double M = std::pow(10.0, s.uniform(0, 7)), K = std::pow(10.0, s.uniform(0, 7));
    const double B = s.uniform(1, 4), b = s.uniform(1, 4);
    const FineCoarse g = generalization_bound(p, u, v, arch, M, B, b);
    EXPECT_LE(g.fine, g.coarse * (1 + 1e-12));
    const FineCoarse o = optimization_bound(p, u, v, arch, b, B, K);
    EXPECT_LE(o.fine, o.coarse * (1 + 1e-12));
    const FineCoarse m = mmc_bound(p, s.uniform(0, 3), 0, s.uniform(0.1, 2), 1 + s.below(20), K);
    EXPECT_LE(m.fine, m.coarse * (1 + 1e-12));
  }
}

TEST(IntroBound, OracleValues) {
  const BoundReport r = overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e4, 1e4);
  EXPECT_EQ(r.formula_id, "intro");
  expect_rel(r.approx, oracle::kIntroApprox);
  expect_rel(r.gen, oracle::kIntroGen);
  expect_rel(r.opt, oracle::kIntroOpt);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_FALSE(overall_bound_intro(1, Architecture({1, 4, 1}), 1.5, 1e4, 1e4).warnings.empty());
  EXPECT_FALSE(overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e4, 1e4, std::nullopt, 3.0).warnings.empty());
}

TEST(IntroBound, FirstTermIsDcCubedForUnitCapacity) {
  const BoundReport r = overall_bound_intro(3, Architecture({3, 1, 1}), 2.5, 100, 100);
  EXPECT_DOUBLE_EQ(r.approx, 3 * 2.5 * 2.5 * 2.5);
}

TEST(IntroBound, TermsMonotone) {
  const BoundReport a = overall_bound_intro(1, Architecture({1, 4, 4, 1}), 2, 1e3, 1e3);
  const BoundReport b = overall_bound_intro(1, Architecture({1, 4, 4, 4, 1}), 2, 1e3, 1e3);
  EXPECT_LT(b.approx, a.approx);
  EXPECT_LT(overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e5, 1e3).gen,
            overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e4, 1e3).gen);
  EXPECT_LT(overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e4, 1e5).opt,
            overall_bound_intro(1, Architecture({1, 4, 1}), 2, 1e4, 1e4).opt);
}

TEST(IntroBound, L1FineFormBelowIntroTermByTerm) {
  Stream s = derive_stream(7, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 1000; ++i) {
    BoundInputs in;
    in.d = 1 + s.below(3);
    in.widths = {in.d};
    for (std::size_t j = 0, depth = s.below(3); j < depth; ++j) in.widths.push_back(1 + s.below(6));
    in.widths.push_back(1);
    in.L = s.uniform(0, 4);
    in.c = std::max(2.0, in.L) * s.uniform(1, 2);
    in.B = in.c;
    in.M = std::floor(std::pow(10.0, s.uniform(0, 6)));
    in.K = std::floor(std::pow(10.0, s.uniform(0, 6)));
    const BoundReport l1 = sgd_l1_bound(in);
    const BoundReport intro = overall_bound_intro(in.d, in.arch(), in.c, in.M, in.K, std::nullopt, in.L);
    EXPECT_LE(l1.approx, intro.approx);
    EXPECT_LE(l1.gen, intro.gen);
    EXPECT_LE(l1.opt, intro.opt);
  }
}

TEST(LnCheck, Examples) {
  const LnCheck one = ln_reduction_check(1, 1, 1);
  expect_rel(one.lhs, oracle::kLn3);
  expect_rel(one.rhs, oracle::k23Over18);
  EXPECT_TRUE(one.holds);
  Stream s = derive_stream(8, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 10000; ++i) {
    const double M = s.uniform(1, 1e6), c = s.uniform(1, 1e3), B = s.uniform(c, 1e3);
    const LnCheck r = ln_reduction_check(M, B, c);
    EXPECT_TRUE(r.holds);
    EXPECT_LT(r.lhs, r.rhs);
  }
  EXPECT_THROW(ln_reduction_check(1, 1, 2), ContractError);
}

TEST(McLpBound, Examples) {
  EXPECT_DOUBLE_EQ(mc_lp_bound(2, 4, 1), 1.0);
  EXPECT_DOUBLE_EQ(mc_lp_bound(2, 100, 0.5), 0.1);
  EXPECT_DOUBLE_EQ(mc_lp_bound(2, 400, 1) * 2, mc_lp_bound(2, 100, 1));
  EXPECT_THROW(mc_lp_bound(1.5, 4, 1), ContractError);
}
