#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "../oracle_values.hpp"
#include "erm/bounds.hpp"
#include "erm/errors.hpp"
#include "erm/risk.hpp"

using namespace erm;

namespace {

DataModel unit_model(TargetFn target, double noise = 0.0) {
  const std::size_t d = target.dim();
  return DataModel{Box{d, 0.0, 1.0}, std::move(target), noise, 0.0, 1.0};
}

double rel_inf_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

TEST(EmpiricalRisk, Examples) {
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const ParamVector half(std::vector<double>{0, 0.5});
  const std::vector<Sample> one = {{{0.2}, 0.0}};
  EXPECT_DOUBLE_EQ(empirical_risk(net, half, one), 0.25);

  const ParamVector id(std::vector<double>{1, 0});
  const std::vector<Sample> exact = {{{0.2}, 0.2}, {{0.7}, 0.7}};
  EXPECT_EQ(empirical_risk(net, id, exact), 0.0);

  const ClippedNet wide(Architecture({1, 1}), -10, 10);
  const std::vector<Sample> pm = {{{0.0}, 1.0}, {{0.0}, -1.0}};
  EXPECT_DOUBLE_EQ(empirical_risk(wide, ParamVector(2), pm), 1.0);

  EXPECT_THROW(empirical_risk(net, id, std::vector<Sample>{}), ContractError);
}

TEST(EmpiricalRisk, RangeBoundProperty) {
  const ClippedNet net(Architecture({2, 3, 1}), -0.5, 1.5);
  Stream s = derive_stream(2, {StreamPurpose::probe, 0, 0});
  for (int t = 0; t < 500; ++t) {
    ParamVector theta(net.arch().param_count());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = s.uniform(-3, 3);
    std::vector<Sample> batch;
    for (int j = 0; j < 8; ++j) batch.push_back({{s.uniform(), s.uniform()}, s.uniform(-0.5, 1.5)});
    const double r = empirical_risk(net, theta, batch);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 4.0);
  }
}

TEST(Gradient, HandChainRule) {
  const ClippedNet net(Architecture({1, 1}), -10, 10);
  const ParamVector theta(std::vector<double>{1, 0});
  const std::vector<Sample> batch = {{{1.0}, 0.0}};
  EXPECT_EQ(generalized_gradient(net, theta, batch), (std::vector<double>{2, 2}));
  const auto fd = finite_diff_gradient(net, theta, batch);
  EXPECT_LE(rel_inf_error(fd.gradient, {2, 2}), 1e-6);
}

TEST(Gradient, SaturatedClipIsZero) {
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const ParamVector theta(std::vector<double>{3, 1});
  const std::vector<Sample> batch = {{{0.5}, 0.2}};
  EXPECT_EQ(generalized_gradient(net, theta, batch), (std::vector<double>{0, 0}));
}

TEST(Gradient, AtThresholdIsZero) {
  // Pre-clip value exactly v: clip' = 0 at the threshold.
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const ParamVector theta(std::vector<double>{0.5, 0.5});
  const std::vector<Sample> batch = {{{1.0}, 0.0}};
  EXPECT_EQ(generalized_gradient(net, theta, batch), (std::vector<double>{0, 0}));
}

TEST(Gradient, ReluKinkUsesZero) {
  // Hidden pre-activation exactly 0: relu'(0) = 0 kills the first layer's gradient.
  const ClippedNet net(Architecture({1, 1, 1}), -10, 10);
  const ParamVector theta(std::vector<double>{1, 0, 1, 0.5});
  const std::vector<Sample> batch = {{{0.0}, 0.0}};
  const auto g = generalized_gradient(net, theta, batch);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 0.0);  // relu(0) = 0 multiplies the outer weight's gradient
  EXPECT_EQ(g[3], 1.0);  // 2 * (0.5 - 0)
}

TEST(Gradient, AbsNetMatchesFiniteDifferences) {
  const ClippedNet net(Architecture({1, 2, 1}), 0, 1);
  const ParamVector theta(std::vector<double>{1, -1, 0, 0, 1, 1, 0});
  const std::vector<Sample> batch = {{{0.3}, 0.0}};
  const auto g = generalized_gradient(net, theta, batch);
  const auto fd = finite_diff_gradient(net, theta, batch);
  EXPECT_LE(rel_inf_error(fd.gradient, g), 1e-6);
  // The hidden biases sit at 0 +- 0.3, far from the kink; the output bias is
  // at 0, but the output pre-activation is 0.3, inside (0, 1).
  for (bool k : fd.near_kink) EXPECT_FALSE(k);
}

TEST(Gradient, KinkDetection) {
  // Output pre-activation exactly at the lower clip threshold.
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const ParamVector theta(std::vector<double>{1, 0});
  const std::vector<Sample> batch = {{{0.0}, 0.5}};
  const auto fd = finite_diff_gradient(net, theta, batch);
  EXPECT_TRUE(fd.near_kink[1]);
}

TEST(Gradient, ZeroFunctionZeroVector) {
  const ClippedNet net(Architecture({2, 3, 1}), -1, 1);
  const ParamVector theta(net.arch().param_count());
  const std::vector<Sample> batch = {{{0.3, 0.4}, 0.0}};
  const auto fd = finite_diff_gradient(net, theta, batch);
  for (double v : fd.gradient) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, InertTailGetsZero) {
  const ClippedNet net(Architecture({1, 2, 1}), -1, 1);
  ParamVector theta(std::vector<double>{0.5, -0.4, 0.1, 0.2, 0.7, 0.3, 0.05, 9, 9});
  const std::vector<Sample> batch = {{{0.6}, 0.1}, {{0.2}, -0.3}};
  const auto g = generalized_gradient(net, theta, batch);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_EQ(g[7], 0.0);
  EXPECT_EQ(g[8], 0.0);
}

TEST(Gradient, RandomConfigsMatchFiniteDifferences) {
  Stream s = derive_stream(11, {StreamPurpose::probe, 0, 0});
  const std::vector<std::vector<std::size_t>> archs = {{1, 1}, {2, 1}, {1, 4, 1}, {2, 5, 1}, {2, 4, 3, 1}};
  int checked = 0;
  for (int t = 0; t < 200 && checked < 50; ++t) {
    const ClippedNet net(Architecture(archs[t % archs.size()]), -5, 5);
    ParamVector theta(net.arch().param_count());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = s.uniform(-1, 1);
    std::vector<Sample> batch;
    for (int j = 0; j < 4; ++j) {
      Sample smp;
      for (std::size_t q = 0; q < net.arch().input_dim(); ++q) smp.x.push_back(s.uniform(-1, 1));
      smp.y = s.uniform(-1, 1);
      batch.push_back(smp);
    }
    const auto fd = finite_diff_gradient(net, theta, batch);
    if (std::ranges::any_of(fd.near_kink, [](bool b) { return b; })) continue;
    EXPECT_LE(rel_inf_error(generalized_gradient(net, theta, batch), fd.gradient), 1e-6);
    ++checked;
  }
  EXPECT_GE(checked, 40);
}

TEST(TargetFn, EvaluationAndContracts) {
  const TargetFn f = TargetFn::max_affine({{{1.0}, 0.0}, {{-1.0}, 0.0}}, 0.0, 0.8);
  EXPECT_DOUBLE_EQ(f(std::vector<double>{0.3}), 0.3);
  EXPECT_DOUBLE_EQ(f(std::vector<double>{-0.3}), 0.3);
  EXPECT_DOUBLE_EQ(f(std::vector<double>{0.9}), 0.8);
  EXPECT_EQ(f.lipschitz(), 1.0);
  TargetFn g = f;
  EXPECT_THROW(g.declare_lipschitz(0.5), ContractError);
  EXPECT_EQ(g.declare_lipschitz(2.0).lipschitz(), 2.0);
  EXPECT_THROW(TargetFn::max_affine({}, 0, 1), ContractError);
  EXPECT_THROW(TargetFn::max_affine({{{1.0}, 0.0}, {{1.0, 2.0}, 0.0}}, 0, 1), ContractError);
  EXPECT_THROW(TargetFn::affine_clipped({1.0}, 0.0, 1, 0), ContractError);
}

TEST(TargetFn, LipschitzSpotCheck) {
  const TargetFn f = TargetFn::max_affine({{{0.5, -1.2}, 0.1}, {{-0.7, 0.3}, 0.4}, {{1.1, 0.9}, -0.6}}, 0, 1);
  Stream s = derive_stream(3, {StreamPurpose::probe, 0, 0});
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> x = {s.uniform(), s.uniform()};
    const std::vector<double> y = {s.uniform(), s.uniform()};
    EXPECT_LE(std::abs(f(x) - f(y)), f.lipschitz() * lp_distance(x, y, 1.0) + 1e-15);
  }
}

TEST(DataModel, ValidationAndNoise) {
  const TargetFn f = TargetFn::affine_clipped({0.4}, 0.3, 0.2, 0.8);
  DataModel m = unit_model(f, 0.2);
  EXPECT_NO_THROW(m.validate());
  m.noise = 0.25;
  EXPECT_THROW(m.validate(), ContractError);
  m.noise = 0.1;
  Stream s = derive_stream(1, {StreamPurpose::data, 0, 0});
  int plus = 0;
  for (int i = 0; i < 2000; ++i) {
    const Sample smp = m.sample(s);
    const double eta = smp.y - f(smp.x);
    EXPECT_NEAR(std::abs(eta), 0.1, 1e-15);
    plus += eta > 0;
    EXPECT_TRUE(m.box.contains(smp.x));
  }
  EXPECT_NEAR(plus, 1000, 150);
}

TEST(MonteCarlo, HalfNetVersusIdentity) {
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const ParamVector half(std::vector<double>{0, 0.5});
  const TargetFn id = TargetFn::affine_clipped({1.0}, 0.0, 0.0, 1.0);
  const Box box{1, 0.0, 1.0};
  Stream s = derive_stream(5, {StreamPurpose::eval, 0, 0});
  const Estimate e = l2_error_mc(net, half, id, box, 100000, s);
  EXPECT_LE(std::abs(e.value - oracle::kL2HalfVsIdentity), 3 * e.se);
  EXPECT_NEAR(exact_l2_error(net, half, id, box), oracle::kL2HalfVsIdentity, 1e-15);
}

TEST(MonteCarlo, ExactRepresenterHasZeroError) {
  const ClippedNet net(Architecture({2, 1}), 0, 1);
  const TargetFn f = TargetFn::affine_clipped({0.3, -0.2}, 0.4, 0.0, 1.0);
  const ParamVector theta(std::vector<double>{0.3, -0.2, 0.4});
  const Box box{2, 0.0, 1.0};
  Stream s = derive_stream(5, {StreamPurpose::eval, 1, 0});
  EXPECT_LT(l2_error_mc(net, theta, f, box, 1000, s).value, 1e-30);
  EXPECT_EQ(exact_l2_error(net, theta, f, box), 0.0);
}

TEST(MonteCarlo, ConstantNetVersusConstantTarget) {
  const ClippedNet net(Architecture({1, 3, 1}), 0, 1);
  const ParamVector theta = construct_constant_net(net.arch(), 0, 1, 1.0);
  const TargetFn zero = TargetFn::affine_clipped({0.0}, 0.0, 0.0, 1.0);
  Stream s = derive_stream(5, {StreamPurpose::eval, 2, 0});
  const Estimate e = l2_error_mc(net, theta, zero, Box{1, 0, 1}, 1000, s);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.se, 0.0);
}

TEST(MonteCarlo, TrueRiskAddsNoiseVariance) {
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const TargetFn f = TargetFn::affine_clipped({0.4}, 0.3, 0.2, 0.8);
  const ParamVector theta(std::vector<double>{0.1, 0.45});
  for (double eps : {0.0, 0.15}) {
    const DataModel m = unit_model(f, eps);
    Stream s1 = derive_stream(8, {StreamPurpose::eval, 0, 0});
    Stream s2 = derive_stream(8, {StreamPurpose::eval, 1, 0});
    const Estimate risk = true_risk_mc(net, theta, m, 200000, s1);
    const Estimate l2 = l2_error_mc(net, theta, f, m.box, 200000, s2);
    EXPECT_LE(std::abs(risk.value - (l2.value + eps * eps)), 3 * std::hypot(risk.se, l2.se));
    EXPECT_NEAR(exact_true_risk(net, theta, m), exact_l2_error(net, theta, f, m.box) + eps * eps, 1e-15);
  }
}

TEST(MonteCarlo, MatchedTargetLeavesNoise) {
  const ClippedNet net(Architecture({1, 1}), 0, 1);
  const TargetFn f = TargetFn::affine_clipped({0.0}, 0.5, 0.3, 0.7);
  const DataModel m = unit_model(f, 0.2);
  Stream s = derive_stream(8, {StreamPurpose::eval, 3, 0});
  const Estimate risk = true_risk_mc(net, ParamVector(std::vector<double>{0, 0.5}), m, 1000, s);
  EXPECT_NEAR(risk.value, 0.04, 1e-15);
}

TEST(ExactL2, AgreesWithMonteCarloOnClippedPieces) {
  // Net and target both cross the clip thresholds inside the box.
  Stream s = derive_stream(21, {StreamPurpose::probe, 0, 0});
  for (std::size_t d : {1u, 2u}) {
    const ClippedNet net(Architecture({d, 1}), 0.1, 0.9);
    for (int t = 0; t < 10; ++t) {
      std::vector<AffinePiece> pieces;
      for (int k = 0; k < 3; ++k) {
        AffinePiece p{{}, s.uniform(-0.5, 1.0)};
        for (std::size_t j = 0; j < d; ++j) p.weights.push_back(s.uniform(-1.5, 1.5));
        pieces.push_back(p);
      }
      const TargetFn f = TargetFn::max_affine(pieces, 0.1, 0.9);
      ParamVector theta(d + 1);
      for (std::size_t i = 0; i <= d; ++i) theta[i] = s.uniform(-1.5, 1.5);
      const Box box{d, -0.5, 1.0};
      Stream e = derive_stream(21, {StreamPurpose::eval, static_cast<std::uint64_t>(t), d});
      const Estimate mc = l2_error_mc(net, theta, f, box, 400000, e);
      EXPECT_LE(std::abs(exact_l2_error(net, theta, f, box) - mc.value), 4 * mc.se + 1e-12);
    }
  }
}

TEST(ExactL2, Capability) {
  const ClippedNet deep(Architecture({1, 2, 1}), 0, 1);
  const TargetFn f = TargetFn::affine_clipped({1.0}, 0.0, 0.0, 1.0);
  EXPECT_THROW(exact_l2_error(deep, ParamVector(7), f, Box{1, 0, 1}), CapabilityError);
  const ClippedNet wide(Architecture({3, 1}), 0, 1);
  EXPECT_FALSE(exact_risk_supported(wide, Box{3, 0, 1}));
  EXPECT_TRUE(exact_risk_supported(ClippedNet(Architecture({2, 1}), 0, 1), Box{2, 0, 1}));
}

TEST(DatasetCsv, RoundTrip) {
  const std::vector<Sample> rows = {{{0.1, 0.2}, 0.3}, {{0.123456789012345678, 1.0}, 0.0}};
  std::stringstream ss;
  write_dataset_csv(ss, rows);
  EXPECT_EQ(read_dataset_csv(ss, Box{2, 0, 1}, 0, 1), rows);
}

TEST(DatasetCsv, Validation) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset_csv(in, Box{1, 0, 1}, 0, 1);
  };
  EXPECT_THROW(read(""), ContractError);
  EXPECT_THROW(read("a,y\n0.1,0.2\n"), ContractError);
  EXPECT_THROW(read("x0,y\n1.5,0.2\n"), ContractError);
  EXPECT_THROW(read("x0,y\n0.5,2\n"), ContractError);
  EXPECT_THROW(read("x0,y\n0.5\n"), ContractError);
  EXPECT_THROW(read("x0,y\nzz,0.1\n"), ContractError);
  try {
    read("x0,y\n0.5,0.5\n0.5,7\n");
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(read("x0,y\n0.5,0.25\n").size(), 1u);
}
