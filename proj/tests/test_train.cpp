#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/kernels.hpp"
#include "ennreg/loss.hpp"
#include "ennreg/prediction.hpp"
#include "ennreg/train.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace ennreg {
namespace {

using testing::random_prototypes;
using testing::relative_error;

// ---- loss ----

TEST(Loss, VacuousEvidence) {
  const Grfn vac{0.0, 1.0, 0.0};
  EXPECT_EQ(loss(0.3, vac, 0.0, 0.01), 0.0);
  EXPECT_NEAR(loss(0.3, vac, 0.9, 0.01), -0.9 * std::log(kBeliefFloor), 1e-9);
  EXPECT_TRUE(std::isfinite(loss(0.3, vac, 1.0, 0.01)));
}

TEST(Loss, MatchesDefinition) {
  const Grfn g{0.2, 0.8, 3.0};
  const double y = 0.5, eps = 0.1, lam = 0.7;
  const RealInterval iv{y - eps, y + eps};
  EXPECT_NEAR(loss(y, g, lam, eps), -lam * std::log(belief(g, iv)) - (1 - lam) * std::log(plausibility(g, iv)),
              1e-13);
}

TEST(Loss, NegativeLogLikelihoodDifferences) {
  const double eps = 1e-4;
  const Grfn g{0.0, 1.0, 1e10};
  for (double lam : {0.0, 0.5, 0.95, 1.0}) {
    const double base = loss(0.0, g, lam, eps);
    for (double y : {-2.0, -0.7, 0.4, 1.3, 2.5}) {
      // -log N(y; 0, 1) differences: y^2 / 2.
      EXPECT_NEAR(loss(y, g, lam, eps) - base, 0.5 * y * y, 1e-3) << lam << " " << y;
    }
  }
}

TEST(Loss, MinimizedAtResponse) {
  const double y = 1.3;
  for (double lam : {0.0, 0.5, 0.9, 1.0}) {
    double best_mu = 0.0, best = INFINITY;
    for (double mu = -1.0; mu <= 3.6; mu += 0.01) {
      const double l = loss(y, {mu, 0.6, 2.0}, lam, 0.05);
      if (l < best) {
        best = l;
        best_mu = mu;
      }
    }
    EXPECT_NEAR(best_mu, y, 0.0051) << lam;
  }
}

TEST(Loss, PrecisionScans) {
  const double y = 0.0;
  // Belief rewards precision for a well-centered prototype.
  double prev = INFINITY;
  for (double h = 0.01; h < 1e4; h *= 2.0) {
    const double l = loss(y, {0.0, 1e-4, h}, 1.0, 0.1);
    EXPECT_LT(l, prev) << h;
    prev = l;
  }
  // Plausibility alone rewards vacuity.
  prev = -INFINITY;
  for (double h = 1e-4; h < 1e4; h *= 2.0) {
    const double l = loss(y, {0.3, 0.5, h}, 0.0, 0.1);
    EXPECT_GE(l, prev - 1e-15) << h;
    prev = l;
  }
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const Grfn g{u(rng), std::exp(u(rng)), std::exp(2.0 * u(rng))};
    const double y = g.mean + u(rng), lam = 0.5 * (1.0 + u(rng)), eps = 0.05;
    const LossGradient lg = loss_with_gradient(y, g, lam, eps);
    EXPECT_NEAR(lg.value, loss(y, g, lam, eps), 1e-13);
    const double d = 1e-6;
    const double dm = (loss(y, {g.mean + d, g.variance, g.precision}, lam, eps) -
                       loss(y, {g.mean - d, g.variance, g.precision}, lam, eps)) / (2 * d);
    const double dv = (loss(y, {g.mean, g.variance + d, g.precision}, lam, eps) -
                       loss(y, {g.mean, g.variance - d, g.precision}, lam, eps)) / (2 * d);
    const double dh = (loss(y, {g.mean, g.variance, g.precision + d}, lam, eps) -
                       loss(y, {g.mean, g.variance, g.precision - d}, lam, eps)) / (2 * d);
    EXPECT_NEAR(lg.d_mean, dm, 1e-5 * std::max(1.0, std::abs(dm)));
    EXPECT_NEAR(lg.d_variance, dv, 1e-5 * std::max(1.0, std::abs(dv)));
    EXPECT_NEAR(lg.d_precision, dh, 1e-5 * std::max(1.0, std::abs(dh)));
  }
}

// ---- cost ----

Dataset small_data(std::uint64_t seed, std::size_t n, std::size_t p) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Dataset d;
  d.features = Matrix(n, p);
  d.response.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < p; ++k) s += d.features(i, k) = n01(rng);
    d.response[i] = s + 0.3 * n01(rng);
  }
  for (std::size_t k = 0; k < p; ++k) d.feature_names.push_back("x" + std::to_string(k));
  return d;
}

TEST(Cost, RegularizerAccounting) {
  std::mt19937_64 rng(21);
  const Model m = testing::wrap_model(random_prototypes(rng, 4, 2));
  const Dataset d = small_data(22, 30, 2);
  TrainConfig cfg;
  cfg.lambda = 0.9;
  cfg.epsilon = 0.05;
  cfg.xi = 0.0;
  double mean_loss = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    mean_loss += loss(d.response[i], forward(m, d.features.row(i)), cfg.lambda, cfg.epsilon);
  mean_loss /= d.size();
  const double c0 = cost(m, d, cfg);
  EXPECT_NEAR(c0, mean_loss, 1e-12 * c0);
  cfg.xi = 0.5;
  const double c1 = cost(m, d, cfg);
  cfg.xi = 1.0;
  const double c2 = cost(m, d, cfg);
  EXPECT_NEAR(c2 - c0, 2.0 * (c1 - c0), 1e-12);
  EXPECT_NEAR(c1 - c0, 0.5 / 4.0 * total_precision(m), 1e-12);
}

TEST(Cost, VacuousModelWithoutBeliefTermIsFree) {
  std::mt19937_64 rng(23);
  auto protos = random_prototypes(rng, 3, 2);
  for (auto& p : protos) p.precision = 0.0;
  TrainConfig cfg;
  cfg.lambda = 0.0;
  cfg.xi = 7.0;
  EXPECT_EQ(cost(testing::wrap_model(protos), small_data(24, 10, 2), cfg), 0.0);
}

TEST(Cost, PrototypeOrderIrrelevant) {
  std::mt19937_64 rng(25);
  const auto protos = random_prototypes(rng, 5, 2);
  auto shuffled = protos;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Dataset d = small_data(26, 40, 2);
  TrainConfig cfg;
  const double a = cost(testing::wrap_model(protos), d, cfg);
  const double b = cost(testing::wrap_model(shuffled), d, cfg);
  EXPECT_LE(relative_error(a, b), 1e-12);
}

// ---- gradient ----

TEST(Gradient, MatchesFiniteDifferences) {
  const kernels::CostSettings s{0.9, 0.1, 1e-2};
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    std::mt19937_64 rng(100 + trial);
    const auto protos = random_prototypes(rng, 3, 2);
    const Dataset d = small_data(200 + trial, 16, 2);
    std::vector<std::size_t> rows(16);
    std::iota(rows.begin(), rows.end(), 0);
    const auto analytic = kernels::cost_gradient_serial(protos, d.features, d.response, rows, s);
    auto f = [&](const std::vector<double>& params) {
      auto work = protos;
      kernels::unpack_parameters(params, work);
      return kernels::cost_serial(work, d.features, d.response, rows, s);
    };
    const auto numeric = testing::central_differences(f, kernels::pack_parameters(protos), 1e-5);
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      if (std::max(std::abs(analytic.gradient[k]), std::abs(numeric[k])) <= 1e-8) continue;
      const double e = relative_error(analytic.gradient[k], numeric[k]);
      worst = std::max(worst, e);
      EXPECT_LE(e, 1e-4) << "trial " << trial << " coordinate " << k << ": " << analytic.gradient[k]
                         << " vs " << numeric[k];
    }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Gradient, CenterGradientVanishesAtCenter) {
  const std::vector<Prototype> protos{{{0.5, -0.2}, 1.3, {0.4, 0.1}, 0.2, 0.5, 2.0}};
  Matrix x(1, 2);
  x(0, 0) = 0.5;
  x(0, 1) = -0.2;
  const std::vector<double> y{1.0};
  const auto g = kernels::cost_gradient_serial(protos, x, y, std::vector<std::size_t>{0}, {0.9, 0.1, 0.0});
  const auto off = kernels::block_offsets(2);
  EXPECT_EQ(g.gradient[off.center], 0.0);
  EXPECT_EQ(g.gradient[off.center + 1], 0.0);
  EXPECT_EQ(g.gradient[off.scale], 0.0);
}

TEST(Gradient, MirroredConfiguration) {
  // Prototypes and data mirrored about x = 0 with an even response.
  std::vector<Prototype> protos{{{-1.0}, 0.8, {0.0}, 1.0, 0.4, 1.5}, {{1.0}, 0.8, {0.0}, 1.0, 0.4, 1.5}};
  Matrix x(4, 1);
  const double xs[] = {-1.5, -0.3, 0.3, 1.5};
  for (int i = 0; i < 4; ++i) x(i, 0) = xs[i];
  const std::vector<double> y{2.0, 0.5, 0.5, 2.0};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto g = kernels::cost_gradient_serial(protos, x, y, rows, {0.9, 0.1, 1e-3});
  const auto off = kernels::block_offsets(1);
  EXPECT_NEAR(g.gradient[off.center], -g.gradient[off.size + off.center], 1e-12);
  EXPECT_NEAR(g.gradient[off.slope], -g.gradient[off.size + off.slope], 1e-12);
  for (std::size_t k : {off.scale, off.intercept, off.log_variance, off.sqrt_precision})
    EXPECT_NEAR(g.gradient[k], g.gradient[off.size + k], 1e-12);
}

TEST(Gradient, RawDataWrapper) {
  std::mt19937_64 rng(31);
  Model m = testing::wrap_model(random_prototypes(rng, 2, 2));
  m.scaling.mean = {1.0, -1.0};
  m.scaling.stddev = {2.0, 3.0};
  Dataset d = small_data(32, 12, 2);
  TrainConfig cfg;
  cfg.epsilon = 0.1;
  const auto g = gradient(m, d, cfg);
  const Dataset z = apply_scaling(m.scaling, d);
  std::vector<std::size_t> rows(12);
  std::iota(rows.begin(), rows.end(), 0);
  const auto ref = kernels::cost_gradient(m.prototypes, z.features, z.response, rows, {cfg.lambda, cfg.epsilon, cfg.xi});
  EXPECT_EQ(g, ref.gradient);
}

// ---- k-means and initialization ----

TEST(KMeans, OneClusterPerPoint) {
  const Dataset d = small_data(41, 8, 2);
  const KMeansResult r = kmeans(d.features, 8, 5);
  std::vector<bool> seen(8, false);
  for (std::size_t j = 0; j < 8; ++j) {
    bool matched = false;
    for (std::size_t i = 0; i < 8; ++i)
      if (r.centers(j, 0) == d.features(i, 0) && r.centers(j, 1) == d.features(i, 1)) {
        matched = !seen[i];
        seen[i] = true;
      }
    EXPECT_TRUE(matched) << j;
  }
}

TEST(KMeans, TwoBlobs) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> n(0.0, 0.1);
  Matrix x(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    const double c = i < 100 ? -5.0 : 5.0;
    x(i, 0) = c + n(rng);
    x(i, 1) = 2.0 * c + n(rng);
  }
  const KMeansResult r = kmeans(x, 2, 44);
  const std::size_t neg = r.centers(0, 0) < 0 ? 0 : 1;
  EXPECT_NEAR(r.centers(neg, 0), -5.0, 0.1);
  EXPECT_NEAR(r.centers(neg, 1), -10.0, 0.1);
  EXPECT_NEAR(r.centers(1 - neg, 0), 5.0, 0.1);
  EXPECT_NEAR(r.centers(1 - neg, 1), 10.0, 0.1);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(r.assignment[i], i < 100 ? neg : 1 - neg);
}

TEST(KMeans, Deterministic) {
  const Dataset d = small_data(45, 150, 3);
  const auto a = kmeans(d.features, 6, 9);
  const auto b = kmeans(d.features, 6, 9);
  EXPECT_EQ(a.centers.values(), b.centers.values());
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_THROW(kmeans(d.features, 151, 9), InputError);
  EXPECT_THROW(kmeans(d.features, 0, 9), InputError);
}

TEST(KMeans, FewerDistinctPointsThanClusters) {
  Dataset d;
  d.features = Matrix(10, 1, 0.0);
  for (std::size_t i = 8; i < 10; ++i) d.features(i, 0) = 1.0;
  d.response.assign(10, 2.0);
  const auto r = kmeans(d.features, 3, 1);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_TRUE(r.centers(j, 0) == 0.0 || r.centers(j, 0) == 1.0);
  }
  for (auto a : r.assignment) EXPECT_LT(a, 3u);
  TrainConfig cfg;
  cfg.prototypes = 3;
  const Model m = init_params(d, r.centers, cfg);
  for (const auto& p : m.prototypes) {
    EXPECT_EQ(p.intercept, 2.0);
    EXPECT_GT(p.variance, 0.0);
    EXPECT_TRUE(std::isfinite(p.scale) && p.scale > 0.0);
  }
}

TEST(InitParams, Conventions) {
  Dataset d;
  d.features = Matrix(4, 1);
  // One cluster, members at distance 2 from the center 0.
  const double xs[] = {-2.0, 2.0, -2.0, 2.0};
  for (int i = 0; i < 4; ++i) d.features(i, 0) = xs[i];
  d.response = {3.0, 3.0, 3.0, 3.0};
  Matrix centers(1, 1, 0.0);
  TrainConfig cfg;
  cfg.prototypes = 1;
  const Model m = init_params(d, centers, cfg);
  ASSERT_EQ(m.size(), 1u);
  const Prototype& p = m.prototypes[0];
  EXPECT_EQ(p.intercept, 3.0);
  EXPECT_EQ(p.slope, std::vector<double>{0.0});
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_NEAR(p.scale, 0.35355339059327376, 1e-15);
  EXPECT_GT(p.variance, 0.0);
}

TEST(InitParams, ClusterStatistics) {
  const Dataset d = small_data(47, 60, 2);
  TrainConfig cfg;
  cfg.prototypes = 4;
  const auto km = kmeans(d.features, 4, 3);
  const Model m = init_params(d, km.centers, cfg);
  const double floor = 1e-4 * variance(d.response);
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> ys;
    double dist = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (km.assignment[i] == j) {
        ys.push_back(d.response[i]);
        double s = 0.0;
        for (std::size_t k = 0; k < 2; ++k) s += std::pow(d.features(i, k) - km.centers(j, k), 2);
        dist += std::sqrt(s);
      }
    ASSERT_FALSE(ys.empty());
    dist /= ys.size();
    EXPECT_NEAR(m.prototypes[j].intercept, mean(ys), 1e-12);
    EXPECT_NEAR(m.prototypes[j].variance, std::max(variance(ys), floor), 1e-12);
    EXPECT_NEAR(m.prototypes[j].scale, std::max(1.0 / (std::numbers::sqrt2 * dist), 1e-3), 1e-12);
    EXPECT_EQ(m.prototypes[j].center[0], km.centers(j, 0));
  }
}

// ---- fit ----

TEST(Fit, RecoversLinearModel) {
  const Dataset all = testing::linear_data(150, 51, 2.0, 1.0);
  std::vector<std::size_t> tr(100), te(50);
  std::iota(tr.begin(), tr.end(), 0);
  std::iota(te.begin(), te.end(), 100);
  const Dataset train = all.subset(tr), test = all.subset(te);
  TrainConfig cfg;
  cfg.prototypes = 1;
  cfg.lambda = 0.9;
  cfg.epsilon = resolve_epsilon(train, 0.01);
  cfg.fixed_scale = 0.0;
  cfg.seed = 3;
  const FitResult r = fit(train, cfg);
  const Prototype& p = r.model.prototypes[0];
  EXPECT_EQ(p.scale, 0.0);
  // Slope in raw units.
  EXPECT_NEAR(p.slope[0] / r.model.scaling.stddev[0], 2.0, 0.05);
  const Evaluation e = evaluate(r.model, test, std::vector<double>{0.9});
  EXPECT_LT(e.mse, 1e-3);
}

TEST(Fit, DeterministicTrace) {
  const Dataset d = synthetic(120, 61);
  TrainConfig cfg;
  cfg.prototypes = 5;
  cfg.epsilon = 0.01;
  cfg.optimizer.max_epochs = 40;
  cfg.seed = 11;
  const FitResult a = fit(d, cfg), b = fit(d, cfg);
  EXPECT_EQ(a.trace.train_cost, b.trace.train_cost);
  EXPECT_EQ(a.trace.validation_cost, b.trace.validation_cost);
  EXPECT_EQ(kernels::pack_parameters(a.model.prototypes), kernels::pack_parameters(b.model.prototypes));
  EXPECT_EQ(a.trace.epochs(), 40u);
  EXPECT_EQ(a.trace.validation_cost.size(), 40u);
  for (double c : a.trace.train_cost) EXPECT_TRUE(std::isfinite(c));
  EXPECT_LT(a.trace.train_cost.back(), a.trace.initial_train_cost);
  EXPECT_TRUE(a.trace.warnings.empty());

  std::ostringstream csv;
  a.trace.write_csv(csv);
  const std::string s = csv.str();
  EXPECT_EQ(s.rfind("epoch,train_cost,val_cost\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 41);

  cfg.seed = 12;
  EXPECT_NE(fit(d, cfg).trace.train_cost, a.trace.train_cost);
}

TEST(Fit, PatienceStopsEarly) {
  const Dataset d = synthetic(80, 62);
  TrainConfig cfg;
  cfg.prototypes = 3;
  cfg.epsilon = 0.01;
  cfg.optimizer.patience = 2;
  cfg.optimizer.step_size = 0.5;
  cfg.optimizer.max_epochs = 500;
  const FitResult r = fit(d, cfg);
  EXPECT_EQ(r.trace.stop, StopReason::Patience);
  EXPECT_LT(r.trace.epochs(), 500u);
  EXPECT_LE(r.trace.best_epoch, r.trace.epochs());
}

TEST(Fit, LargeRegularizationIsMoreCautious) {
  const Dataset d = synthetic(200, 63);
  TrainConfig cfg;
  cfg.prototypes = 10;
  cfg.lambda = 0.95;
  cfg.epsilon = 0.01;
  cfg.seed = 1;
  cfg.optimizer.max_epochs = 200;
  cfg.xi = 1e-3;
  const double mild = total_precision(fit(d, cfg).model);
  cfg.xi = 10.0;
  const double strong = total_precision(fit(d, cfg).model);
  EXPECT_LT(strong, mild);
}

TEST(Fit, RejectsBadConfig) {
  const Dataset d = synthetic(20, 64);
  TrainConfig cfg;
  cfg.prototypes = 50;
  EXPECT_THROW(fit(d, cfg), InputError);
  cfg.prototypes = 2;
  cfg.lambda = 1.5;
  EXPECT_THROW(fit(d, cfg), InputError);
  cfg.lambda = 0.5;
  cfg.epsilon = 0.0;
  EXPECT_THROW(fit(d, cfg), InputError);
  cfg.epsilon = 0.1;
  cfg.xi = -1.0;
  EXPECT_THROW(fit(d, cfg), InputError);
}

// ---- cross-validation ----

TEST(CrossValidation, Accounting) {
  const Dataset d = synthetic(40, 71);
  TrainConfig cfg;
  cfg.prototypes = 2;
  cfg.epsilon = 0.01;
  cfg.optimizer.max_epochs = 5;
  const std::vector<double> one{0.25};
  const CvResult single = cross_validate_xi(d, one, 2, cfg);
  EXPECT_EQ(single.best_xi, 0.25);
  EXPECT_EQ(single.table.size(), 1u);
  EXPECT_EQ(single.fits, 2u);

  const std::vector<double> grid{1e-3, 1e-1, 1.0};
  const CvResult r = cross_validate_xi(d, grid, 2, cfg);
  EXPECT_EQ(r.fits, 6u);
  ASSERT_EQ(r.table.size(), 3u);
  for (const auto& row : r.table) {
    EXPECT_EQ(row.fold_mse.size(), 2u);
    EXPECT_NEAR(row.mean_mse, 0.5 * (row.fold_mse[0] + row.fold_mse[1]), 1e-12);
  }
  const CvResult again = cross_validate_xi(d, grid, 2, cfg);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.table[i].fold_mse, r.table[i].fold_mse);
}

TEST(CrossValidation, TiesGoToLargerXi) {
  // With a single epoch of step size ~0 the fitted models coincide for every xi.
  const Dataset d = synthetic(30, 72);
  TrainConfig cfg;
  cfg.prototypes = 2;
  cfg.epsilon = 0.01;
  cfg.optimizer.max_epochs = 1;
  cfg.optimizer.step_size = 1e-300;
  const std::vector<double> grid{0.1, 5.0, 1.0};
  const CvResult r = cross_validate_xi(d, grid, 3, cfg);
  EXPECT_EQ(r.table[0].mean_mse, r.table[1].mean_mse);
  EXPECT_EQ(r.best_xi, 5.0);
}

TEST(CrossValidation, Errors) {
  const Dataset d = synthetic(10, 73);
  TrainConfig cfg;
  cfg.prototypes = 2;
  cfg.epsilon = 0.01;
  EXPECT_THROW(cross_validate_xi(d, std::vector<double>{}, 2, cfg), InputError);
  EXPECT_THROW(cross_validate_xi(d, std::vector<double>{0.1}, 1, cfg), InputError);
  EXPECT_THROW(cross_validate_xi(d, std::vector<double>{0.1}, 11, cfg), InputError);
  EXPECT_THROW(cross_validate_xi(d, std::vector<double>{-0.1}, 2, cfg), InputError);
}

}  // namespace
}  // namespace ennreg
