#include "adboot/hoeffding.hpp"
#include "adboot/oracles.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace adboot;
using testutil::rel_err;

namespace {

Eigen::MatrixXd random_matrix(std::uint64_t seed, Index n, bool symmetric) {
  CounterStream s(seed, 5);
  Eigen::MatrixXd v(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) v(i, j) = s.next_normal();
  if (symmetric) v = (0.5 * (v + v.transpose())).eval();
  return v;
}

std::vector<Index> random_realization(std::uint64_t seed, Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<Index>(uniform_index(seed, 0, i, n));
  return idx;
}

EstimatorConfig config(Family f, double h, int d = 1) {
  EstimatorConfig cfg;
  cfg.family = f;
  cfg.kernel = KernelSpec(KernelFamily::Gaussian2, d);
  cfg.h = h;
  if (is_gj(f)) cfg.gj_c = 2.0;
  if (is_leave_out(f)) cfg.blocks = kBlocksN;
  return cfg;
}

double reconstruct(const HoeffdingParts& p) { return p.beta + p.linear_component() + p.quad_component(); }

}  // namespace

TEST_CASE("bootstrap reconstruction for random V matrices") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Index n = 3 + static_cast<Index>(seed % 28);
    const bool symmetric = seed % 2 == 0;
    const Eigen::MatrixXd v = random_matrix(seed, n, symmetric);
    const VRepresentation vrep = VRepresentation::from_matrix(v);
    const Sample s = testutil::random_sample(seed, n, 1);
    const HoeffdingParts p = decompose_bootstrap(s, vrep, random_realization(seed, n));
    CAPTURE(seed);
    CHECK(p.reconstruction_residual <= 1e-12);
    CHECK(std::abs(reconstruct(p) - (p.estimate - p.center)) <= 1e-12 * std::max(1.0, std::abs(p.estimate)));
    CHECK(p.center == doctest::Approx(v.mean()).epsilon(1e-13));

    // E* of L*_i is zero and W*_ij is degenerate in each argument
    for (Index i : {Index(0), n - 1}) {
      CHECK(std::abs(bootstrap_linear_function(vrep, i).mean()) <= 1e-13 * v.cwiseAbs().maxCoeff());
      const Eigen::MatrixXd w = bootstrap_quadratic_kernel(vrep, i, (i + 1) % n);
      CHECK(w.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(w.rowwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("bias term for a symmetric V with constant diagonal") {
  const Index n = 9;
  Eigen::MatrixXd v = random_matrix(3, n, true);
  const double delta = 0.7;
  v.diagonal().setConstant(delta);
  const Sample s = testutil::random_sample(3, n, 1);
  const HoeffdingParts p = decompose_bootstrap(s, VRepresentation::from_matrix(v));
  const double theta_star = v.mean(), theta_hat = v.mean();
  const double want = delta / double(n) + theta_star - theta_hat - theta_star / double(n);
  CHECK(std::abs(p.beta - want) < 1e-15);
  // at the sample itself the decomposition explains a zero difference
  CHECK(std::abs(reconstruct(p)) < 1e-14);
}

TEST_CASE("constant V has no linear or quadratic part") {
  const Sample s = testutil::random_sample(4, 6, 1);
  const HoeffdingParts p =
      decompose_bootstrap(s, VRepresentation::from_matrix(Eigen::MatrixXd::Constant(6, 6, 2.5)), random_realization(4, 6));
  CHECK(p.linear.cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(p.quad_sum) == 0.0);
  CHECK(p.beta == 0.0);
}

TEST_CASE("estimator representations reproduce the estimators") {
  const Sample s = testutil::random_sample(8, 20, 2);
  for (Family f : {Family::AD, Family::AD_BC, Family::AD_GJ, Family::AD_LO, Family::ISD, Family::ISD_BC, Family::ISD_GJ,
                   Family::ISD_LO, Family::ISD_DCF, Family::LR, Family::LR_BC, Family::LR_GJ, Family::LR_LO}) {
    const EstimatorConfig cfg = config(f, 0.7, 2);
    const VRepresentation vrep = VRepresentation::for_estimator(s, cfg);
    CAPTURE(family_name(f));
    CHECK(rel_err(vrep.mean(), estimate(s, cfg).value) < 1e-12);
    const HoeffdingParts p = decompose_bootstrap(s, vrep, random_realization(8, 20));
    CHECK(p.reconstruction_residual <= 1e-12);
  }
}

TEST_CASE("AD bootstrap bias has the closed form") {
  const Sample s = testutil::random_sample(12, 30, 1);
  const EstimatorConfig cfg = config(Family::AD, 0.4);
  const HoeffdingParts p = decompose_bootstrap(s, VRepresentation::for_estimator(s, cfg));
  const double theta = estimate(s, cfg).value;
  CHECK(rel_err(p.beta, cfg.kernel.at_zero() / (30.0 * 0.4) - theta / 30.0) < 1e-12);
}

TEST_CASE("streamed decomposition matches the stored one") {
  // above the materialization limit the quadratic part is summarized only
  const Index n = kMaterializeLimit + 50;
  const Sample s = testutil::random_sample(2, n, 1);
  const EstimatorConfig cfg = config(Family::AD, 0.2);
  const HoeffdingParts p = decompose_bootstrap(s, VRepresentation::for_estimator(s, cfg), random_realization(2, n));
  CHECK(p.quad.size() == 0);
  CHECK(p.reconstruction_residual <= 1e-12);
}

TEST_CASE("population decomposition") {
  const DensityModel model = DensityModel::standard_normal(1);
  const GaussianMixtureTruth truth(model, KernelSpec(KernelFamily::Gaussian2, 1));
  for (Family f : {Family::AD, Family::AD_LO, Family::ISD, Family::ISD_LO, Family::LR}) {
    const Sample s = sample_from(model, 60, 17);
    const EstimatorConfig cfg = config(f, 0.5);
    const HoeffdingParts p = decompose_population(s, VRepresentation::for_estimator(s, cfg), truth);
    CAPTURE(family_name(f));
    CHECK(std::abs(reconstruct(p) - (p.estimate - theta0(model))) <= 1e-10);
    CHECK(p.center == theta0(model));
  }

  // L_i approximates the efficient influence function for small h
  const Sample big = sample_from(model, 1500, 3);
  const HoeffdingParts p = decompose_population(big, VRepresentation::for_estimator(big, config(Family::AD, 0.05)), truth);
  CHECK(p.linear_var() == doctest::Approx(sigma0_sq(model)).epsilon(0.15));
}

TEST_CASE("quadratic term variance vanishes at h = n^{-1/3}") {
  const DensityModel model = DensityModel::standard_normal(1);
  const GaussianMixtureTruth truth(model, KernelSpec(KernelFamily::Gaussian2, 1));
  std::vector<double> scaled;
  for (Index n : {100, 400, 1600}) {
    const int reps = 40;
    double sum = 0.0, sum2 = 0.0;
    const double h = std::pow(double(n), -1.0 / 3.0);
    for (int r = 0; r < reps; ++r) {
      const Sample s = sample_from(model, n, 500 + std::uint64_t(r) + std::uint64_t(n) * 1000);
      const HoeffdingParts p = decompose_population(s, VRepresentation::for_estimator(s, config(Family::AD, h)), truth);
      sum += p.quad_component();
      sum2 += p.quad_component() * p.quad_component();
    }
    const double var = sum2 / reps - (sum / reps) * (sum / reps);
    scaled.push_back(double(n) * var);
  }
  CHECK(scaled[1] < scaled[0]);
  CHECK(scaled[2] < scaled[1]);
}

TEST_CASE("size mismatch is rejected") {
  const Sample s = testutil::random_sample(1, 5, 1);
  CHECK_THROWS_AS(decompose_bootstrap(s, VRepresentation::from_matrix(Eigen::MatrixXd::Zero(4, 4))),
                  std::invalid_argument);
  CHECK_THROWS_AS(VRepresentation::from_matrix(Eigen::MatrixXd::Zero(4, 3)), std::invalid_argument);
}
