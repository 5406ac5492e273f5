#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hsmooth/error.hpp"
#include "hsmooth/priors.hpp"
#include "oracles.hpp"

using namespace hsmooth;

namespace {

double median(std::vector<double> x) {
  std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
  return x[x.size() / 2];
}

// log of int N(theta; 0, e^u) pi(e^u) e^u du by the trapezoid rule on a fine
// grid, for comparison with the library's adaptive quadrature.
double trapezoid_log_marginal(const ScalingPrior& prior, double theta, double lo,
                              double hi) {
  const int n = 400000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double u = lo + k * h;
    const double l = std::exp(u);
    const double lp = scaling_log_density(prior, l);
    if (!std::isfinite(lp)) continue;
    const double f = std::exp(-0.5 * std::log(2 * std::numbers::pi * l) -
                              0.5 * theta * theta / l + lp + u);
    s += (k == 0 || k == n ? 0.5 : 1.0) * f;
  }
  return std::log(s * h);
}

}  // namespace

TEST_CASE("make_prior names") {
  for (std::string n : {"lasso", "horseshoe", "cauchy", "pareto", "nj"}) {
    CHECK(make_prior(n).name() == n);
  }
  CHECK_THROWS_AS(make_prior("ridge"), PriorError);
  auto p = make_prior("nj");
  std::get<NormalJeffreysPrior>(p.family).log_lower = 5.0;
  std::get<NormalJeffreysPrior>(p.family).log_upper = 1.0;
  CHECK_THROWS_AS(p.validate(), PriorError);
}

TEST_CASE("NJ forward draws are log-uniform between the bounds") {
  auto p = make_prior("nj");
  auto& nj = std::get<NormalJeffreysPrior>(p.family);
  nj.log_lower = std::log(1e-6);
  nj.log_upper = std::log(1e6);
  Rng rng(21);
  const Eigen::VectorXd l = simulate_lambda(p, 10000, rng);
  std::vector<double> logs;
  for (double v : l) {
    CHECK(v >= 1e-6);
    CHECK(v <= 1e6 * (1 + 1e-12));
    logs.push_back(std::log(v - p.delta_floor));
  }
  const double a = nj.log_lower;
  const double b = nj.log_upper;
  CHECK(oracle::ks_one_sample(logs, [&](double x) { return (x - a) / (b - a); }).p > 0.01);

  // Collapsing the bounds pins every draw to the lower end.
  nj.log_upper = nj.log_lower + 1e-12;
  const Eigen::VectorXd pinned = simulate_lambda(p, 100, rng);
  CHECK((pinned.array() - 1e-6 - p.delta_floor).abs().maxCoeff() < 1e-15);
}

TEST_CASE("Laplace forward draws have mean 2 for rate 1/2") {
  auto p = make_prior("lasso");
  Rng rng(22);
  const Eigen::VectorXd l = simulate_lambda(p, 100000, rng);
  CHECK(l.mean() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("forward draws of the other families") {
  Rng rng(23);
  {
    auto p = make_prior("horseshoe");
    std::get<HorseshoePrior>(p.family).t2 = 4.0;
    const Eigen::VectorXd l = simulate_lambda(p, 20000, rng);
    std::vector<double> lam;
    for (double v : l) lam.push_back(std::sqrt(v - p.delta_floor));
    CHECK(oracle::ks_one_sample(lam, [](double x) {
            return 2.0 / std::numbers::pi * std::atan(x / 2.0);
          }).p > 0.01);
  }
  {
    auto p = make_prior("cauchy");
    std::get<CauchyPrior>(p.family).b2 = 2.0;
    const Eigen::VectorXd l = simulate_lambda(p, 20000, rng);
    std::vector<double> x(l.data(), l.data() + l.size());
    CHECK(oracle::ks_one_sample(x, [](double v) {
            return oracle::inv_gamma_cdf(v, 0.5, 0.25);
          }).p > 0.01);
  }
  {
    auto p = make_prior("pareto");
    auto& par = std::get<ParetoPrior>(p.family);
    par.alpha = 1.5;
    par.lambda2_min = 0.2;
    const Eigen::VectorXd l = simulate_lambda(p, 20000, rng);
    std::vector<double> x(l.data(), l.data() + l.size());
    for (double v : x) CHECK(v >= 0.2);
    CHECK(oracle::ks_one_sample(x, [](double v) {
            return v < 0.2 ? 0.0 : 1.0 - std::pow(0.2 / v, 1.5);
          }).p > 0.01);
  }
}

TEST_CASE("NJ conditional median matches the inverse-gamma quantile") {
  Rng rng(24);
  std::vector<double> x(100000);
  for (auto& v : x) v = conditional::nj_local(std::sqrt(2.0), rng);
  const double want = oracle::inv_gamma_quantile(0.5, 0.5, 1.0);
  CHECK(median(x) == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("LASSO conditional precision has the inverse-Gaussian mean") {
  Rng rng(25);
  const double diff = 0.4;
  const double b2 = 3.0;
  double s = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) s += 1.0 / conditional::lasso_local(diff, b2, rng);
  CHECK(s / n == doctest::Approx(std::sqrt(b2 / (diff * diff))).epsilon(0.02));
}

TEST_CASE("horseshoe t2 layer has the inverse-gamma mean") {
  Rng rng(26);
  const int n = 100000;
  const Eigen::Index m = 4;
  const double scale = 2.5 + 1.0 / 0.8;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += conditional::horseshoe_t2(2.5, m, 0.8, rng);
  CHECK(s / n == doctest::Approx(scale / ((m + 1) / 2.0 - 1.0)).epsilon(0.02));
}

TEST_CASE("Pareto lower bound update endpoints") {
  CHECK(conditional::pareto_lambda2_min(0.3, 10, 2.0, 1.0) == doctest::Approx(0.3));
  CHECK(conditional::pareto_lambda2_min(0.3, 10, 2.0, 0.5) < 0.3);
}

TEST_CASE("update keeps every output above the floors") {
  Rng rng(27);
  Eigen::VectorXd diffs(6);
  diffs << 0.0, 1e-200, -3.0, 0.5, 0.0, 40.0;
  for (std::string n : {"lasso", "horseshoe", "cauchy", "pareto", "nj"}) {
    ScalingPrior p = make_prior(n);
    for (int it = 0; it < 200; ++it) {
      const auto u = update_lambda_posterior(p, diffs, 0.1, rng);
      CHECK((u.lambda2.array() >= p.delta_floor).all());
      CHECK(u.lambda2.allFinite());
      if (const auto* par = std::get_if<ParetoPrior>(&p.family)) {
        CHECK((u.lambda2_star.array() >= par->lambda2_min).all());
      }
      p = u.prior;
    }
    if (const auto* hs = std::get_if<HorseshoePrior>(&p.family)) {
      CHECK(hs->v.size() == diffs.size());
    }
  }
}

TEST_CASE("floor override clamps lambda2 but not lambda*2") {
  Rng rng(28);
  const Eigen::VectorXd diffs = Eigen::VectorXd::Constant(50, 1e-4);
  const auto u = update_lambda_posterior(make_prior("nj"), diffs, 1.0, rng, 0.5);
  CHECK(u.lambda2.minCoeff() >= 0.5);
  CHECK(u.lambda2_star.minCoeff() < 0.5);
}

TEST_CASE("alternating sampler leaves the mixture marginal invariant") {
  // d | l ~ N(0, l) and l | d from the conditional, with the scale fixed:
  // exponential mixing gives Laplace(0, 1/b), IG(1/2, 1/(2 b2)) gives
  // Cauchy(0, 1/b).
  const double b2 = 2.0;
  const double b = std::sqrt(b2);
  Rng rng(29);
  std::vector<double> lap;
  std::vector<double> cau;
  double dl = 0.1;
  double dc = 0.1;
  for (int it = 0; it < 50000; ++it) {
    const double ll = conditional::lasso_local(dl, b2, rng);
    dl = std::sqrt(ll) * draw::normal(rng);
    const double lc = conditional::cauchy_local(dc, b2, rng);
    dc = std::sqrt(lc) * draw::normal(rng);
    if (it % 10 == 9) {
      lap.push_back(dl);
      cau.push_back(dc);
    }
  }
  CHECK(oracle::ks_one_sample(lap, [&](double x) {
          return x < 0 ? 0.5 * std::exp(b * x) : 1.0 - 0.5 * std::exp(-b * x);
        }).p > 0.01);
  CHECK(oracle::ks_one_sample(cau, [&](double x) {
          return 0.5 + std::atan(x * b) / std::numbers::pi;
        }).p > 0.01);
}

TEST_CASE("thresholding curve: symmetry and zero") {
  std::vector<double> theta{-7.0, -2.5, -0.3, 0.0, 0.3, 2.5, 7.0};
  for (std::string n : {"lasso", "horseshoe", "cauchy", "pareto", "nj"}) {
    const auto c = thresholding_curve(make_prior(n), theta);
    CHECK(c[3].posterior_mean == 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(c[k].posterior_mean ==
            doctest::Approx(-c[6 - k].posterior_mean).epsilon(1e-6));
    }
  }
}

TEST_CASE("Laplace curve is the soft-threshold operator") {
  // The Laplace(0, 1/b) marginal has score -b sign(theta).
  std::vector<double> theta;
  for (double t = 3.0; t <= 10.0; t += 0.5) theta.push_back(t);
  const auto c = thresholding_curve(make_prior("lasso"), theta);
  for (const auto& p : c) CHECK(std::abs(p.posterior_mean - (p.theta_star - 1.0)) < 1e-4);
  const auto c10 = thresholding_curve(make_prior("lasso"), std::vector<double>{10.0});
  CHECK(c10[0].posterior_mean == doctest::Approx(9.0).epsilon(0.05 / 9.0));
}

TEST_CASE("Cauchy curve matches the Cauchy score") {
  auto p = make_prior("cauchy");
  std::get<CauchyPrior>(p.family).b2 = 0.25;
  const double s = 2.0;  // scale 1/b
  std::vector<double> theta{0.5, 1.0, 4.0, 9.0};
  const auto c = thresholding_curve(p, theta, 0.7);
  for (const auto& q : c) {
    const double t = q.theta_star;
    const double want = t - 0.49 * 2.0 * t / (t * t + s * s);
    CHECK(q.posterior_mean == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("NJ curve approaches identity for large values") {
  const auto c = thresholding_curve(make_prior("nj"), std::vector<double>{10.0, 50.0});
  CHECK(std::abs(c[0].posterior_mean - 10.0) <= 0.1 + 1e-9);
  CHECK(c[1].posterior_mean == doctest::Approx(50.0 - 1.0 / 50.0).epsilon(1e-6));
}

TEST_CASE("marginal density agrees with a trapezoid oracle") {
  auto hs = make_prior("horseshoe");
  auto par = make_prior("pareto");
  auto& pp = std::get<ParetoPrior>(par.family);
  pp.alpha = 0.7;
  pp.lambda2_min = 0.05;
  for (const auto& [prior, lo] : {std::pair{hs, -40.0}, std::pair{par, std::log(0.05)}}) {
    const double a = marginal_log_density(prior, 0.5) - marginal_log_density(prior, 3.0);
    const double b = trapezoid_log_marginal(prior, 0.5, lo, 60.0) -
                     trapezoid_log_marginal(prior, 3.0, lo, 60.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-5));
  }
}
