#include <doctest.h>

#include <Eigen/Dense>

#include <set>

#include "hsmooth/error.hpp"
#include "hsmooth/synth.hpp"

using namespace hsmooth;

TEST_CASE("bundled template has four plateaus") {
  const auto t = RoughTemplate::bundled();
  CHECK(t.nx == 40);
  CHECK(t.ny == 40);
  const std::set<int> labels(t.labels.begin(), t.labels.end());
  CHECK(labels == std::set<int>{0, 1, 2, 3});
  const auto r = t.resample(20, 20);
  CHECK(r.labels.size() == 400);
  CHECK(std::set<int>(r.labels.begin(), r.labels.end()).size() == 4);
  // Resampling to the same size is the identity.
  CHECK(t.resample(40, 40).labels == t.labels);
}

TEST_CASE("template field scales the plateaus") {
  const auto t = RoughTemplate::bundled().resample(20, 20);
  const Eigen::VectorXd f = t.field(2.0);
  std::set<double> values(f.data(), f.data() + f.size());
  CHECK(values == std::set<double>{0.0, 2.0, 4.0, 6.0});
}

TEST_CASE("no magnitude and no noise leaves the smooth field") {
  const auto g = build_grid(10, 10);
  const auto k = build_tps_kernel(g, 1.0);
  Rng rng(41);
  const auto d = make_synthetic(k, RoughTemplate::bundled().resample(10, 10), 0.0, 0.0, rng);
  CHECK(d.z[0] == d.y);
}

TEST_CASE("synthetic data decomposes exactly") {
  const auto g = build_grid(10, 10);
  const auto k = build_tps_kernel(g, 1.0);
  Rng rng(42);
  const auto d = make_synthetic(k, RoughTemplate::bundled().resample(10, 10), 2.0, 0.1,
                                rng, 3);
  REQUIRE(d.z.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((d.z[i] - d.y - d.gamma - d.noise[i]).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(d.noise[0] != d.noise[1]);
  CHECK_THROWS_AS(make_synthetic(k, RoughTemplate::bundled().resample(9, 10), 2.0, 0.1, rng),
                  DimensionError);
}

TEST_CASE("smooth field variance matches the kernel") {
  const auto g = build_grid(8, 8);
  const auto k = build_tps_kernel(g, 1.0);
  Rng rng(43);
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(g.n());
  const int n = 100;
  for (int r = 0; r < n; ++r) ss += simulate_gp_field(k, 0.5, rng).cwiseAbs2();
  const double var = ss.mean() / n;
  CHECK(var == doctest::Approx(0.5 * k.K.diagonal().mean()).epsilon(0.2));
}

TEST_CASE("canonical levels") {
  CHECK(is_canonical_level(2.0, 0.1));
  CHECK(is_canonical_level(0.5, 0.001));
  CHECK_FALSE(is_canonical_level(3.0, 0.1));
  CHECK_FALSE(is_canonical_level(2.0, 0.2));
}

TEST_CASE("constant lambda2 fields scale with sqrt(c)") {
  const auto g = build_grid(6, 6);
  const auto d = build_diff_matrix(g, 1);
  const auto anchor = AnchorSpec{}.resolve(g);
  Rng rng(44);
  const Eigen::VectorXd noise = draw::normal_vector(g.n(), rng);
  const Eigen::VectorXd a =
      ngp_field_from_lambda(d, Eigen::VectorXd::Constant(g.m(), 0.3), anchor, noise);
  // Halving the anchor weight along with the precision keeps Q_b = Q_a / 2.
  const Eigen::VectorXd b =
      ngp_field_from_lambda(d, Eigen::VectorXd::Constant(g.m(), 0.6),
                            AnchorSpec::single(anchor.anchor_index, 0.5e10), noise);
  for (Index k = 0; k < g.n(); ++k) {
    CHECK(b[k] == doctest::Approx(std::sqrt(2.0) * a[k]).epsilon(1e-12));
  }
}

TEST_CASE("shared noise isolates the prior's effect") {
  const auto g = build_grid(8, 8);
  Rng rng(45);
  const Eigen::VectorXd noise = draw::normal_vector(g.n(), rng);
  Rng r1(46);
  Rng r2(46);
  const auto a = simulate_ngp_field(g, simulation_prior("nj"), r1, noise);
  const auto b = simulate_ngp_field(g, simulation_prior("nj"), r2, noise);
  CHECK(a == b);
  Rng r3(46);
  const auto c = simulate_ngp_field(g, simulation_prior("lasso"), r3, noise);
  CHECK(c != a);
}

TEST_CASE("simulation prior narrows only the NJ bounds") {
  const auto nj = simulation_prior("nj");
  CHECK(std::get<NormalJeffreysPrior>(nj.family).log_upper == doctest::Approx(std::log(1e8)));
  CHECK(std::get<LaplacePrior>(simulation_prior("lasso").family).b2 == 1.0);
}

TEST_CASE("step-structure statistic") {
  const auto g = build_grid(10, 10);
  Eigen::VectorXd step(g.n());
  for (Index k = 0; k < g.n(); ++k) step[k] = g.cell(k).second < 5 ? 0.0 : 1.0;
  CHECK(step_structure_ratio(g, step) == 0.0);
  CHECK(has_step_structure(g, step));
  Eigen::VectorXd ramp(g.n());
  for (Index k = 0; k < g.n(); ++k) ramp[k] = static_cast<double>(g.cell(k).second);
  CHECK_FALSE(has_step_structure(g, ramp));
  CHECK_THROWS_AS(step_structure_ratio(g, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("NJ fields are stepped, Laplace fields are not") {
  const auto g = build_grid(20, 20);
  int nj = 0;
  int laplace = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(53, {seed}));
    nj += has_step_structure(g, simulate_ngp_field(g, simulation_prior("nj"), rng));
    Rng rng2(derive_seed(53, {seed}));
    laplace += has_step_structure(g, simulate_ngp_field(g, simulation_prior("lasso"), rng2));
  }
  CHECK(nj >= 12);
  CHECK(laplace == 0);
}
