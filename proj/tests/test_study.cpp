#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsmooth/error.hpp"
#include "hsmooth/study.hpp"

using namespace hsmooth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

StudyDesign tiny_design() {
  StudyDesign d;
  d.noise_levels = {0.1};
  d.magnitudes = {2.0};
  d.methods = {Method::NJ, Method::TPS};
  d.replicates = 2;
  d.nx = 6;
  d.ny = 6;
  d.n_iter = 300;
  d.burn_in = 100;
  d.workers = 1;
  return d;
}

}  // namespace

TEST_CASE("relative L1 success") {
  Eigen::VectorXd t(3);
  t << 1.0, -2.0, 0.0;
  CHECK(relative_l1_success(t, t) == 1.0);
  CHECK(relative_l1_success(Eigen::VectorXd::Zero(3), t) == 0.0);
  CHECK(relative_l1_success(2.0 * t, t) == 0.0);
  Eigen::VectorXd h(3);
  h << 1.5, -2.0, 0.3;
  CHECK(relative_l1_success(h, t) == doctest::Approx(1.0 - 0.8 / 3.0));
  CHECK_THROWS_AS(relative_l1_success(t, Eigen::VectorXd::Zero(3)), MetricError);
}

TEST_CASE("coverage check") {
  std::vector<double> c(200, 0.7);
  CHECK(coverage_check(c, 0.7));
  std::vector<double> off;
  Rng rng(61);
  for (int k = 0; k < 1000; ++k) off.push_back(10.0 + draw::normal(rng));
  CHECK_FALSE(coverage_check(off, 0.0));
  std::vector<double> u;
  for (int k = 0; k < 1000; ++k) u.push_back(draw::uniform(rng));
  CHECK(coverage_check(u, 0.5));
  CHECK_FALSE(coverage_check(u, 0.99));
  CHECK_THROWS_AS(coverage_check(std::vector<double>(99, 1.0), 1.0), TooFewDrawsError);
}

TEST_CASE("method names round trip") {
  for (Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("ridge"), ConfigError);
}

TEST_CASE("design presets") {
  const auto desk = StudyDesign::desk_scale();
  CHECK(desk.replicates == 10);
  CHECK(desk.nx == 20);
  CHECK(desk.n_iter == 3000);
  CHECK(desk.burn_in == 1000);
  CHECK(desk.noise_levels.size() * desk.magnitudes.size() * desk.methods.size() == 72);
  CHECK(StudyDesign::paper_scale().replicates == 100);
  auto bad = desk;
  bad.burn_in = 2950;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("seeds: data shared across methods, chains distinct") {
  const auto d = StudyDesign::desk_scale();
  CHECK(study_data_seed(d, 0, 1, 3) == study_data_seed(d, 0, 1, 3));
  CHECK(study_data_seed(d, 0, 1, 3) != study_data_seed(d, 0, 1, 4));
  CHECK(study_chain_seed(d, 0, 1, Method::NJ, 3) != study_chain_seed(d, 0, 1, Method::TPS, 3));
}

TEST_CASE("factorial run, aggregation and caching") {
  const auto d = tiny_design();
  const auto a = run_factorial(d);
  REQUIRE(a.replicates.size() == 4);
  for (const auto& r : a.replicates) {
    CHECK(r.error.empty());
    if (r.method == Method::TPS) {
      CHECK_FALSE(r.l1_success.has_value());
      CHECK(r.lambda_modes == 0);
    } else {
      REQUIRE(r.l1_success.has_value());
      CHECK(*r.l1_success <= 1.0);
    }
  }
  REQUIRE(a.cells.size() == 2);
  for (const auto& c : a.cells) {
    CHECK(c.replicates == 2);
    CHECK(c.median_l1.has_value() == (c.method != Method::TPS));
  }

  // Aggregates ignore replicate order.
  auto shuffled = a.replicates;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto c1 = aggregate(a.replicates);
  const auto c2 = aggregate(shuffled);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t k = 0; k < c1.size(); ++k) {
    CHECK(c1[k].median_l1 == c2[k].median_l1);
    CHECK(c1[k].median_edf == c2[k].median_edf);
    CHECK(c1[k].tau2_coverage == c2[k].tau2_coverage);
  }

  // Reruns and cached reruns give identical tables.
  const fs::path dir = fs::temp_directory_path() / "hsmooth_study_test";
  fs::remove_all(dir);
  auto dc = d;
  dc.cache_dir = (dir / "cache").string();
  const auto b = run_factorial(dc);
  write_study_csv((dir / "a").string(), a, d);
  write_study_csv((dir / "b").string(), b, dc);
  int calls = 0;
  const auto cached = run_factorial(dc, [&](const ReplicateResult&) { ++calls; });
  write_study_csv((dir / "c").string(), cached, dc);
  for (const char* f : {"tidy.csv", "aggregate.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "c" / f));
  }
  CHECK(slurp(dir / "a" / "tidy.csv").find("seconds") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("kde mode counting") {
  Rng rng(62);
  std::vector<double> one;
  std::vector<double> two;
  for (int k = 0; k < 4000; ++k) {
    one.push_back(draw::normal(rng));
    two.push_back(draw::normal(rng) * 0.5 + (k % 2 ? 6.0 : 0.0));
  }
  CHECK(kde_modes(one).size() == 1);
  const auto m = kde_modes(two);
  REQUIRE(m.size() == 2);
  CHECK(m[1] - m[0] == doctest::Approx(6.0).epsilon(0.05));
  // Modes closer than the separation are merged.
  CHECK(kde_modes(two, 10.0).size() == 1);
}

TEST_CASE("lambda histogram of a chain without lambda2 is empty") {
  Samples s;
  s.prior_name = "tps";
  const auto h = lambda_histogram_export(s);
  CHECK(h.lambda2.empty());
  CHECK(h.mode_locations.empty());
}
