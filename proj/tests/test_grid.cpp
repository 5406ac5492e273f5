#include <doctest.h>

#include <Eigen/Dense>

#include <set>

#include "hsmooth/error.hpp"
#include "hsmooth/grid.hpp"
#include "oracles.hpp"

using namespace hsmooth;

TEST_CASE("2x2 grid edges") {
  const auto g = build_grid(2, 2);
  const std::vector<Edge> want{{0, 1}, {2, 3}, {0, 2}, {1, 3}};
  CHECK(g.edges == want);
}

TEST_CASE("degenerate grids are rejected") {
  CHECK_THROWS_AS(build_grid(3, 1), InvalidGridError);
  CHECK_THROWS_AS(build_grid(1, 5), InvalidGridError);
}

TEST_CASE("edge count matches brute-force enumeration") {
  for (Index nx = 2; nx <= 6; ++nx) {
    for (Index ny = 2; ny <= 6; ++ny) {
      const auto g = build_grid(nx, ny);
      std::set<std::pair<Index, Index>> brute;
      for (Index a = 0; a < g.n(); ++a) {
        for (Index b = a + 1; b < g.n(); ++b) {
          const auto [ra, ca] = g.cell(a);
          const auto [rb, cb] = g.cell(b);
          if (std::abs(ra - rb) + std::abs(ca - cb) == 1) brute.insert({a, b});
        }
      }
      std::set<std::pair<Index, Index>> got;
      for (const auto& e : g.edges) {
        CHECK(e.i < e.j);
        got.insert({e.i, e.j});
      }
      CHECK(got.size() == g.edges.size());
      CHECK(got == brute);
      CHECK(g.m() == nx * (ny - 1) + ny * (nx - 1));
    }
  }
  CHECK(build_grid(3, 3).m() == 12);
}

TEST_CASE("flat index round trip") {
  const auto g = build_grid(5, 3);
  for (Index r = 0; r < 3; ++r) {
    for (Index c = 0; c < 5; ++c) {
      const auto [rr, cc] = g.cell(g.flat(r, c));
      CHECK(rr == r);
      CHECK(cc == c);
    }
  }
  CHECK(g.center() == g.flat(1, 2));
  CHECK(g.unit_coords(g.flat(2, 4))[0] == 1.0);
  CHECK(g.unit_coords(g.flat(2, 4))[1] == 1.0);
}

TEST_CASE("order-1 rows are +1/-1 on each edge") {
  const auto g = build_grid(3, 2);
  const auto d = build_diff_matrix(g, 1);
  const Eigen::MatrixXd D(d.D);
  REQUIRE(D.rows() == g.m());
  for (Index v = 0; v < g.m(); ++v) {
    CHECK(D(v, g.edges[v].i) == 1.0);
    CHECK(D(v, g.edges[v].j) == -1.0);
    CHECK((D.row(v).array() != 0.0).count() == 2);
  }
}

TEST_CASE("higher-order stencils") {
  const auto g = build_grid(4, 4);
  const Eigen::MatrixXd D2(build_diff_matrix(g, 2).D);
  const Eigen::MatrixXd D3(build_diff_matrix(g, 3).D);
  // Horizontal rows come first; first row of the first grid row.
  CHECK(D2(0, 0) == 1.0);
  CHECK(D2(0, 1) == -2.0);
  CHECK(D2(0, 2) == 1.0);
  CHECK(D3(0, 0) == 1.0);
  CHECK(D3(0, 1) == -3.0);
  CHECK(D3(0, 2) == 3.0);
  CHECK(D3(0, 3) == -1.0);
  CHECK(D2.rows() == 2 * 4 * 2);
  CHECK(D3.rows() == 2 * 4 * 1);
  // A vertical order-3 row runs down a column.
  const auto d3 = build_diff_matrix(g, 3);
  const auto& st = d3.stencils.back();
  REQUIRE(st.size() == 4);
  CHECK(st[1] - st[0] == 4);
}

TEST_CASE("axis too short for the order") {
  CHECK_THROWS_AS(build_diff_matrix(build_grid(3, 3), 3), InvalidOrderError);
  CHECK_THROWS_AS(build_diff_matrix(build_grid(2, 5), 2), InvalidOrderError);
  CHECK_THROWS_AS(build_diff_matrix(build_grid(4, 4), 4), InvalidOrderError);
  CHECK_NOTHROW(build_diff_matrix(build_grid(3, 3), 2));
}

TEST_CASE("constants are in the null space of every order") {
  for (int order = 1; order <= 3; ++order) {
    const auto g = build_grid(5, 4);
    const auto d = build_diff_matrix(g, order);
    const Eigen::VectorXd r = d.D * Eigen::VectorXd::Ones(g.n());
    CHECK(r.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("D^T D / c is the graph Laplacian / c") {
  for (int nx = 2; nx <= 4; ++nx) {
    for (int ny = 2; ny <= 4; ++ny) {
      const auto g = build_grid(nx, ny);
      const Eigen::MatrixXd D(build_diff_matrix(g, 1).D);
      const double c = 0.37;
      const Eigen::MatrixXd Q = D.transpose() * D / c;
      const Eigen::MatrixXd L = oracle::grid_laplacian(nx, ny) / c;
      CHECK((Q - L).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("order-1 D has rank n - 1") {
  const auto g = build_grid(4, 3);
  const Eigen::MatrixXd D(build_diff_matrix(g, 1).D);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
  CHECK(lu.rank() == g.n() - 1);
}
