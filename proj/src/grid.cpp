#include "hsmooth/grid.hpp"

#include <string>

#include "hsmooth/error.hpp"

namespace hsmooth {

std::array<double, 2> GridGraph::unit_coords(Index k) const {
  const auto [row, col] = cell(k);
  return {static_cast<double>(col) / static_cast<double>(nx - 1),
          static_cast<double>(row) / static_cast<double>(ny - 1)};
}

GridGraph build_grid(Index nx, Index ny) {
  if (nx < 2 || ny < 2) {
    throw InvalidGridError("grid must be at least 2x2, got " +
                           std::to_string(nx) + "x" + std::to_string(ny));
  }
  GridGraph g;
  g.nx = nx;
  g.ny = ny;
  g.edges.reserve(static_cast<std::size_t>(nx * (ny - 1) + ny * (nx - 1)));
  for (Index r = 0; r < ny; ++r) {
    for (Index c = 0; c + 1 < nx; ++c) {
      g.edges.push_back({g.flat(r, c), g.flat(r, c + 1)});
    }
  }
  for (Index r = 0; r + 1 < ny; ++r) {
    for (Index c = 0; c < nx; ++c) {
      g.edges.push_back({g.flat(r, c), g.flat(r + 1, c)});
    }
  }
  return g;
}

namespace {

std::vector<double> binomial_stencil(int order) {
  switch (order) {
    case 1: return {1.0, -1.0};
    case 2: return {1.0, -2.0, 1.0};
    case 3: return {1.0, -3.0, 3.0, -1.0};
    default: break;
  }
  throw InvalidOrderError("differencing order must be 1, 2 or 3, got " +
                          std::to_string(order));
}

}  // namespace

DiffMatrix build_diff_matrix(const GridGraph& grid, int order) {
  const auto coeffs = binomial_stencil(order);
  if (grid.nx < order + 1 || grid.ny < order + 1) {
    throw InvalidOrderError("order " + std::to_string(order) +
                            " needs at least " + std::to_string(order + 1) +
                            " points along each axis");
  }

  DiffMatrix out;
  out.order = order;
  std::vector<Eigen::Triplet<double>> trip;

  auto push_row = [&](std::vector<Index> cells) {
    const auto row = static_cast<Index>(out.stencils.size());
    for (std::size_t s = 0; s < cells.size(); ++s) {
      trip.emplace_back(row, cells[s], coeffs[s]);
    }
    out.stencils.push_back(std::move(cells));
  };

  if (order == 1) {
    for (const auto& e : grid.edges) push_row({e.i, e.j});
  } else {
    for (Index r = 0; r < grid.ny; ++r) {
      for (Index c = 0; c + order < grid.nx; ++c) {
        std::vector<Index> cells;
        for (int s = 0; s <= order; ++s) cells.push_back(grid.flat(r, c + s));
        push_row(std::move(cells));
      }
    }
    for (Index r = 0; r + order < grid.ny; ++r) {
      for (Index c = 0; c < grid.nx; ++c) {
        std::vector<Index> cells;
        for (int s = 0; s <= order; ++s) cells.push_back(grid.flat(r + s, c));
        push_row(std::move(cells));
      }
    }
  }

  out.D.resize(static_cast<Index>(out.stencils.size()), grid.n());
  out.D.setFromTriplets(trip.begin(), trip.end());
  out.D.makeCompressed();
  return out;
}

}  // namespace hsmooth
