#pragma once

#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace hsmooth {

using Index = std::int64_t;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct Edge {
  Index i;
  Index j;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Regular nx-by-ny grid with its nearest-neighbour pairs.
///
/// Cells are flattened row-major: flat = row * nx + col, with `row` in
/// [0, ny) and `col` in [0, nx). Edges list every horizontally adjacent pair
/// (row-major scan) followed by every vertically adjacent pair. Each edge has
/// i < j.
struct GridGraph {
  Index nx = 0;
  Index ny = 0;
  std::vector<Edge> edges;

  Index n() const { return nx * ny; }
  Index m() const { return static_cast<Index>(edges.size()); }

  Index flat(Index row, Index col) const { return row * nx + col; }
  std::pair<Index, Index> cell(Index k) const { return {k / nx, k % nx}; }

  /// Flat index of the centre cell, (ny / 2, nx / 2).
  Index center() const { return flat(ny / 2, nx / 2); }

  /// Cell coordinates rescaled to the unit square: x = col / (nx - 1),
  /// y = row / (ny - 1).
  std::array<double, 2> unit_coords(Index k) const;
};

GridGraph build_grid(Index nx, Index ny);

/// Sparse k-th order differencing operator.
///
/// Order 1 has one row per grid edge (row v: +1 at edges[v].i, -1 at
/// edges[v].j). Orders 2 and 3 apply the binomial stencils (1,-2,1) and
/// (1,-3,3,-1) along every row of the grid and then along every column; the
/// rows are stacked horizontal-first. stencils[v] lists the cells touched by
/// row v in stencil order.
struct DiffMatrix {
  int order = 1;
  SparseMatrix D;
  std::vector<std::vector<Index>> stencils;

  Index rows() const { return D.rows(); }
};

DiffMatrix build_diff_matrix(const GridGraph& grid, int order);

}  // namespace hsmooth
