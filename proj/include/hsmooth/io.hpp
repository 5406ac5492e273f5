#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "hsmooth/grid.hpp"

namespace hsmooth {

/// One or more fields on a common nx-by-ny grid, flattened row-major.
struct GridData {
  Index nx = 0;
  Index ny = 0;
  std::vector<long> member_ids;  // empty for single-field files
  std::vector<Eigen::VectorXd> members;
};

/// Reads `row,col,value` or `row,col,member,value` CSV (0-based indices,
/// lines starting with '#' ignored). Grid size is inferred from the largest
/// row and column. Missing cells raise IngestError listing them; ensemble
/// members covering different cells raise DimensionError.
GridData ingest_grid(const std::string& path);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest text that parses back to the same double ("%.17g").
std::string format_double(double v);

/// Writes fields as `row,col,value` (one field) or `row,col,member,value`,
/// preceded by `# key=value` metadata lines.
void write_grid_csv(const std::string& path, Index nx, Index ny,
                    const std::vector<Eigen::VectorXd>& fields,
                    const Metadata& meta = {},
                    const std::vector<long>& member_ids = {});

/// Writes a plain table: metadata lines, a header and pre-formatted rows.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const Metadata& meta = {});

}  // namespace hsmooth
