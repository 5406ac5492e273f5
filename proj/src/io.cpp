#include "hsmooth/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hsmooth/error.hpp"

namespace hsmooth {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long parse_index(const std::string& s, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) {
    throw IngestError("expected an integer, got '" + s + "' at " + where);
  }
  return v;
}

double parse_value(const std::string& s, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno == ERANGE) {
    throw IngestError("expected a number, got '" + s + "' at " + where);
  }
  return v;
}

void write_meta(std::ofstream& f, const Metadata& meta) {
  for (const auto& [k, v] : meta) f << "# " << k << '=' << v << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

}  // namespace

GridData ingest_grid(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IngestError("cannot open " + path);

  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    header = split(t);
    break;
  }
  const bool ensemble =
      header == std::vector<std::string>{"row", "col", "member", "value"};
  if (!ensemble && header != std::vector<std::string>{"row", "col", "value"}) {
    throw IngestError(path +
                      ": header must be 'row,col,value' or 'row,col,member,value'");
  }

  // member -> (row, col) -> value
  std::map<long, std::map<std::pair<long, long>, double>> cells;
  long max_row = -1;
  long max_col = -1;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw IngestError("wrong number of fields at " + where);
    }
    const long r = parse_index(fields[0], where);
    const long c = parse_index(fields[1], where);
    const long mem = ensemble ? parse_index(fields[2], where) : 0;
    const double v = parse_value(fields.back(), where);
    if (r < 0 || c < 0) throw IngestError("negative index at " + where);
    if (!cells[mem].emplace(std::make_pair(r, c), v).second) {
      throw IngestError("duplicate cell (" + std::to_string(r) + "," +
                        std::to_string(c) + ") at " + where);
    }
    max_row = std::max(max_row, r);
    max_col = std::max(max_col, c);
  }
  if (cells.empty()) throw IngestError(path + ": no data rows");

  GridData g;
  g.nx = max_col + 1;
  g.ny = max_row + 1;
  const std::size_t full = static_cast<std::size_t>(g.nx * g.ny);

  // Cells present in at least one member; a cell absent everywhere is a gap.
  std::set<std::pair<long, long>> seen;
  for (const auto& [mem, m] : cells) {
    for (const auto& [rc, v] : m) seen.insert(rc);
  }
  if (seen.size() != full) {
    std::string gaps;
    std::size_t listed = 0;
    std::size_t missing = 0;
    for (long r = 0; r <= max_row; ++r) {
      for (long c = 0; c <= max_col; ++c) {
        if (seen.count({r, c})) continue;
        ++missing;
        if (listed < 20) {
          gaps += (listed ? " " : "") + std::string("(") + std::to_string(r) +
                  "," + std::to_string(c) + ")";
          ++listed;
        }
      }
    }
    if (missing > listed) gaps += " ...";
    throw IngestError(path + ": " + std::to_string(missing) +
                      " missing cell(s): " + gaps);
  }
  for (const auto& [mem, m] : cells) {
    if (m.size() != full) {
      throw DimensionError(path + ": ensemble member " + std::to_string(mem) +
                           " has " + std::to_string(m.size()) + " cells, expected " +
                           std::to_string(full));
    }
    Eigen::VectorXd v(static_cast<Index>(full));
    for (const auto& [rc, val] : m) v[rc.first * g.nx + rc.second] = val;
    g.members.push_back(std::move(v));
    if (ensemble) g.member_ids.push_back(mem);
  }
  return g;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_grid_csv(const std::string& path, Index nx, Index ny,
                    const std::vector<Eigen::VectorXd>& fields,
                    const Metadata& meta, const std::vector<long>& member_ids) {
  if (fields.empty()) throw DimensionError("no fields to write");
  for (const auto& x : fields) {
    if (x.size() != nx * ny) throw DimensionError("field does not match grid");
  }
  if (!member_ids.empty() && member_ids.size() != fields.size()) {
    throw DimensionError("member id count does not match field count");
  }
  const bool ensemble = fields.size() > 1 || !member_ids.empty();
  auto f = open_out(path);
  write_meta(f, meta);
  f << (ensemble ? "row,col,member,value\n" : "row,col,value\n");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const long id = member_ids.empty() ? static_cast<long>(i) : member_ids[i];
    for (Index r = 0; r < ny; ++r) {
      for (Index c = 0; c < nx; ++c) {
        f << r << ',' << c << ',';
        if (ensemble) f << id << ',';
        f << format_double(fields[i][r * nx + c]) << '\n';
      }
    }
  }
  if (!f) throw ConfigError("write failed for " + path);
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const Metadata& meta) {
  auto f = open_out(path);
  write_meta(f, meta);
  for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << row[k];
    f << '\n';
  }
  if (!f) throw ConfigError("write failed for " + path);
}

}  // namespace hsmooth
