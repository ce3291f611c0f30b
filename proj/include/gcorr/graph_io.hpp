#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcorr/graph.hpp"

namespace gcorr {

enum class GraphFileFormat { kEdgeListTsv, kMatrixMarketSymmetric, kDenseCsv };

/// Format is carried by the file extension: .tsv edge list (0-indexed),
/// .mtx Matrix Market coordinate symmetric (1-indexed), .csv dense 0/1.
inline GraphFileFormat format_from_path(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "tsv") return GraphFileFormat::kEdgeListTsv;
  if (ext == "mtx" || ext == "mm") return GraphFileFormat::kMatrixMarketSymmetric;
  if (ext == "csv") return GraphFileFormat::kDenseCsv;
  throw std::invalid_argument(
      "cannot infer graph format from extension of '" + path +
      "' (expected .tsv, .mtx or .csv)");
}

/// Parse result: the graph plus the number of self-loop entries that were
/// dropped (kept as a warning count, not an error).
struct ParsedGraph {
  Graph graph;
  std::size_t self_loops_dropped = 0;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line,
                                    const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline ParsedGraph read_edge_list_tsv(std::istream& in, const std::string& path,
                                      std::size_t declared_n) {
  struct Edge {
    long long u, v;
    std::size_t line;
  };
  std::vector<Edge> edges;
  long long max_id = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream fields(line);
    long long u = -1;
    long long v = -1;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra)) {
      parse_fail(path, line_no, "malformed edge line (expected 'u<TAB>v')");
    }
    if (u < 0 || v < 0) {
      parse_fail(path, line_no, "node ids must be nonnegative");
    }
    max_id = std::max({max_id, u, v});
    edges.push_back(Edge{u, v, line_no});
  }
  std::size_t n = declared_n;
  if (n == 0) {
    if (max_id < 0) {
      throw std::runtime_error(path +
                               ": empty edge list and no node count given");
    }
    n = static_cast<std::size_t>(max_id) + 1;
  }
  ParsedGraph result;
  result.graph.adjacency = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    if (e.u >= static_cast<long long>(n) || e.v >= static_cast<long long>(n)) {
      parse_fail(path, e.line,
                 "node id " + std::to_string(std::max(e.u, e.v)) +
                     " out of range for n=" + std::to_string(n));
    }
    if (e.u == e.v) {
      ++result.self_loops_dropped;
      continue;
    }
    result.graph.adjacency(e.u, e.v) = 1.0;
    result.graph.adjacency(e.v, e.u) = 1.0;
  }
  return result;
}

inline ParsedGraph read_matrix_market(std::istream& in, const std::string& path,
                                      std::size_t declared_n) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file");
  }
  ++line_no;
  {
    std::istringstream header(line);
    std::string banner, object, storage, field, symmetry;
    header >> banner >> object >> storage >> field >> symmetry;
    const bool field_ok =
        field == "pattern" || field == "integer" || field == "real";
    if (banner != "%%MatrixMarket" || object != "matrix" ||
        storage != "coordinate" || !field_ok || symmetry != "symmetric") {
      parse_fail(path, line_no,
                 "unsupported header (need '%%MatrixMarket matrix coordinate "
                 "pattern|integer|real symmetric')");
    }
  }
  const bool has_values = line.find("pattern") == std::string::npos;

  // skip comment lines, then the size line
  long long rows = 0, cols = 0, entries = 0;
  while (true) {
    if (!std::getline(in, line)) {
      throw std::runtime_error(path + ": missing size line");
    }
    ++line_no;
    if (!line.empty() && line[0] == '%') continue;
    if (blank_or_comment(line)) continue;
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> entries) || rows < 1 || cols < 1 ||
        entries < 0) {
      parse_fail(path, line_no, "malformed size line");
    }
    break;
  }
  if (rows != cols) {
    parse_fail(path, line_no, "matrix must be square");
  }
  const std::size_t n = static_cast<std::size_t>(rows);
  if (declared_n != 0 && declared_n != n) {
    parse_fail(path, line_no,
               "declared node count " + std::to_string(declared_n) +
                   " disagrees with header n=" + std::to_string(n));
  }
  ParsedGraph result;
  result.graph.adjacency = Eigen::MatrixXd::Zero(rows, rows);
  long long seen = 0;
  while (seen < entries) {
    if (!std::getline(in, line)) {
      throw std::runtime_error(path + ": expected " + std::to_string(entries) +
                               " entries, found " + std::to_string(seen));
    }
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double value = 1.0;
    if (!(entry >> i >> j) || (has_values && !(entry >> value))) {
      parse_fail(path, line_no, "malformed entry line");
    }
    if (i < 1 || j < 1 || i > rows || j > rows) {
      parse_fail(path, line_no, "index out of range (1-indexed)");
    }
    ++seen;
    if (value == 0.0) continue;
    if (i == j) {
      ++result.self_loops_dropped;
      continue;
    }
    result.graph.adjacency(i - 1, j - 1) = 1.0;
    result.graph.adjacency(j - 1, i - 1) = 1.0;
  }
  return result;
}

inline ParsedGraph read_dense_csv(std::istream& in, const std::string& path,
                                  std::size_t declared_n) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &pos);
      } catch (const std::exception&) {
        parse_fail(path, line_no, "malformed cell '" + cell + "'");
      }
      while (pos < cell.size() &&
             std::isspace(static_cast<unsigned char>(cell[pos]))) {
        ++pos;
      }
      if (pos != cell.size()) {
        parse_fail(path, line_no, "malformed cell '" + cell + "'");
      }
      if (value != 0.0 && value != 1.0) {
        parse_fail(path, line_no, "entries must be 0 or 1");
      }
      row.push_back(value);
    }
    if (row.empty()) parse_fail(path, line_no, "empty row");
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_fail(path, line_no, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  if (rows.size() != n || n == 0) {
    throw std::runtime_error(path + ": expected a square 0/1 matrix, got " +
                             std::to_string(rows.size()) + "x" +
                             std::to_string(n));
  }
  if (declared_n != 0 && declared_n != n) {
    throw std::runtime_error(path + ": declared node count " +
                             std::to_string(declared_n) +
                             " disagrees with matrix order " +
                             std::to_string(n));
  }
  ParsedGraph result;
  result.graph.adjacency = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      result.graph.adjacency(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (result.graph.adjacency(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(i)) != 0.0) {
      ++result.self_loops_dropped;
      result.graph.adjacency(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(i)) = 0.0;
    }
  }
  if (!result.graph.adjacency.isApprox(result.graph.adjacency.transpose())) {
    throw std::runtime_error(path + ": adjacency matrix is not symmetric");
  }
  return result;
}

}  // namespace detail

/// Reads a graph file; format comes from the extension. declared_n = 0
/// means "infer" (TSV: max id + 1; the other formats carry their own order).
inline ParsedGraph read_graph(const std::string& path,
                              std::size_t declared_n = 0) {
  const GraphFileFormat format = format_from_path(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  switch (format) {
    case GraphFileFormat::kEdgeListTsv:
      return detail::read_edge_list_tsv(in, path, declared_n);
    case GraphFileFormat::kMatrixMarketSymmetric:
      return detail::read_matrix_market(in, path, declared_n);
    case GraphFileFormat::kDenseCsv:
      return detail::read_dense_csv(in, path, declared_n);
  }
  throw std::invalid_argument("read_graph: unknown format");
}

/// Writes a graph in the format implied by the path's extension. Round-trips
/// with read_graph bit-exactly for every format.
inline void write_graph(const Graph& g, const std::string& path) {
  const GraphFileFormat format = format_from_path(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const Eigen::Index n = g.adjacency.rows();
  switch (format) {
    case GraphFileFormat::kEdgeListTsv: {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          if (g.adjacency(i, j) != 0.0) out << i << '\t' << j << '\n';
        }
      }
      break;
    }
    case GraphFileFormat::kMatrixMarketSymmetric: {
      out << "%%MatrixMarket matrix coordinate pattern symmetric\n";
      std::ostringstream body;
      std::size_t entries = 0;
      // lower triangle, 1-indexed, per the symmetric coordinate convention
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          if (g.adjacency(i, j) != 0.0) {
            body << (j + 1) << ' ' << (i + 1) << '\n';
            ++entries;
          }
        }
      }
      out << n << ' ' << n << ' ' << entries << '\n' << body.str();
      break;
    }
    case GraphFileFormat::kDenseCsv: {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j > 0) out << ',';
          out << (g.adjacency(i, j) != 0.0 ? 1 : 0);
        }
        out << '\n';
      }
      break;
    }
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace gcorr
