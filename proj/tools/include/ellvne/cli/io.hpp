#pragma once

/// \file io.hpp
/// Trajectory tables (CSV / JSON) and the operator-file format.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellvne/dynamics.hpp"
#include "ellvne/matrix.hpp"

namespace ellvne::cli {

/// Raised for malformed input files or tables.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Shortest "%.17g" rendering.
std::string format_double(double v);

/// A trajectory flattened into named numeric columns.
struct TrajectoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// t, re_i_j, im_i_j (row-major), trace_re, eig_1..eig_d, residual.
std::vector<std::string> trajectory_columns(std::size_t dim);
/// Residual is NaN where no reference was attached.
TrajectoryTable tabulate(const Trajectory& traj);

void write_csv(std::ostream& os, const TrajectoryTable& table);
TrajectoryTable read_csv(std::istream& is);

/// {"columns": [...], "rows": [[...], ...]} plus any metadata entries.
void write_json(std::ostream& os, const TrajectoryTable& table,
                const std::map<std::string, std::string>& metadata = {});
TrajectoryTable read_json(std::istream& is);

/// Parsed operator file:
///   {"dim": d, "case": 1|2, "omega": w, "k": k, "nu": n,
///    "operators": {"A": {"entries": [[re, im], ...]}, ...}}
/// Role names are A, B, X, theta (Case 1) or A, C, D, theta0, theta (Case 2).
/// An operator may also be given directly as its entries array.
struct OperatorFile {
  std::size_t dim = 0;
  std::optional<int> case_number;
  std::optional<double> omega;
  std::optional<double> k;
  std::optional<double> nu;
  std::map<std::string, ComplexMatrix> operators;

  bool has(const std::string& role) const { return operators.count(role) != 0; }
  /// Throws ParseError when the role is absent.
  const ComplexMatrix& at(const std::string& role) const;
};

/// Throws ParseError on malformed input.
OperatorFile parse_operator_file(std::istream& is);
OperatorFile load_operator_file(const std::string& path);
void write_operator_file(std::ostream& os, const OperatorFile& file);

}  // namespace ellvne::cli
