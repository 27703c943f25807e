#include "ellvne/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace ellvne::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trajectory_columns(std::size_t dim) {
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const std::string idx = std::to_string(i + 1) + "_" + std::to_string(j + 1);
      cols.push_back("re_" + idx);
      cols.push_back("im_" + idx);
    }
  }
  cols.emplace_back("trace_re");
  for (std::size_t i = 0; i < dim; ++i) cols.push_back("eig_" + std::to_string(i + 1));
  cols.emplace_back("residual");
  return cols;
}

TrajectoryTable tabulate(const Trajectory& traj) {
  TrajectoryTable table;
  const std::size_t d = traj.states.empty() ? 0 : traj.states.front().rows();
  table.columns = trajectory_columns(d);
  table.rows.reserve(traj.states.size());
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(traj.times[n]);
    for (const Complex z : traj.states[n].data()) {
      row.push_back(z.real());
      row.push_back(z.imag());
    }
    const auto& diag = traj.diagnostics[n];
    row.push_back(diag.trace.real());
    row.insert(row.end(), diag.spectrum.begin(), diag.spectrum.end());
    row.push_back(diag.residual.value_or(std::numeric_limits<double>::quiet_NaN()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(std::ostream& os, const TrajectoryTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
}

namespace {

double parse_number(const std::string& cell) {
  if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw ParseError("trailing characters in '" + cell + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

TrajectoryTable read_csv(std::istream& is) {
  TrajectoryTable table;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty CSV input");
  table.columns = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != table.columns.size()) throw ParseError("CSV row width differs from header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_json(std::ostream& os, const TrajectoryTable& table, const std::map<std::string, std::string>& metadata) {
  // Numbers go through format_double so CSV and JSON carry identical digits;
  // NaN becomes null.
  os << "{\n";
  for (const auto& [key, value] : metadata) os << "  " << json(key).dump() << ": " << json(value).dump() << ",\n";
  os << "  \"columns\": " << json(table.columns).dump() << ",\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << (r ? ",\n    [" : "\n    [");
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      const double v = table.rows[r][c];
      os << (c ? "," : "") << (std::isfinite(v) ? format_double(v) : std::string("null"));
    }
    os << ']';
  }
  os << "\n  ]\n}\n";
}

TrajectoryTable read_json(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  TrajectoryTable table;
  try {
    table.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      std::vector<double> values;
      for (const auto& v : row) {
        values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
      }
      if (values.size() != table.columns.size()) throw ParseError("JSON row width differs from columns");
      table.rows.push_back(std::move(values));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed trajectory JSON: ") + e.what());
  }
  return table;
}

const ComplexMatrix& OperatorFile::at(const std::string& role) const {
  auto it = operators.find(role);
  if (it == operators.end()) throw ParseError("operator file lacks role '" + role + "'");
  return it->second;
}

namespace {

ComplexMatrix parse_entries(const json& entries, std::size_t dim, const std::string& role) {
  if (!entries.is_array() || entries.size() != dim * dim) {
    throw ParseError("operator '" + role + "' needs " + std::to_string(dim * dim) + " entries");
  }
  ComplexMatrix m(dim);
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const json& e = entries[n];
    double re = 0.0;
    double im = 0.0;
    if (e.is_number()) {
      re = e.get<double>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      re = e[0].get<double>();
      im = e[1].get<double>();
    } else {
      throw ParseError("operator '" + role + "' entry " + std::to_string(n) + " is not [re, im]");
    }
    m(n / dim, n % dim) = Complex(re, im);
  }
  return m;
}

}  // namespace

OperatorFile parse_operator_file(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("operator file must be a JSON object");
  OperatorFile f;
  try {
    const auto dim = j.at("dim").get<long long>();
    if (dim < 1 || dim > 64) throw ParseError("dim must lie in [1, 64]");
    f.dim = static_cast<std::size_t>(dim);
    if (j.contains("case")) f.case_number = j["case"].get<int>();
    if (j.contains("omega")) f.omega = j["omega"].get<double>();
    if (j.contains("k")) f.k = j["k"].get<double>();
    if (j.contains("nu")) f.nu = j["nu"].get<double>();
    const json& ops = j.at("operators");
    if (!ops.is_object()) throw ParseError("'operators' must be an object");
    for (const auto& [role, value] : ops.items()) {
      const json& entries = value.is_object() ? value.at("entries") : value;
      f.operators.emplace(role, parse_entries(entries, f.dim, role));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed operator file: ") + e.what());
  }
  if (f.case_number && *f.case_number != 1 && *f.case_number != 2) throw ParseError("case must be 1 or 2");
  return f;
}

OperatorFile load_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open operator file '" + path + "'");
  return parse_operator_file(in);
}

void write_operator_file(std::ostream& os, const OperatorFile& file) {
  json j;
  j["dim"] = file.dim;
  if (file.case_number) j["case"] = *file.case_number;
  if (file.omega) j["omega"] = *file.omega;
  if (file.k) j["k"] = *file.k;
  if (file.nu) j["nu"] = *file.nu;
  json ops = json::object();
  for (const auto& [role, m] : file.operators) {
    json entries = json::array();
    for (const Complex z : m.data()) entries.push_back({z.real(), z.imag()});
    ops[role] = {{"entries", entries}};
  }
  j["operators"] = ops;
  os << j.dump(2) << '\n';
}

}  // namespace ellvne::cli
