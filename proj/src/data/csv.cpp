#include "icemest/data/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "icemest/errors.hpp"
#include "icemest/util/stats.hpp"

namespace icemest::data {

namespace {

std::vector<std::string> split_csv_line(const std::string& line,
                                        std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError(row, "", "unterminated quote");
  fields.push_back(cur);
  return fields;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// "A3" -> 3; empty return means no match.
bool indexed_name(const std::string& name, char prefix, int& index) {
  if (name.size() < 2 || name[0] != prefix) return false;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  }
  index = std::atoi(name.c_str() + 1);
  return true;
}

// "L2_age" -> (2, "age").
bool covariate_name(const std::string& name, int& time, std::string& base) {
  if (name.size() < 4 || name[0] != 'L') return false;
  std::size_t i = 1;
  while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) {
    ++i;
  }
  if (i == 1 || i >= name.size() || name[i] != '_' || i + 1 >= name.size()) {
    return false;
  }
  time = std::atoi(name.substr(1, i - 1).c_str());
  base = name.substr(i + 1);
  return true;
}

double parse_cell(const std::string& raw, std::size_t row,
                  const std::string& column) {
  const std::string s = strip(raw);
  if (s.empty()) return kMissing;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) {
    throw ParseError(row, column, "not a number: '" + s + "'");
  }
  return v;
}

struct ColumnRole {
  enum Kind { treatment, censoring, outcome, covariate } kind;
  int time;
  std::string name;  // covariates only
};

}  // namespace

LongitudinalDataset load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "", "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto headers = split_csv_line(line, 0);
  std::vector<ColumnRole> roles;
  int max_outcome = 0;
  for (const auto& raw : headers) {
    const std::string h = strip(raw);
    int idx = 0;
    std::string base;
    if (indexed_name(h, 'A', idx)) {
      roles.push_back({ColumnRole::treatment, idx, {}});
    } else if (indexed_name(h, 'C', idx)) {
      roles.push_back({ColumnRole::censoring, idx, {}});
    } else if (indexed_name(h, 'Y', idx)) {
      roles.push_back({ColumnRole::outcome, idx, {}});
      max_outcome = std::max(max_outcome, idx);
    } else if (covariate_name(h, idx, base)) {
      roles.push_back({ColumnRole::covariate, idx, base});
    } else {
      throw ParseError(0, h, "unrecognized column name");
    }
  }
  if (max_outcome < 1) throw MissingColumn("Y1");
  const int tau = max_outcome;

  // Collect raw columns.
  std::vector<std::vector<double>> cells(roles.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(line, row);
    if (fields.size() != roles.size()) {
      throw ParseError(row, "", "expected " + std::to_string(roles.size()) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < roles.size(); ++j) {
      const double v = parse_cell(fields[j], row, strip(headers[j]));
      const auto& role = roles[j];
      if ((role.kind == ColumnRole::treatment ||
           role.kind == ColumnRole::censoring) &&
          !is_missing(v) && v != 0.0 && v != 1.0) {
        throw ParseError(row, strip(headers[j]), "value must be 0 or 1");
      }
      cells[j].push_back(v);
    }
  }

  LongitudinalDataset data(row, tau);
  std::vector<bool> saw_a(static_cast<std::size_t>(tau), false);
  std::vector<bool> saw_c(static_cast<std::size_t>(tau), false);
  std::vector<bool> saw_y(static_cast<std::size_t>(tau), false);
  for (std::size_t j = 0; j < roles.size(); ++j) {
    const auto& role = roles[j];
    const std::string h = strip(headers[j]);
    switch (role.kind) {
      case ColumnRole::treatment:
        if (role.time > tau - 1) throw ParseError(0, h, "time out of range");
        saw_a[static_cast<std::size_t>(role.time)] = true;
        data.set_treatment(role.time, std::move(cells[j]));
        break;
      case ColumnRole::censoring:
        if (role.time < 1 || role.time > tau) {
          throw ParseError(0, h, "time out of range");
        }
        saw_c[static_cast<std::size_t>(role.time - 1)] = true;
        data.set_censoring(role.time, std::move(cells[j]));
        break;
      case ColumnRole::outcome:
        saw_y[static_cast<std::size_t>(role.time - 1)] = true;
        data.set_outcome(role.time, std::move(cells[j]));
        break;
      case ColumnRole::covariate:
        if (role.time > tau - 1) throw ParseError(0, h, "time out of range");
        data.add_covariate(role.time, role.name, std::move(cells[j]));
        break;
    }
  }
  for (int k = 0; k < tau; ++k) {
    if (!saw_a[static_cast<std::size_t>(k)]) {
      throw MissingColumn("A" + std::to_string(k));
    }
    if (!saw_c[static_cast<std::size_t>(k)]) {
      throw MissingColumn("C" + std::to_string(k + 1));
    }
    if (!saw_y[static_cast<std::size_t>(k)]) {
      throw MissingColumn("Y" + std::to_string(k + 1));
    }
  }

  data.validate();
  return data;
}

LongitudinalDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv file: " + path);
  return load_csv(in);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell(double v) {
  return is_missing(v) ? std::string{} : util::format_double(v);
}

}  // namespace

void save_csv(const LongitudinalDataset& data, std::ostream& out) {
  const int tau = data.horizon();
  // Header in time order: L0_*, A0, then C_k, Y_k, L_k_*, A_k per period.
  std::vector<std::string> header;
  std::vector<const std::vector<double>*> cols;
  auto push = [&](std::string name, const std::vector<double>& values) {
    header.push_back(std::move(name));
    cols.push_back(&values);
  };
  for (int k = 0; k < tau; ++k) {
    if (k > 0) {
      push("C" + std::to_string(k), data.censoring(k));
      push("Y" + std::to_string(k), data.outcome(k));
    }
    for (const auto& name : data.covariate_names(k)) {
      push("L" + std::to_string(k) + "_" + name, data.covariate(k, name));
    }
    push("A" + std::to_string(k), data.treatment(k));
  }
  push("C" + std::to_string(tau), data.censoring(tau));
  push("Y" + std::to_string(tau), data.outcome(tau));

  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << csv_escape(header[j]);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.units(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << ',';
      out << cell((*cols[j])[i]);
    }
    out << '\n';
  }
}

void save_csv(const LongitudinalDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open csv file for writing: " + path);
  save_csv(data, out);
  out.flush();
  if (!out) throw ConfigError("failed writing csv file: " + path);
}

}  // namespace icemest::data
