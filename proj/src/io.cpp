#include "infokm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ikm {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return fmt17(v);
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\r')) {
          ++used;
        }
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw io_error("bad number '" + cell + "' at " + path + ":" +
                       std::to_string(lineno));
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw io_error("ragged row at " + path + ":" + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error("empty input: " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string csv_matrix_string(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt17(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  write_text_file(path, csv_matrix_string(m));
}

std::vector<SparseTriplet> load_csv_triplets(const std::string& path) {
  const Eigen::MatrixXd m = load_csv_matrix(path);
  if (m.cols() != 3) {
    throw io_error("sparse input must have rows of `row,col,weight`: " + path);
  }
  std::vector<SparseTriplet> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    SparseTriplet t;
    t.row = static_cast<std::int64_t>(m(i, 0));
    t.col = static_cast<std::int64_t>(m(i, 1));
    t.weight = m(i, 2);
    if (t.row < 0 || t.col < 0 ||
        static_cast<double>(t.row) != m(i, 0) ||
        static_cast<double>(t.col) != m(i, 1)) {
      throw io_error("sparse indices must be nonnegative integers: " + path);
    }
    out.push_back(t);
  }
  return out;
}

std::vector<Density> densities_from_matrix(const Eigen::MatrixXd& rows,
                                           MeasurePtr nu) {
  if (!nu) nu = ReferenceMeasure::uniform(rows.cols());
  if (nu->size() != rows.cols()) {
    throw invalid_input("histograms: row width does not match the reference measure");
  }
  std::vector<Density> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.push_back(make_density(rows.row(i).array().transpose(), nu));
  }
  return out;
}

std::vector<Density> densities_from_triplets(
    const std::vector<SparseTriplet>& triplets, MeasurePtr nu) {
  if (triplets.empty()) throw invalid_input("histograms: empty sparse input");
  std::int64_t max_row = 0, max_col = 0;
  for (const auto& t : triplets) {
    max_row = std::max(max_row, t.row);
    max_col = std::max(max_col, t.col);
  }
  if (!nu) nu = ReferenceMeasure::uniform(max_col + 1);
  if (nu->size() < max_col + 1) {
    throw invalid_input("histograms: sparse column exceeds the reference measure");
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(max_row + 1, nu->size());
  for (const auto& t : triplets) dense(t.row, t.col) += t.weight;
  return densities_from_matrix(dense, std::move(nu));
}

namespace {

void append_terms(std::string& out, const char* key,
                  const std::vector<BoundTerm>& terms, bool as_object) {
  out += json_quote(key);
  out += ':';
  out += as_object ? '{' : '[';
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ',';
    if (as_object) {
      out += json_quote(terms[i].label) + ":" + json_number(terms[i].value);
    } else {
      out += "{" + json_quote("label") + ":" + json_quote(terms[i].label) +
             "," + json_quote("value") + ":" + json_number(terms[i].value) +
             "}";
    }
  }
  out += as_object ? '}' : ']';
}

}  // namespace

std::string bound_report_json(const BoundReport& report) {
  const char* mode = report.mode == DeviationMode::uniform    ? "uniform"
                     : report.mode == DeviationMode::excess   ? "excess"
                                                              : "expectation";
  std::string out = "{";
  out += json_quote("kind") + ":" + json_quote(report.kind) + ",";
  out += json_quote("mode") + ":" + json_quote(mode) + ",";
  append_terms(out, "inputs", report.inputs, true);
  out += ',';
  append_terms(out, "terms", report.terms, false);
  if (!report.extras.empty()) {
    out += ',';
    append_terms(out, "extras", report.extras, true);
  }
  out += ',';
  out += json_quote("total") + ":" + json_number(report.total);
  out += '}';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write file: " + path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace ikm
