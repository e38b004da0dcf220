#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "infokm/bounds.hpp"
#include "infokm/core.hpp"

namespace ikm {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All floating-point output carries 17 significant digits so emitted
/// files are byte-stable and round-trip exactly.
std::string fmt17(double v);

/// JSON scalar for a double; non-finite values are emitted as the quoted
/// strings "inf", "-inf" and "nan".
std::string json_number(double v);
std::string json_quote(const std::string& s);

// Headerless CSV of doubles, one row per record.
Eigen::MatrixXd load_csv_matrix(const std::string& path);
void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);
std::string csv_matrix_string(const Eigen::MatrixXd& m);

struct SparseTriplet {
  std::int64_t row = 0;
  std::int64_t col = 0;
  double weight = 0.0;
};
/// Sparse histogram rows as `row,col,weight` lines (0-based indices).
std::vector<SparseTriplet> load_csv_triplets(const std::string& path);

/// Dense histogram rows normalized against nu (uniform when absent).
std::vector<Density> densities_from_matrix(const Eigen::MatrixXd& rows,
                                           MeasurePtr nu = nullptr);
std::vector<Density> densities_from_triplets(
    const std::vector<SparseTriplet>& triplets, MeasurePtr nu = nullptr);

std::string bound_report_json(const BoundReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ikm
