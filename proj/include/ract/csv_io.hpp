#pragma once

// CSV ingestion for two-group data. Header row required, comma separated,
// UTF-8, no missing values.

#include "ract/data_model.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ract {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // raw cells, one vector per data line
  std::vector<long> line_numbers;              // 1-based source line of each row
};

/// Throws ParseError on ragged rows, empty cells or a missing header.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Converts the named columns (all columns when empty) to a numeric matrix.
Eigen::MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& columns);

struct LoadedData {
  TwoSampleDataset dataset;
  std::optional<CovariateMatrix> covariates1;
  std::optional<CovariateMatrix> covariates2;
  std::string group1_label;
  std::string group2_label;
};

/// One file per group. Feature columns are every column not listed in
/// `covariate_columns`.
LoadedData load_two_files(const std::string& path1, const std::string& path2,
                          const std::vector<std::string>& covariate_columns = {},
                          bool add_intercept = true);

/// One file with a group-label column holding exactly two distinct labels;
/// the first label encountered becomes group 1.
LoadedData load_labeled_file(const std::string& path, const std::string& group_column,
                             const std::vector<std::string>& covariate_columns = {},
                             bool add_intercept = true);

LoadedData load_labeled_table(const CsvTable& table, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns,
                              bool add_intercept);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header);

}  // namespace ract
