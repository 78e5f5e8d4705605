#include "ract/csv_io.hpp"

#include "ract/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ract {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

double parse_number(const std::string& cell, long line, long column) {
  if (cell.empty()) throw ParseError("missing value", line, column);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric value '" + cell + "'", line, column);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + cell + "'", line, column);
  return value;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw ParseError("unknown column '" + name + "'", 1, 1);
  return static_cast<std::size_t>(it - table.header.begin());
}

std::vector<std::string> feature_columns(const CsvTable& table,
                                         const std::vector<std::string>& excluded) {
  std::vector<std::string> out;
  for (const auto& h : table.header) {
    if (std::find(excluded.begin(), excluded.end(), h) == excluded.end()) out.push_back(h);
  }
  return out;
}

std::optional<CovariateMatrix> covariates_from(const CsvTable& table,
                                               const std::vector<std::string>& columns,
                                               const std::vector<std::size_t>& rows,
                                               bool add_intercept) {
  if (columns.empty()) return std::nullopt;
  const Eigen::MatrixXd all = numeric_columns(table, columns);
  const Eigen::Index q = static_cast<Eigen::Index>(columns.size()) + (add_intercept ? 1 : 0);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), q);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index c = 0;
    if (add_intercept) design(r, c++) = 1.0;
    design.row(r).tail(all.cols()) = all.row(static_cast<Eigen::Index>(rows[i]));
  }
  return CovariateMatrix(design);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw ParseError("empty header name", line_no, static_cast<long>(c + 1));
        }
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no, static_cast<long>(std::min(cells.size(), table.header.size()) + 1));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw ParseError("missing value", line_no, static_cast<long>(c + 1));
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError("missing header row", 1, 1);
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  return parse_csv(in);
}

Eigen::MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  if (columns.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) idx.push_back(c);
  } else {
    for (const auto& name : columns) idx.push_back(column_index(table, name));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          parse_number(table.rows[r][idx[j]], table.line_numbers[r], static_cast<long>(idx[j] + 1));
    }
  }
  return out;
}

LoadedData load_two_files(const std::string& path1, const std::string& path2,
                          const std::vector<std::string>& covariate_columns, bool add_intercept) {
  const CsvTable t1 = read_csv_file(path1);
  const CsvTable t2 = read_csv_file(path2);
  const auto features = feature_columns(t1, covariate_columns);
  if (feature_columns(t2, covariate_columns) != features) {
    throw ParseError("feature columns of '" + path2 + "' differ from '" + path1 + "'", 1, 1);
  }
  std::vector<std::size_t> rows1(t1.rows.size()), rows2(t2.rows.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) rows1[i] = i;
  for (std::size_t i = 0; i < rows2.size(); ++i) rows2[i] = i;
  return LoadedData{
      TwoSampleDataset(numeric_columns(t1, features), numeric_columns(t2, features), features),
      covariates_from(t1, covariate_columns, rows1, add_intercept),
      covariates_from(t2, covariate_columns, rows2, add_intercept), path1, path2};
}

LoadedData load_labeled_table(const CsvTable& table, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns,
                              bool add_intercept) {
  const std::size_t gcol = column_index(table, group_column);
  std::vector<std::string> labels;
  std::vector<std::size_t> rows1, rows2;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& label = table.rows[r][gcol];
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
      if (labels.size() == 2) {
        throw ParseError("group column '" + group_column + "' has more than two labels",
                         table.line_numbers[r], static_cast<long>(gcol + 1));
      }
      labels.push_back(label);
    }
    (label == labels[0] ? rows1 : rows2).push_back(r);
  }
  if (labels.size() != 2) {
    throw ParseError("group column '" + group_column + "' must hold exactly two labels", 1,
                     static_cast<long>(gcol + 1));
  }
  auto excluded = covariate_columns;
  excluded.push_back(group_column);
  const auto features = feature_columns(table, excluded);
  const Eigen::MatrixXd all = numeric_columns(table, features);
  auto select = [&](const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), all.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = all.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
  };
  return LoadedData{TwoSampleDataset(select(rows1), select(rows2), features),
                    covariates_from(table, covariate_columns, rows1, add_intercept),
                    covariates_from(table, covariate_columns, rows2, add_intercept), labels[0],
                    labels[1]};
}

LoadedData load_labeled_file(const std::string& path, const std::string& group_column,
                             const std::vector<std::string>& covariate_columns,
                             bool add_intercept) {
  return load_labeled_table(read_csv_file(path), group_column, covariate_columns, add_intercept);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

}  // namespace ract
