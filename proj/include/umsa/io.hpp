#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace umsa {

/// Minimal RFC-4180 reader for numeric tables with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Elliptic data file: index,t,y.
void write_elliptic_data_csv(std::ostream& out, const Eigen::VectorXd& times, const Eigen::VectorXd& y);
Eigen::VectorXd read_elliptic_data_csv(const std::filesystem::path& path);

/// SIR data file: day,y (day counted from t = 0).
void write_sir_data_csv(std::ostream& out, int first_day, const Eigen::VectorXd& y);
Eigen::VectorXd read_sir_data_csv(const std::filesystem::path& path);

}  // namespace umsa
