#include "umsa/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "umsa/errors.hpp"

namespace umsa {

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("csv: cannot parse '" + s + "' in column " + what);
  }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv: missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty input");
  table.header = split_record(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto rec = split_record(line);
    if (rec.size() != table.header.size()) throw ConfigError("csv: ragged row '" + line + "'");
    table.rows.push_back(std::move(rec));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open " + path.string());
  return read_csv(in);
}

void write_elliptic_data_csv(std::ostream& out, const Eigen::VectorXd& times, const Eigen::VectorXd& y) {
  out << "index,t,y\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < y.size(); ++j) out << j + 1 << ',' << times(j) << ',' << y(j) << '\n';
}

Eigen::VectorXd read_elliptic_data_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv_file(path);
  if (t.header != std::vector<std::string>{"index", "t", "y"}) throw ConfigError("elliptic data: expected header index,t,y");
  Eigen::VectorXd y(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = to_double(t.rows[i][2], "y");
  return y;
}

void write_sir_data_csv(std::ostream& out, int first_day, const Eigen::VectorXd& y) {
  out << "day,y\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < y.size(); ++i) out << first_day + i << ',' << y(i) << '\n';
}

Eigen::VectorXd read_sir_data_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv_file(path);
  if (t.header != std::vector<std::string>{"day", "y"}) throw ConfigError("sir data: expected header day,y");
  Eigen::VectorXd y(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = to_double(t.rows[i][1], "y");
  return y;
}

}  // namespace umsa
