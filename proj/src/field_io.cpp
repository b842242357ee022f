#include "sks/field_space.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sks {

std::string field_to_csv(const Field& f) {
  std::string out = "x,value\n";
  char line[96];
  for (int j = 0; j < f.size(); ++j) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", f.grid().node(j), f[j]);
    out += line;
  }
  return out;
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << field_to_csv(f);
}

Field read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line != "x,value") {
    throw std::runtime_error(path + ": expected header 'x,value'");
  }
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    }
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (values.size() < 5) {
    throw std::runtime_error(path + ": too few rows for a grid");
  }
  GridSpec grid(static_cast<int>(values.size()) - 1);
  return Field(grid, Eigen::Map<const Eigen::VectorXd>(
                         values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace sks
