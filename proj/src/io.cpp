#include "entwit/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace entwit {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string state_to_json_text(const DensityMatrix& rho) {
  nlohmann::ordered_json j;
  j["schema"] = kStateSchema;
  const BipartiteDims dims = rho.dims().value_or(BipartiteDims(2, 2));
  if (!rho.dims().has_value()) {
    throw std::invalid_argument("state_to_json_text: state needs bipartite dims");
  }
  j["d_a"] = dims.d_a;
  j["d_b"] = dims.d_b;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const ComplexMatrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back({{"re", m(i, k).real()}, {"im", m(i, k).imag()}});
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j.dump(2) + "\n";
}

DensityMatrix parse_state_json(const std::string& text, const std::string& context) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(context + ": " + e.what());
  }
  try {
    const int d_a = j.at("d_a").get<int>();
    const int d_b = j.at("d_b").get<int>();
    const BipartiteDims dims(d_a, d_b);
    const auto& rows = j.at("matrix");
    const int d = dims.total();
    if (static_cast<int>(rows.size()) != d) {
      throw std::invalid_argument("matrix has " + std::to_string(rows.size()) +
                                  " rows, expected " + std::to_string(d));
    }
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<int>(row.size()) != d) {
        throw std::invalid_argument("row " + std::to_string(i) + " has wrong length");
      }
      for (int k = 0; k < d; ++k) {
        const auto& cellv = row.at(static_cast<std::size_t>(k));
        m(i, k) = Complex(cellv.at("re").get<double>(), cellv.at("im").get<double>());
      }
    }
    return DensityMatrix(HermitianOperator(std::move(m), dims));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(context + ": malformed state file: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(context + ": " + e.what());
  }
}

void write_state_file(const std::string& path, const DensityMatrix& rho) {
  write_text_file(path, state_to_json_text(rho));
}

DensityMatrix read_state_file(const std::string& path) {
  return parse_state_json(read_text_file(path), path);
}

void write_csv(const std::string& path, const std::string& schema,
               std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << "# schema: " << schema << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ",";
    out << columns[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::invalid_argument("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace entwit
