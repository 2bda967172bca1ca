#pragma once

#include "entwit/qmat.hpp"

#include <span>
#include <string>
#include <vector>

namespace entwit {

// 17 significant digits, enough to round-trip a double exactly.
std::string format_double(double v);

// State files are JSON: {"schema": "entwit.state.v1", "d_a": .., "d_b": ..,
// "matrix": [[{"re": .., "im": ..}, ...], ...]} in row-major order.
inline constexpr const char* kStateSchema = "entwit.state.v1";

std::string state_to_json_text(const DensityMatrix& rho);
DensityMatrix parse_state_json(const std::string& text, const std::string& context);

void write_state_file(const std::string& path, const DensityMatrix& rho);
DensityMatrix read_state_file(const std::string& path);

// CSV with a schema comment line followed by the column header. All rows are
// written in one pass so concurrent producers cannot interleave.
void write_csv(const std::string& path, const std::string& schema,
               std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace entwit
