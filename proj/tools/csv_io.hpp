#pragma once

#include "gpid/linalg.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gpid::io {

/// Reads a comma-separated numeric table. A first line containing any
/// non-numeric field is treated as a header and skipped. Throws
/// gpid::Error(InvalidInput) on ragged rows or unparsable numbers.
[[nodiscard]] Matrix read_csv_matrix(const std::string& path);
[[nodiscard]] Matrix parse_csv_matrix(std::istream& in, const std::string& source);

/// One row per line, 17 significant digits, optional header.
void write_csv_matrix(std::ostream& out, const Matrix& m,
                      const std::vector<std::string>& header = {});
void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

/// %.17g
[[nodiscard]] std::string format_double(double v);

}  // namespace gpid::io
