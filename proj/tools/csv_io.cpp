#include "csv_io.hpp"

#include "gpid/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace gpid::io {

namespace {

[[nodiscard]] std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[nodiscard]] std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[nodiscard]] bool parse_number(std::string_view field, double& value) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    return ec == std::errc() && ptr == end && !field.empty();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix parse_csv_matrix(std::istream& in, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            numeric = numeric && parse_number(fields[i], values[i]);
        }
        if (!numeric) {
            if (rows.empty() && line_no == 1) continue;  // header
            throw Error(ErrorCode::InvalidInput,
                        source + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        if (rows.empty()) {
            width = values.size();
        } else if (values.size() != width) {
            throw Error(ErrorCode::InvalidInput,
                        source + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields");
        }
        rows.push_back(std::move(values));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    }
    return parse_csv_matrix(in, path);
}

void write_csv_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    if (!header.empty()) out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? "," : "") << format_double(m(r, c));
        }
        out << '\n';
    }
}

void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::InvalidInput, "cannot write " + path);
    }
    write_csv_matrix(out, m, header);
}

}  // namespace gpid::io
