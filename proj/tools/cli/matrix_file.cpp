#include "matrix_file.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <vector>

namespace prstab::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, int line) {
  field = trim(field);
  if (field.empty()) throw FileError("empty numeric field", line);
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw FileError("not a finite decimal number: '" + std::string(field) + "'", line);
  }
  return v;
}

}  // namespace

MeasurementMatrix parse_matrix(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back(text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw FileError("empty matrix file", 1);

  static const std::regex header(R"(#\s*field\s*:\s*(real|complex)\s*,\s*m\s*:\s*(\d+)\s*,\s*d\s*:\s*(\d+)\s*)");
  const std::string head(trim(lines[0]));
  std::smatch match;
  if (!std::regex_match(head, match, header)) {
    throw FileError("expected header '# field: real|complex, m: <int>, d: <int>'", 1);
  }
  const Field field = match[1] == "real" ? Field::Real : Field::Complex;
  const std::size_t m = std::stoul(match[2]);
  const std::size_t d = std::stoul(match[3]);
  if (m < 1 || d < 1) throw FileError("m and d must be at least 1", 1);
  if (lines.size() - 1 != m) {
    throw FileError("header declares " + std::to_string(m) + " rows but the file has " +
                        std::to_string(lines.size() - 1),
                    static_cast<int>(std::min(lines.size(), m + 1)) + 1);
  }

  const std::size_t width = field == Field::Real ? d : 2 * d;
  std::vector<Scalar> entries;
  entries.reserve(m * d);
  for (std::size_t i = 0; i < m; ++i) {
    const int line_no = static_cast<int>(i) + 2;
    std::vector<double> values;
    std::string_view rest = lines[i + 1];
    while (true) {
      const std::size_t comma = rest.find(',');
      values.push_back(parse_number(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (values.size() != width) {
      throw FileError("expected " + std::to_string(width) + " values, found " + std::to_string(values.size()), line_no);
    }
    for (std::size_t k = 0; k < d; ++k) {
      entries.push_back(field == Field::Real ? Scalar{values[k]} : Scalar{values[2 * k], values[2 * k + 1]});
    }
  }
  return MeasurementMatrix(field, m, d, std::move(entries));
}

std::string format_matrix(const MeasurementMatrix& a) {
  std::ostringstream out;
  out << "# field: " << to_string(a.field()) << ", m: " << a.rows() << ", d: " << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (k > 0) out << ',';
      out << format_double(a(i, k).real());
      if (a.field() == Field::Complex) out << ',' << format_double(a(i, k).imag());
    }
    out << '\n';
  }
  return out.str();
}

MeasurementMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

void write_matrix_file(const std::filesystem::path& path, const MeasurementMatrix& a) {
  write_output(path, format_matrix(a));
}

void write_output(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  out << text;
  if (!out) throw FileError("write failed for " + path.string());
}

}  // namespace prstab::cli
