#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "prstab/linalg.hpp"

namespace prstab::cli {

/// Unreadable file or malformed content; line is 1-based, 0 when not tied to a line.
class FileError : public std::runtime_error {
 public:
  FileError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

/// Matrix text format:
///   # field: real|complex, m: <int>, d: <int>
///   m comma-separated rows of d reals, or 2d values (re, im interleaved) if complex.
MeasurementMatrix parse_matrix(std::string_view text);
std::string format_matrix(const MeasurementMatrix& a);

MeasurementMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const MeasurementMatrix& a);

/// Writes text to path, or to stdout when path is empty.
void write_output(const std::filesystem::path& path, const std::string& text);

}  // namespace prstab::cli
