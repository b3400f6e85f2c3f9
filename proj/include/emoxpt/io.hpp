#ifndef EMOXPT_IO_HPP
#define EMOXPT_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emoxpt {

std::string read_text_file(const std::filesystem::path& path);

/// Writes `content` verbatim, creating parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

/// Fixed-point with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

namespace csv {

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

/// RFC 4180 style parser: quoted fields may contain commas, doubled quotes
/// and line breaks. Trailing empty lines are ignored.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace csv

}  // namespace emoxpt

#endif  // EMOXPT_IO_HPP
