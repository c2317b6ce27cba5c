#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// JSON Lines helpers. Files written by this project start with a header object
// carrying a "schema" key; readers accept (and skip) a leading header.
namespace ifrl::jsonl {

struct Line {
  std::size_t number = 0;  // 1-based line number in the source
  nlohmann::json value;
};

struct Document {
  std::optional<nlohmann::json> header;
  std::vector<Line> records;
};

// Blank lines are skipped. Parse failures raise Error{kSchema} naming the line.
Document read(std::istream& in, std::string_view source);
// Error{kIo} when the file cannot be opened.
Document read_file(const std::filesystem::path& path);

// Rejects a header whose schema differs from `expected`.
void expect_schema(const Document& doc, std::string_view expected, std::string_view source);

bool is_header(const nlohmann::json& value);
nlohmann::json make_header(std::string_view schema);

// Compact, key-sorted, one object per line.
void write_line(std::ostream& out, const nlohmann::json& value);

// Re-throws Error{kSchema} / Error{kInvalidRecord} / Error{kInvalidSpec} thrown by
// `fn` with "source:line: " prepended.
template <typename F>
decltype(auto) at_line(std::string_view source, const Line& line, F&& fn);

[[noreturn]] void rethrow_with_location(std::string_view source, std::size_t line);

template <typename F>
decltype(auto) at_line(std::string_view source, const Line& line, F&& fn) {
  try {
    return fn(line.value);
  } catch (...) {
    rethrow_with_location(source, line.number);
  }
}

// Writes through a temporary file and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ifrl::jsonl
