#include "ifrl/jsonl.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ifrl/error.hpp"

namespace ifrl::jsonl {

using nlohmann::json;

Document read(std::istream& in, std::string_view source) {
  Document doc;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kSchema, std::string(source) + ":" + std::to_string(number) +
                                          ": malformed JSON (" + e.what() + ")");
    }
    if (!value.is_object()) {
      throw Error(ErrorCode::kSchema,
                  std::string(source) + ":" + std::to_string(number) + ": expected a JSON object");
    }
    if (doc.records.empty() && !doc.header && is_header(value)) {
      doc.header = std::move(value);
      continue;
    }
    doc.records.push_back({number, std::move(value)});
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure on " + std::string(source));
  return doc;
}

Document read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read(in, path.string());
}

void expect_schema(const Document& doc, std::string_view expected, std::string_view source) {
  if (!doc.header) return;
  const auto& schema = (*doc.header)["schema"];
  if (!schema.is_string() || schema.get<std::string>() != expected) {
    throw Error(ErrorCode::kSchema, std::string(source) + ": expected schema '" +
                                        std::string(expected) + "', found " + schema.dump());
  }
}

bool is_header(const json& value) {
  return value.is_object() && value.contains("schema") && value["schema"].is_string();
}

json make_header(std::string_view schema) { return json{{"schema", schema}}; }

void write_line(std::ostream& out, const json& value) {
  out << value.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

void rethrow_with_location(std::string_view source, std::size_t line) {
  const std::string where = std::string(source) + ":" + std::to_string(line) + ": ";
  try {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), where + e.message());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, where + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ifrl::jsonl
