#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ifrl/signal_math.hpp"

// Token-record interchange with external trainers. One JSON object per line with
// exactly the fields sample_id, position, token_id, token_text, nll, entropy,
// logp, advantage. Selections are written as a header line followed by
// {sample_id, position} lines.
namespace ifrl::signal {

inline constexpr std::string_view kTokenRecordSchema = "token_records_v1";
inline constexpr std::string_view kSelectionSchema = "selection_v1";
inline constexpr std::string_view kTeaSchema = "tea_v1";
inline constexpr std::string_view kEntropyReportSchema = "entropy_report_v1";

nlohmann::json to_json(const TokenRecord& record);
// Error{kSchema} for shape problems, Error{kInvalidRecord} for invariant violations.
TokenRecord record_from_json(const nlohmann::json& j);

std::vector<TokenRecord> read_token_records(std::istream& in, std::string_view source);
std::vector<TokenRecord> read_token_records(const std::filesystem::path& path);
void write_token_records(std::ostream& out, std::span<const TokenRecord> records);

void write_selection(std::ostream& out, const SelectionResult& selection,
                     const nlohmann::json& extra_header);
SelectionResult read_selection(std::istream& in, std::string_view source);
SelectionResult read_selection(const std::filesystem::path& path);

}  // namespace ifrl::signal
