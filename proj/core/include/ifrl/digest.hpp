#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace ifrl {

std::string sha256_hex(std::string_view data);

// "sha256:<hex>" over the compact, key-sorted serialisation of `value`.
std::string config_digest(const nlohmann::json& value);

}  // namespace ifrl
