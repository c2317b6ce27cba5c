#pragma once

#include <CLI11.hpp>

namespace ifrl::cli {

// CLI11 config reader for JSON files. Top-level scalar keys apply to the
// selected (sub)command; an object keyed by a subcommand name applies to that
// subcommand. Underscores in keys match dashes in flag names. Values given on
// the command line always win.
class JsonConfig final : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

}  // namespace ifrl::cli
