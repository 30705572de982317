#pragma once

// Key-value configuration files mirroring TrainConfig:
//
//   # comment
//   word_dim = 20
//   tau1 = 1.0
//
// Unknown keys and malformed values are errors. See docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hrsn/train.hpp"

namespace hrsn {

// Applies the settings in `in` on top of `base`.
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});

// Sets one key; throws FormatError for unknown keys or bad values.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);

std::string to_key_value(const TrainConfig& config);

}  // namespace hrsn
