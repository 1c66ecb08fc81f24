#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>

namespace magbill::cli {

/// Shortest round-trip-safe text: 17 significant digits.
std::string format_number(double v);

/// Comma-joined numbers terminated by a newline.
std::string csv_row(std::initializer_list<double> values);

std::string sha256_hex(const std::string& data);

/// Writes `content` to `file` and the sidecar <stem>.meta.json next to it.
/// Returns the sidecar path.
std::filesystem::path write_artifact(const std::filesystem::path& file, const std::string& content,
                                     const nlohmann::json& meta);

}  // namespace magbill::cli
