#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace mtparse::trainer {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Lowercase hex SHA-1 of `data`.
std::string sha1_hex(std::string_view data);
/// SHA-1 of "blob <size>\0<data>", the content id git assigns to a file.
std::string git_blob_hash(std::string_view data);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// Hash of a manifest object with the volatile "created" and
/// "manifest_hash" fields removed (dump order is key-sorted, so stable).
std::string manifest_hash(const nlohmann::json& manifest);

/// Adds "manifest_hash" and a UTC "created" timestamp.
void seal_manifest(nlohmann::json& manifest);

/// ISO-8601 UTC timestamp of the current time.
std::string utc_timestamp();

}  // namespace mtparse::trainer
