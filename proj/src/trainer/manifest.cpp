#include "mtparse/trainer/manifest.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "mtparse/error.hpp"

namespace mtparse::trainer {

std::string sha1_hex(std::string_view data) {
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA_DIGEST_LENGTH);
    for (unsigned char b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 15]);
    }
    return out;
}

std::string git_blob_hash(std::string_view data) {
    std::string buf = "blob " + std::to_string(data.size());
    buf.push_back('\0');
    buf.append(data);
    return sha1_hex(buf);
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return git_blob_hash(ss.str());
}

std::string manifest_hash(const nlohmann::json& manifest) {
    nlohmann::json stable = manifest;
    stable.erase("created");
    stable.erase("manifest_hash");
    return git_blob_hash(stable.dump());
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void seal_manifest(nlohmann::json& manifest) {
    manifest["manifest_hash"] = manifest_hash(manifest);
    manifest["created"] = utc_timestamp();
}

}  // namespace mtparse::trainer
