#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "mtparse/numerics/tensor.hpp"

namespace mtparse::numerics {

/// On-disk layout (all integers little-endian):
///   "MTPCKPT1"
///   u64 manifest length, manifest bytes (JSON text)
///   u64 tensor count, then per tensor:
///     u64 name length, name bytes, u64 rank, rank x u64 dims,
///     product(dims) x float64 payload
struct Checkpoint {
    std::string manifest;
    std::map<std::string, Tensor> tensors;
};

void write_checkpoint(std::ostream& out, const std::string& manifest, std::span<const Parameter* const> params);
void write_checkpoint(const std::filesystem::path& path, const std::string& manifest,
                      std::span<const Parameter* const> params);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace mtparse::numerics
