#include "mtparse/numerics/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mtparse/error.hpp"

namespace mtparse::numerics {

namespace {

constexpr std::string_view kMagic = "MTPCKPT1";

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw DataError("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string get_bytes(std::istream& in, std::uint64_t n) {
    if (n > (1ULL << 32)) throw DataError("corrupt checkpoint: implausible length");
    std::string s(n, '\0');
    if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw DataError("truncated checkpoint");
    return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const std::string& manifest, std::span<const Parameter* const> params) {
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, manifest.size());
    out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
    put_u64(out, params.size());
    for (const Parameter* p : params) {
        put_u64(out, p->name.size());
        out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        const auto& shape = p->value.shape();
        put_u64(out, shape.size());
        for (auto d : shape) put_u64(out, d);
        for (double v : p->value.values()) put_f64(out, v);
    }
    if (!out) throw DataError("failed writing checkpoint");
}

void write_checkpoint(const std::filesystem::path& path, const std::string& manifest,
                      std::span<const Parameter* const> params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_checkpoint(out, manifest, params);
}

Checkpoint read_checkpoint(std::istream& in) {
    std::string magic(kMagic.size(), '\0');
    if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) || magic != kMagic) {
        throw DataError("not a checkpoint file");
    }
    Checkpoint ck;
    ck.manifest = get_bytes(in, get_u64(in));
    const std::uint64_t count = get_u64(in);
    for (std::uint64_t k = 0; k < count; ++k) {
        std::string name = get_bytes(in, get_u64(in));
        const std::uint64_t rank = get_u64(in);
        if (rank > 8) throw DataError("corrupt checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
        std::vector<std::size_t> shape;
        std::size_t n = 1;
        for (std::uint64_t r = 0; r < rank; ++r) {
            shape.push_back(static_cast<std::size_t>(get_u64(in)));
            n *= shape.back();
        }
        std::vector<double> values(n);
        for (auto& v : values) v = get_f64(in);
        ck.tensors.emplace(std::move(name), Tensor(std::move(shape), std::move(values)));
    }
    return ck;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_checkpoint(in);
}

}  // namespace mtparse::numerics
