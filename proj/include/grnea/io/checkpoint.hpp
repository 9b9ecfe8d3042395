#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace grnea::io {

/// Versioned binary container: magic, format version, a JSON config block,
/// then named little-endian arrays (dtype 0 = float32, 1 = float64).
/// Layout:
///   bytes 0..7   magic "GRNEACKP"
///   u32          container version (1)
///   u32          config length, followed by UTF-8 JSON
///   u32          array count
///   per array:   u32 name length; name; u32 dtype; u32 ndim; u64 dims[];
///                payload (product(dims) elements, little-endian)
constexpr char kCheckpointMagic[8] = {'G', 'R', 'N', 'E', 'A', 'C', 'K', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
    std::string name;
    std::uint32_t dtype = 0;  // 0: f32, 1: f64
    std::vector<std::uint64_t> dims;
    std::vector<float> f32;
    std::vector<double> f64;

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

struct Checkpoint {
    nlohmann::json config;
    std::vector<NamedArray> arrays;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("checkpoint: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw std::runtime_error("checkpoint: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

template <typename T>
void put_scalar_le(std::ostream& os, T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    if constexpr (sizeof(T) == 4) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(os, bits);
    } else {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64(os, bits);
    }
}

template <typename T>
T get_scalar_le(std::istream& is) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    T v;
    if constexpr (sizeof(T) == 4) {
        std::uint32_t bits = get_u32(is);
        std::memcpy(&v, &bits, 4);
    } else {
        std::uint64_t bits = get_u64(is);
        std::memcpy(&v, &bits, 8);
    }
    return v;
}

}  // namespace detail

inline void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
    os.write(kCheckpointMagic, 8);
    detail::put_u32(os, kCheckpointVersion);
    const std::string cfg = ckpt.config.dump();
    detail::put_u32(os, static_cast<std::uint32_t>(cfg.size()));
    os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    detail::put_u32(os, static_cast<std::uint32_t>(ckpt.arrays.size()));
    for (const auto& a : ckpt.arrays) {
        detail::put_u32(os, static_cast<std::uint32_t>(a.name.size()));
        os.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
        detail::put_u32(os, a.dtype);
        detail::put_u32(os, static_cast<std::uint32_t>(a.dims.size()));
        for (auto d : a.dims) detail::put_u64(os, d);
        if (a.dtype == 0) {
            if (a.f32.size() != a.element_count())
                throw std::runtime_error("checkpoint: array size mismatch in " + a.name);
            for (float v : a.f32) detail::put_scalar_le(os, v);
        } else {
            if (a.f64.size() != a.element_count())
                throw std::runtime_error("checkpoint: array size mismatch in " + a.name);
            for (double v : a.f64) detail::put_scalar_le(os, v);
        }
    }
    if (!os) throw std::runtime_error("checkpoint: write failure: " + path);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic bytes in " + path);
    const std::uint32_t version = detail::get_u32(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    const std::uint32_t cfg_len = detail::get_u32(is);
    std::string cfg(cfg_len, '\0');
    if (!is.read(cfg.data(), cfg_len)) throw std::runtime_error("checkpoint: truncated config");
    Checkpoint ckpt;
    ckpt.config = nlohmann::json::parse(cfg);
    const std::uint32_t count = detail::get_u32(is);
    ckpt.arrays.resize(count);
    for (auto& a : ckpt.arrays) {
        const std::uint32_t name_len = detail::get_u32(is);
        a.name.resize(name_len);
        if (!is.read(a.name.data(), name_len))
            throw std::runtime_error("checkpoint: truncated array name");
        a.dtype = detail::get_u32(is);
        if (a.dtype > 1) throw std::runtime_error("checkpoint: unknown dtype in " + a.name);
        const std::uint32_t ndim = detail::get_u32(is);
        a.dims.resize(ndim);
        for (auto& d : a.dims) d = detail::get_u64(is);
        const std::uint64_t n = a.element_count();
        if (a.dtype == 0) {
            a.f32.resize(n);
            for (auto& v : a.f32) v = detail::get_scalar_le<float>(is);
        } else {
            a.f64.resize(n);
            for (auto& v : a.f64) v = detail::get_scalar_le<double>(is);
        }
    }
    return ckpt;
}

}  // namespace grnea::io
