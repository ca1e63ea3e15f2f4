#pragma once

// Minimal ZIP container support over zlib: enough to read 3GPP TDoc archives
// and OOXML packages, and to write deterministic archives for fixtures and
// synthetic corpora. Supports stored (0) and deflated (8) members; ZIP64 and
// encrypted members are reported as errors.

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "tdoc/error.hpp"

namespace tdoc::zip {

class ZipError : public Error {
public:
    using Error::Error;
};

struct Member {
    std::string name;
    std::uint16_t method = 0;
    std::uint16_t flags = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;

    bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

namespace detail {

inline std::uint16_t rd16(std::string_view b, std::size_t off) {
    if (off + 2 > b.size()) throw ZipError("truncated archive");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      (static_cast<unsigned char>(b[off + 1]) << 8));
}

inline std::uint32_t rd32(std::string_view b, std::size_t off) {
    return static_cast<std::uint32_t>(rd16(b, off)) | (static_cast<std::uint32_t>(rd16(b, off + 2)) << 16);
}

inline void wr16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

inline void wr32(std::string& out, std::uint32_t v) {
    wr16(out, static_cast<std::uint16_t>(v & 0xFFFF));
    wr16(out, static_cast<std::uint16_t>(v >> 16));
}

inline constexpr std::uint32_t kLocalSig = 0x04034b50;
inline constexpr std::uint32_t kCentralSig = 0x02014b50;
inline constexpr std::uint32_t kEndSig = 0x06054b50;

inline std::uint32_t crc(std::string_view data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

inline std::string inflate_raw(std::string_view in, std::size_t expected) {
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ZipError("inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) throw ZipError("deflate stream is corrupt");
    return out;
}

inline std::string deflate_raw(std::string_view in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw ZipError("deflateInit2 failed");
    std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ZipError("deflate failed");
    return out;
}

}  // namespace detail

// Read-only view over an in-memory archive. The bytes are owned by the reader.
class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) { parse_directory(); }

    static Reader open(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ZipError("cannot open " + path.string());
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return Reader(std::move(bytes));
    }

    const std::vector<Member>& members() const { return members_; }

    const Member* find(std::string_view name) const {
        for (const auto& m : members_)
            if (m.name == name) return &m;
        return nullptr;
    }

    // Decompresses one member and verifies its CRC.
    std::string read(const Member& m) const {
        using namespace detail;
        std::string_view b = bytes_;
        std::size_t off = m.local_header_offset;
        if (rd32(b, off) != kLocalSig) throw ZipError("bad local header for " + m.name);
        std::size_t data_off = off + 30 + rd16(b, off + 26) + rd16(b, off + 28);
        if (data_off + m.compressed_size > b.size()) throw ZipError("member data out of bounds: " + m.name);
        std::string_view raw = b.substr(data_off, m.compressed_size);
        std::string data;
        if (m.method == 0) {
            if (m.compressed_size != m.uncompressed_size) throw ZipError("stored size mismatch: " + m.name);
            data.assign(raw);
        } else if (m.method == 8) {
            data = inflate_raw(raw, m.uncompressed_size);
        } else {
            throw ZipError("unsupported compression method " + std::to_string(m.method) + ": " + m.name);
        }
        if (crc(data) != m.crc32) throw ZipError("crc mismatch: " + m.name);
        return data;
    }

    std::string read(std::string_view name) const {
        const Member* m = find(name);
        if (!m) throw ZipError("no such member: " + std::string(name));
        return read(*m);
    }

private:
    void parse_directory() {
        using namespace detail;
        std::string_view b = bytes_;
        if (b.size() < 22) throw ZipError("not a zip archive (too short)");
        // The end record sits in the last 22 + 65535 bytes (comment length).
        std::size_t lo = b.size() > 22 + 0xFFFF ? b.size() - 22 - 0xFFFF : 0;
        std::size_t eocd = std::string_view::npos;
        for (std::size_t p = b.size() - 22 + 1; p-- > lo;) {
            if (rd32(b, p) == kEndSig) {
                eocd = p;
                break;
            }
        }
        if (eocd == std::string_view::npos) throw ZipError("end of central directory not found");
        std::uint16_t count = rd16(b, eocd + 10);
        std::uint32_t cd_size = rd32(b, eocd + 12);
        std::uint32_t cd_off = rd32(b, eocd + 16);
        if (count == 0xFFFF || cd_off == 0xFFFFFFFF) throw ZipError("zip64 archives are not supported");
        if (static_cast<std::uint64_t>(cd_off) + cd_size > eocd) throw ZipError("central directory out of bounds");
        std::size_t p = cd_off;
        members_.reserve(count);
        for (std::uint16_t i = 0; i < count; ++i) {
            if (rd32(b, p) != kCentralSig) throw ZipError("bad central directory entry");
            Member m;
            m.flags = rd16(b, p + 8);
            m.method = rd16(b, p + 10);
            m.crc32 = rd32(b, p + 16);
            m.compressed_size = rd32(b, p + 20);
            m.uncompressed_size = rd32(b, p + 24);
            std::uint16_t name_len = rd16(b, p + 28);
            std::uint16_t extra_len = rd16(b, p + 30);
            std::uint16_t comment_len = rd16(b, p + 32);
            m.local_header_offset = rd32(b, p + 42);
            if (p + 46 + name_len > b.size()) throw ZipError("truncated central directory");
            m.name.assign(b.substr(p + 46, name_len));
            if (m.flags & 0x1) throw ZipError("encrypted member: " + m.name);
            if (m.local_header_offset >= cd_off) throw ZipError("member offset out of bounds: " + m.name);
            members_.push_back(std::move(m));
            p += 46 + name_len + extra_len + comment_len;
        }
    }

    std::string bytes_;
    std::vector<Member> members_;
};

// Builds an archive in memory. Timestamps are fixed at the DOS epoch so that
// identical inputs produce byte-identical archives.
class Writer {
public:
    void add(std::string_view name, std::string_view data, bool compress = true) {
        using namespace detail;
        Member m;
        m.name = std::string(name);
        m.crc32 = crc(data);
        m.uncompressed_size = static_cast<std::uint32_t>(data.size());
        std::string payload;
        if (compress && !data.empty()) {
            payload = deflate_raw(data);
            m.method = 8;
        } else {
            payload.assign(data);
            m.method = 0;
        }
        m.compressed_size = static_cast<std::uint32_t>(payload.size());
        m.local_header_offset = static_cast<std::uint32_t>(out_.size());

        wr32(out_, kLocalSig);
        wr16(out_, 20);
        wr16(out_, 0);
        wr16(out_, m.method);
        wr16(out_, 0);       // time
        wr16(out_, 0x21);    // date: 1980-01-01
        wr32(out_, m.crc32);
        wr32(out_, m.compressed_size);
        wr32(out_, m.uncompressed_size);
        wr16(out_, static_cast<std::uint16_t>(m.name.size()));
        wr16(out_, 0);
        out_ += m.name;
        out_ += payload;
        members_.push_back(std::move(m));
    }

    std::string finish() {
        using namespace detail;
        std::string out = out_;
        std::uint32_t cd_off = static_cast<std::uint32_t>(out.size());
        for (const auto& m : members_) {
            wr32(out, kCentralSig);
            wr16(out, 20);
            wr16(out, 20);
            wr16(out, 0);
            wr16(out, m.method);
            wr16(out, 0);
            wr16(out, 0x21);
            wr32(out, m.crc32);
            wr32(out, m.compressed_size);
            wr32(out, m.uncompressed_size);
            wr16(out, static_cast<std::uint16_t>(m.name.size()));
            wr16(out, 0);
            wr16(out, 0);
            wr16(out, 0);
            wr16(out, 0);
            wr32(out, 0);
            wr32(out, m.local_header_offset);
            out += m.name;
        }
        std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_off;
        wr32(out, kEndSig);
        wr16(out, 0);
        wr16(out, 0);
        wr16(out, static_cast<std::uint16_t>(members_.size()));
        wr16(out, static_cast<std::uint16_t>(members_.size()));
        wr32(out, cd_size);
        wr32(out, cd_off);
        wr16(out, 0);
        return out;
    }

private:
    std::string out_;
    std::vector<Member> members_;
};

}  // namespace tdoc::zip
