#include "fpix/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

namespace fpix::store {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'F', 'P', 'I', 'X'};
constexpr std::size_t kFixedHeader = 4 + 1 + 1 + 4 + 8 + 1;
// Plaintext header + tag around the 8-byte components.
constexpr std::size_t kCipherOverhead = 5 + 32;

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = v << 8 | in[at + static_cast<std::size_t>(i)];
    return v;
}

[[noreturn]] void corrupt(const std::string& what) { throw StoreError(StoreErrc::Corrupt, "corrupt: " + what); }

std::string errno_text() { return std::strerror(errno); }

void require_valid_id(std::string_view id) {
    if (!is_valid_id(id)) {
        throw StoreError(StoreErrc::InvalidId,
                         "invalid id '" + std::string(id) + "': need 1-64 characters of [A-Za-z0-9_-]");
    }
}

void write_all(int fd, std::span<const std::uint8_t> bytes, const fs::path& path) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StoreError(StoreErrc::Io, "write " + path.string() + ": " + errno_text());
        }
        done += static_cast<std::size_t>(n);
    }
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError(StoreErrc::Io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

bool is_valid_id(std::string_view id) {
    if (id.empty() || id.size() > kMaxIdBytes) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '-';
    });
}

std::vector<std::uint8_t> encode_record(const IndexRecord& rec) {
    require_valid_id(rec.id);
    if (rec.ciphertext.size() > 0xffffffffu) throw StoreError(StoreErrc::Io, "ciphertext too large");
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kFormatVersion);
    out.push_back(static_cast<std::uint8_t>(rec.mode));
    put_be(out, rec.dim, 4);
    put_be(out, rec.created, 8);
    out.push_back(static_cast<std::uint8_t>(rec.id.size()));
    out.insert(out.end(), rec.id.begin(), rec.id.end());
    put_be(out, rec.ciphertext.size(), 4);
    out.insert(out.end(), rec.ciphertext.begin(), rec.ciphertext.end());
    return out;
}

IndexRecord decode_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFixedHeader) corrupt("header truncated");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) corrupt("magic");
    if (bytes[4] != kFormatVersion) corrupt("version " + std::to_string(bytes[4]));
    if (!is_valid_mode_byte(bytes[5])) corrupt("mode byte " + std::to_string(bytes[5]));

    IndexRecord rec;
    rec.mode = static_cast<IndexMode>(bytes[5]);
    rec.dim = static_cast<std::uint32_t>(get_be(bytes, 6, 4));
    rec.created = get_be(bytes, 10, 8);
    if (rec.dim == 0) corrupt("dim is zero");

    const std::size_t id_len = bytes[18];
    std::size_t pos = kFixedHeader;
    if (bytes.size() < pos + id_len + 4) corrupt("id truncated");
    rec.id.assign(reinterpret_cast<const char*>(bytes.data() + pos), id_len);
    if (!is_valid_id(rec.id)) corrupt("id");
    pos += id_len;

    const std::size_t ct_len = get_be(bytes, pos, 4);
    pos += 4;
    if (bytes.size() - pos != ct_len) {
        corrupt("length: ciphertext length field " + std::to_string(ct_len) + " but " +
                std::to_string(bytes.size() - pos) + " bytes follow");
    }
    // Whatever precedes body and tag must be an uncompressed point:
    // 0x04 plus two equal-width coordinates.
    const std::size_t payload = kCipherOverhead + 8 * static_cast<std::size_t>(rec.dim);
    if (ct_len < payload + 3 || (ct_len - payload) % 2 == 0) {
        corrupt("length: ciphertext of " + std::to_string(ct_len) + " bytes inconsistent with dim " +
                std::to_string(rec.dim));
    }
    if (bytes[pos] != 0x04) corrupt("ciphertext point prefix");
    rec.ciphertext.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return rec;
}

fs::path record_path(const fs::path& store_dir, std::string_view id) {
    return store_dir / (std::string(id) + ".rec");
}

namespace detail {

fs::path stage(const fs::path& store_dir, const IndexRecord& rec) {
    static std::atomic<unsigned> counter{0};
    const auto bytes = encode_record(rec);
    const fs::path tmp = store_dir / ("." + rec.id + ".rec.tmp-" + std::to_string(::getpid()) + "-" +
                                      std::to_string(counter++));
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) throw StoreError(StoreErrc::Io, "create " + tmp.string() + ": " + errno_text());
    try {
        write_all(fd, bytes, tmp);
        if (::fsync(fd) != 0) throw StoreError(StoreErrc::Io, "fsync " + tmp.string() + ": " + errno_text());
    } catch (...) {
        ::close(fd);
        ::unlink(tmp.c_str());
        throw;
    }
    if (::close(fd) != 0) {
        ::unlink(tmp.c_str());
        throw StoreError(StoreErrc::Io, "close " + tmp.string() + ": " + errno_text());
    }
    return tmp;
}

void commit(const fs::path& staged, const fs::path& store_dir, std::string_view id, bool overwrite) {
    const fs::path target = record_path(store_dir, id);
    if (overwrite) {
        if (::rename(staged.c_str(), target.c_str()) != 0) {
            const std::string why = errno_text();
            ::unlink(staged.c_str());
            throw StoreError(StoreErrc::Io, "rename to " + target.string() + ": " + why);
        }
        return;
    }
    // link() refuses to replace an existing name, so the duplicate check and
    // the publish are one atomic step.
    if (::link(staged.c_str(), target.c_str()) != 0) {
        const int err = errno;
        ::unlink(staged.c_str());
        if (err == EEXIST) throw StoreError(StoreErrc::Exists, "record '" + std::string(id) + "' already exists");
        throw StoreError(StoreErrc::Io, "link to " + target.string() + ": " + std::strerror(err));
    }
    ::unlink(staged.c_str());
}

}  // namespace detail

void put(const fs::path& store_dir, const IndexRecord& rec, bool overwrite) {
    require_valid_id(rec.id);
    std::error_code ec;
    if (!fs::is_directory(store_dir, ec)) {
        throw StoreError(StoreErrc::Io, "store directory '" + store_dir.string() + "' does not exist");
    }
    if (!overwrite && fs::exists(record_path(store_dir, rec.id), ec)) {
        throw StoreError(StoreErrc::Exists, "record '" + rec.id + "' already exists");
    }
    detail::commit(detail::stage(store_dir, rec), store_dir, rec.id, overwrite);
}

IndexRecord get(const fs::path& store_dir, std::string_view id) {
    require_valid_id(id);
    const fs::path path = record_path(store_dir, id);
    std::error_code ec;
    if (!fs::exists(path, ec)) throw StoreError(StoreErrc::NotFound, "record '" + std::string(id) + "' not found");
    IndexRecord rec;
    try {
        rec = decode_record(read_file(path));
    } catch (const StoreError& e) {
        throw StoreError(e.code(), path.filename().string() + ": " + e.what());
    }
    if (rec.id != id) {
        throw StoreError(StoreErrc::Corrupt,
                         path.filename().string() + ": corrupt: id field '" + rec.id + "' does not match file name");
    }
    return rec;
}

Listing list(const fs::path& store_dir) {
    std::error_code ec;
    if (!fs::is_directory(store_dir, ec)) {
        throw StoreError(StoreErrc::Io, "store directory '" + store_dir.string() + "' does not exist");
    }
    Listing out;
    for (const auto& entry : fs::directory_iterator(store_dir)) {
        const fs::path& p = entry.path();
        if (p.extension() != ".rec" || p.filename().string().front() == '.') continue;
        const std::string id = p.stem().string();
        try {
            if (!entry.is_regular_file()) throw StoreError(StoreErrc::Corrupt, "not a regular file");
            const IndexRecord rec = get(store_dir, id);
            out.records.push_back({rec.id, rec.mode, rec.dim, rec.created});
        } catch (const StoreError& e) {
            out.corrupt.push_back({p.filename().string(), e.what()});
        }
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const RecordSummary& a, const RecordSummary& b) { return a.id < b.id; });
    std::sort(out.corrupt.begin(), out.corrupt.end(),
              [](const CorruptFile& a, const CorruptFile& b) { return a.file < b.file; });
    return out;
}

bool remove(const fs::path& store_dir, std::string_view id) {
    require_valid_id(id);
    std::error_code ec;
    const bool removed = fs::remove(record_path(store_dir, id), ec);
    if (ec) throw StoreError(StoreErrc::Io, "remove '" + std::string(id) + "': " + ec.message());
    return removed;
}

}  // namespace fpix::store
