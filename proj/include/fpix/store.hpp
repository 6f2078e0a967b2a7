// One-file-per-record store of encrypted indexes.
//
// <id>.rec layout, integers big-endian:
//   "FPIX" | version u8 (0x01) | mode u8 | dim u32 | created u64 |
//   id length u8 | id bytes | ciphertext length u32 | ciphertext
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpix/indexing.hpp"

namespace fpix::store {

enum class StoreErrc { InvalidId, Exists, NotFound, Corrupt, Io };

class StoreError : public std::runtime_error {
public:
    StoreError(StoreErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    StoreErrc code() const noexcept { return code_; }

private:
    StoreErrc code_;
};

inline constexpr std::uint8_t kFormatVersion = 0x01;
inline constexpr std::size_t kMaxIdBytes = 64;

struct IndexRecord {
    std::string id;
    IndexMode mode = IndexMode::Svd;
    std::uint32_t dim = 0;
    std::uint64_t created = 0;
    std::vector<std::uint8_t> ciphertext;  // opaque encode_point(R) || body || tag

    friend bool operator==(const IndexRecord&, const IndexRecord&) = default;
};

struct RecordSummary {
    std::string id;
    IndexMode mode;
    std::uint32_t dim;
    std::uint64_t created;
};

struct CorruptFile {
    std::string file;
    std::string reason;
};

struct Listing {
    std::vector<RecordSummary> records;  // sorted by id, bytewise
    std::vector<CorruptFile> corrupt;    // sorted by file name
};

/// 1-64 bytes of [A-Za-z0-9_-].
bool is_valid_id(std::string_view id);

std::vector<std::uint8_t> encode_record(const IndexRecord& rec);
/// Throws StoreError{Corrupt} naming the failing check.
IndexRecord decode_record(std::span<const std::uint8_t> bytes);

std::filesystem::path record_path(const std::filesystem::path& store_dir, std::string_view id);

/// Writes a temp file and renames it over <id>.rec.
void put(const std::filesystem::path& store_dir, const IndexRecord& rec, bool overwrite = false);
IndexRecord get(const std::filesystem::path& store_dir, std::string_view id);
Listing list(const std::filesystem::path& store_dir);
/// Returns false if no such record.
bool remove(const std::filesystem::path& store_dir, std::string_view id);

namespace detail {
// The two halves of put(); exposed so tests can stop between them.
std::filesystem::path stage(const std::filesystem::path& store_dir, const IndexRecord& rec);
void commit(const std::filesystem::path& staged, const std::filesystem::path& store_dir,
            std::string_view id, bool overwrite);
}  // namespace detail

}  // namespace fpix::store
