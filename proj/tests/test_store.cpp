#include <doctest.h>

#include <fstream>
#include <unistd.h>

#include "fpix/crypto/index_cipher.hpp"
#include "fpix/store.hpp"
#include "oracles.hpp"

using namespace fpix;
using namespace fpix::store;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("fpix-store-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

IndexRecord make_record(const std::string& id, std::size_t dim = 3, std::uint64_t seed = 1) {
    crypto::SeededRandom rng(seed);
    IndexVector v{IndexMode::Svd, std::vector<double>(dim, 1.0)};
    const auto& c = crypto::toy_curve();
    const auto ct = crypto::encrypt_index(v, c.g, c, rng).to_bytes(c);
    return IndexRecord{id, IndexMode::Svd, static_cast<std::uint32_t>(dim), 1700000000ull + seed, ct};
}

StoreErrc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const StoreError& e) {
        return e.code();
    }
    FAIL("no StoreError thrown");
    return StoreErrc::Io;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                            static_cast<std::streamsize>(bytes.size()));
}

std::size_t count_files(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_CASE("record encoding layout") {
    const IndexRecord rec = make_record("alice", 2);
    const auto bytes = encode_record(rec);
    REQUIRE(bytes.size() == 4 + 1 + 1 + 4 + 8 + 1 + 5 + 4 + rec.ciphertext.size());
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FPIX");
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[5] == 0x01);
    CHECK(bytes[9] == 2);
    CHECK(bytes[18] == 5);
    CHECK(std::string(bytes.begin() + 19, bytes.begin() + 24) == "alice");
    CHECK(decode_record(bytes) == rec);
}

TEST_CASE("encode/decode roundtrip property") {
    oracle::Lcg rng(5);
    for (int i = 0; i < 50; ++i) {
        std::string id(1 + rng.below(64), 'x');
        for (char& ch : id) ch = "abcXYZ019_-"[rng.below(11)];
        const IndexRecord rec = make_record(id, 1 + rng.below(40), rng.next());
        CHECK(decode_record(encode_record(rec)) == rec);
    }
}

TEST_CASE("decode_record names the failing check") {
    const auto good = encode_record(make_record("bob"));
    const auto reason = [](std::vector<std::uint8_t> bytes) {
        try {
            decode_record(bytes);
        } catch (const StoreError& e) {
            CHECK(e.code() == StoreErrc::Corrupt);
            return std::string(e.what());
        }
        return std::string("ok");
    };
    auto b = good;
    b[0] = 'X';
    CHECK(reason(b).find("magic") != std::string::npos);
    b = good;
    b[4] = 2;
    CHECK(reason(b).find("version") != std::string::npos);
    b = good;
    b[5] = 9;
    CHECK(reason(b).find("mode") != std::string::npos);
    b = good;
    b.pop_back();
    CHECK(reason(b).find("length") != std::string::npos);
    b = good;
    b.push_back(0);
    CHECK(reason(b).find("length") != std::string::npos);
    b = good;
    b[9] = 4;  // dim no longer matches the ciphertext size
    CHECK(reason(b).find("length") != std::string::npos);
    b = good;
    b[19] = '/';
    CHECK(reason(b).find("id") != std::string::npos);
    b = good;
    b[26] = 0x05;  // point prefix
    CHECK(reason(b).find("point prefix") != std::string::npos);
    CHECK(reason({'F', 'P'}).find("truncated") != std::string::npos);
}

TEST_CASE("id validation") {
    CHECK(is_valid_id("alice"));
    CHECK(is_valid_id("A-b_9"));
    CHECK(is_valid_id(std::string(64, 'a')));
    CHECK_FALSE(is_valid_id(""));
    CHECK_FALSE(is_valid_id(std::string(65, 'a')));
    CHECK_FALSE(is_valid_id("a/b"));
    CHECK_FALSE(is_valid_id(".."));
    CHECK_FALSE(is_valid_id("a b"));
    CHECK_FALSE(is_valid_id("caf\xc3\xa9"));
}

TEST_CASE("put/get/list/remove") {
    TempDir dir("crud");
    const IndexRecord a = make_record("alice", 3, 1), b = make_record("bob", 5, 2);
    put(dir.path, b);
    put(dir.path, a);
    CHECK(get(dir.path, "alice") == a);
    CHECK(get(dir.path, "bob") == b);

    CHECK(code_of([&] { put(dir.path, a); }) == StoreErrc::Exists);
    CHECK(get(dir.path, "alice") == a);
    const IndexRecord a2 = make_record("alice", 4, 9);
    put(dir.path, a2, true);
    CHECK(get(dir.path, "alice") == a2);

    CHECK(code_of([&] { put(dir.path, make_record("a/b")); }) == StoreErrc::InvalidId);
    CHECK(code_of([&] { (void)get(dir.path, "carol"); }) == StoreErrc::NotFound);
    CHECK(code_of([&] { (void)get(dir.path, "../x"); }) == StoreErrc::InvalidId);
    CHECK(code_of([&] { put(dir.path / "missing", a); }) == StoreErrc::Io);

    const Listing l = list(dir.path);
    REQUIRE(l.records.size() == 2);
    CHECK(l.records[0].id == "alice");
    CHECK(l.records[0].dim == 4);
    CHECK(l.records[1].id == "bob");
    CHECK(l.corrupt.empty());

    CHECK(remove(dir.path, "bob"));
    CHECK_FALSE(remove(dir.path, "bob"));
    CHECK(list(dir.path).records.size() == 1);
    CHECK(count_files(dir.path) == 1);
}

TEST_CASE("list sorts bytewise and reports corrupt files") {
    TempDir dir("list");
    for (const char* id : {"b", "B", "a", "_z", "0"}) put(dir.path, make_record(id));
    write_bytes(dir.path / "bad.rec", {'N', 'O', 'P', 'E'});
    auto moved = encode_record(make_record("zed"));
    write_bytes(dir.path / "other.rec", moved);  // id inside does not match the name
    write_bytes(dir.path / "notes.txt", {'x'});

    const Listing l = list(dir.path);
    std::vector<std::string> ids;
    for (const auto& r : l.records) ids.push_back(r.id);
    CHECK(ids == std::vector<std::string>{"0", "B", "_z", "a", "b"});
    REQUIRE(l.corrupt.size() == 2);
    CHECK(l.corrupt[0].file == "bad.rec");
    CHECK(l.corrupt[1].file == "other.rec");
    CHECK(l.corrupt[1].reason.find("does not match") != std::string::npos);
    CHECK(code_of([&] { (void)get(dir.path, "bad"); }) == StoreErrc::Corrupt);
}

TEST_CASE("staging is invisible until commit") {
    TempDir dir("atomic");
    const IndexRecord rec = make_record("carol");
    const fs::path staged = detail::stage(dir.path, rec);
    CHECK(fs::exists(staged));
    CHECK_FALSE(fs::exists(record_path(dir.path, "carol")));
    CHECK(list(dir.path).records.empty());
    CHECK(list(dir.path).corrupt.empty());
    CHECK(code_of([&] { (void)get(dir.path, "carol"); }) == StoreErrc::NotFound);

    // A simulated crash: the staged file is abandoned. A later put still works.
    put(dir.path, rec);
    CHECK(get(dir.path, "carol") == rec);
    fs::remove(staged);

    // A racing writer that lost: commit without overwrite refuses and cleans up.
    const fs::path second = detail::stage(dir.path, make_record("carol", 3, 77));
    CHECK(code_of([&] { detail::commit(second, dir.path, "carol", false); }) == StoreErrc::Exists);
    CHECK_FALSE(fs::exists(second));
    CHECK(get(dir.path, "carol") == rec);
    CHECK(count_files(dir.path) == 1);
}
