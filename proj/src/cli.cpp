#include "fpix/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "fpix/crypto/curve.hpp"
#include "fpix/crypto/errors.hpp"
#include "fpix/crypto/index_cipher.hpp"
#include "fpix/image.hpp"
#include "fpix/indexing.hpp"
#include "fpix/matcher.hpp"
#include "fpix/store.hpp"

namespace fpix::cli {

namespace fs = std::filesystem;
using crypto::CurveParams;

namespace {

enum class OutputFormat { Text, Tsv };

struct CliConfig {
    std::string curve = "secp192r1";
    std::string mode = "svd";
    std::size_t k = kDefaultIndexDim;
    std::string db;
    std::string format = "text";
    std::optional<std::uint64_t> seed;
};

// Domain rejection that maps to exit code 1.
class Rejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CurveParams resolve_curve(const std::string& source) {
    if (source == "toy" || source == "secp192r1") return crypto::builtin_curve(source);
    return crypto::load_curve_file(source);
}

std::unique_ptr<crypto::RandomSource> make_rng(const std::optional<std::uint64_t>& seed,
                                               std::string_view salt = {}) {
    if (!seed) return std::make_unique<crypto::SystemRandom>();
    if (salt.empty()) return std::make_unique<crypto::SeededRandom>(*seed);
    // Distinct records enrolled under one --seed get distinct ephemeral scalars.
    crypto::Sha256 h;
    std::uint8_t be[8];
    for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(*seed >> (56 - 8 * i));
    const auto d = h.update(be).update(salt).finish();
    std::uint64_t mixed = 0;
    for (int i = 0; i < 8; ++i) mixed = mixed << 8 | d[i];
    return std::make_unique<crypto::SeededRandom>(mixed);
}

std::string require_db(const CliConfig& cfg) {
    if (!cfg.db.empty()) return cfg.db;
    if (const char* env = std::getenv("FPIX_DB"); env && *env) return env;
    throw std::runtime_error("no store directory: pass --db or set FPIX_DB");
}

OutputFormat output_format(const CliConfig& cfg) {
    if (cfg.format == "tsv") return OutputFormat::Tsv;
    return OutputFormat::Text;
}

std::string format_seconds(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << s;
    return os.str();
}

// ---- keygen ---------------------------------------------------------------

struct KeygenArgs {
    std::string out;
    bool force = false;
};

int cmd_keygen(const CliConfig& cfg, const KeygenArgs& a, std::ostream& out) {
    const CurveParams curve = resolve_curve(cfg.curve);
    const std::string sec_path = a.out + ".sec";
    const std::string pub_path = a.out + ".pub";
    if (!a.force) {
        for (const auto& p : {sec_path, pub_path})
            if (fs::exists(p)) throw std::runtime_error("key file '" + p + "' exists (use --force to overwrite)");
    }
    auto rng = make_rng(cfg.seed);
    const crypto::KeyPair kp = crypto::keygen(curve, *rng);
    crypto::write_key_file(sec_path, crypto::format_private_key(kp.d), true);
    fs::permissions(sec_path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
    const std::string pub_hex = crypto::format_public_key(kp.q, curve);
    crypto::write_key_file(pub_path, pub_hex, true);
    out << "curve: " << curve.name << '\n' << "public: " << pub_hex << '\n';
    return kExitOk;
}

// ---- enroll ---------------------------------------------------------------

struct EnrollArgs {
    std::string image;
    std::string id;
    std::string pub;
    bool overwrite = false;
};

int cmd_enroll(const CliConfig& cfg, const EnrollArgs& a, std::ostream& out) {
    const CurveParams curve = resolve_curve(cfg.curve);
    const fs::path db = require_db(cfg);
    if (!store::is_valid_id(a.id)) throw std::runtime_error("invalid id '" + a.id + "': need 1-64 characters of [A-Za-z0-9_-]");
    if (!a.overwrite && fs::exists(store::record_path(db, a.id))) {
        throw Rejected("record '" + a.id + "' already exists");
    }
    const IndexMode mode = parse_index_mode(cfg.mode);
    const auto q = crypto::parse_public_key(crypto::read_key_file(a.pub), curve);
    const GrayImage img = load_pgm_file(a.image);
    const IndexVector index = compute_index(img, mode, cfg.k);

    auto rng = make_rng(cfg.seed, a.id);
    const auto ct = crypto::encrypt_index(index, q, curve, *rng).to_bytes(curve);

    store::IndexRecord rec;
    rec.id = a.id;
    rec.mode = index.mode;
    rec.dim = static_cast<std::uint32_t>(index.dim());
    rec.created = static_cast<std::uint64_t>(std::time(nullptr));
    rec.ciphertext = ct;
    fs::create_directories(db);
    store::put(db, rec, a.overwrite);
    out << "enrolled " << rec.id << " mode=" << to_string(rec.mode) << " dim=" << rec.dim
        << " ciphertext=" << ct.size() << " bytes\n";
    return kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
    std::string image;
    std::string sec;
    std::optional<double> threshold;
};

std::vector<LabeledIndex> decrypt_store(const fs::path& db, const crypto::BigInt& d, const CurveParams& curve) {
    const store::Listing listing = store::list(db);
    if (!listing.corrupt.empty()) {
        const auto& c = listing.corrupt.front();
        throw std::runtime_error("store contains a corrupt record " + c.file + ": " + c.reason);
    }
    if (listing.records.empty()) throw std::runtime_error("store '" + db.string() + "' has no records");
    std::vector<LabeledIndex> out;
    for (const auto& summary : listing.records) {
        const store::IndexRecord rec = store::get(db, summary.id);
        IndexVector v;
        try {
            v = crypto::decrypt_index(d, rec.ciphertext, curve);
        } catch (const crypto::CryptoError& e) {
            throw std::runtime_error("record '" + rec.id + "': " + e.what());
        }
        if (v.mode != rec.mode || v.dim() != rec.dim) {
            throw std::runtime_error("record '" + rec.id + "': header mode/dim disagree with decrypted index");
        }
        out.emplace_back(rec.id, std::move(v));
    }
    return out;
}

int cmd_verify(const CliConfig& cfg, const VerifyArgs& a, std::ostream& out) {
    const CurveParams curve = resolve_curve(cfg.curve);
    const fs::path db = require_db(cfg);
    const IndexMode mode = parse_index_mode(cfg.mode);
    if (a.threshold && !(*a.threshold > 0.0)) throw std::runtime_error("--threshold must be positive");
    const auto d = crypto::parse_private_key(crypto::read_key_file(a.sec), curve);
    const GrayImage img = load_pgm_file(a.image);

    const auto records = decrypt_store(db, d, curve);
    const IndexVector query = compute_index(img, mode, cfg.k);

    double threshold = kExactMatchThreshold;
    std::string source = "exact-match default";
    if (a.threshold) {
        threshold = *a.threshold;
        source = "override";
    } else if (records.size() >= 2) {
        const double suggested = suggest_threshold(similarity_matrix(records));
        if (suggested > 0.0) {
            threshold = suggested;
            source = "suggested";
        }
    }
    const MatchDecision m = decide(query, records, threshold);
    if (output_format(cfg) == OutputFormat::Tsv) {
        out << "best\tdistance\tthreshold\tdecision\n"
            << m.best_id << '\t' << format_distance(m.distance) << '\t' << format_distance(m.threshold) << '\t'
            << (m.accepted ? "ACCEPT" : "REJECT") << '\n';
    } else {
        out << "best: " << m.best_id << '\n'
            << "distance: " << format_distance(m.distance) << '\n'
            << "threshold: " << format_distance(m.threshold) << " (" << source << ")\n"
            << (m.accepted ? "ACCEPT" : "REJECT") << '\n';
    }
    return m.accepted ? kExitOk : kExitRejected;
}

// ---- list -----------------------------------------------------------------

int cmd_list(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const fs::path db = require_db(cfg);
    const store::Listing listing = store::list(db);
    const bool tsv = output_format(cfg) == OutputFormat::Tsv;
    out << (tsv ? "id\tmode\tdim\tcreated\n" : "");
    for (const auto& r : listing.records) {
        if (tsv) {
            out << r.id << '\t' << to_string(r.mode) << '\t' << r.dim << '\t' << r.created << '\n';
        } else {
            out << std::left << std::setw(24) << r.id << ' ' << std::setw(5) << to_string(r.mode) << ' '
                << std::setw(6) << r.dim << ' ' << r.created << '\n';
        }
    }
    for (const auto& c : listing.corrupt) err << "corrupt: " << c.file << ": " << c.reason << '\n';
    return listing.corrupt.empty() ? kExitOk : kExitError;
}

// ---- matrix ---------------------------------------------------------------

struct MatrixArgs {
    std::string dir;
};

void print_matrix(const SimilarityMatrix& m, OutputFormat fmt, std::ostream& out) {
    if (fmt == OutputFormat::Tsv) {
        out << "label";
        for (const auto& l : m.labels) out << '\t' << l;
        out << '\n';
        for (std::size_t i = 0; i < m.size(); ++i) {
            out << m.labels[i];
            for (std::size_t j = 0; j < m.size(); ++j) out << '\t' << format_distance(m.d[i][j]);
            out << '\n';
        }
        return;
    }
    std::size_t width = 10;
    for (const auto& l : m.labels) width = std::max(width, l.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) width = std::max(width, format_distance(m.d[i][j]).size());
    out << std::setw(static_cast<int>(width)) << "";
    for (const auto& l : m.labels) out << "  " << std::setw(static_cast<int>(width)) << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << std::setw(static_cast<int>(width)) << m.labels[i];
        for (std::size_t j = 0; j < m.size(); ++j)
            out << "  " << std::setw(static_cast<int>(width)) << format_distance(m.d[i][j]);
        out << '\n';
    }
}

int cmd_matrix(const CliConfig& cfg, const MatrixArgs& a, std::ostream& out) {
    if (!fs::is_directory(a.dir)) throw std::runtime_error("image directory '" + a.dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2) {
        throw std::runtime_error("image directory '" + a.dir + "' holds " + std::to_string(files.size()) +
                                 " PGM files; need at least 2");
    }
    const IndexMode mode = parse_index_mode(cfg.mode);
    std::vector<LabeledIndex> entries;
    for (const auto& f : files) entries.emplace_back(f.stem().string(), compute_index(load_pgm_file(f.string()), mode, cfg.k));

    const SimilarityMatrix m = similarity_matrix(entries);
    const OutputFormat fmt = output_format(cfg);
    print_matrix(m, fmt, out);
    const std::string t = format_distance(suggest_threshold(m));
    out << (fmt == OutputFormat::Tsv ? "# suggested_threshold\t" : "suggested threshold: ") << t << '\n';
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string image;
    std::size_t size = 256;
    std::string pub;
    std::string sec;
    int reps = 10;
    bool compare_pca = false;
};

template <typename F>
double median_seconds(int reps, F&& body) {
    body();  // warm-up
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    return n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

void print_table(const std::vector<std::string>& headers, const std::vector<double>& seconds, OutputFormat fmt,
                 std::ostream& out) {
    if (fmt == OutputFormat::Tsv) {
        for (std::size_t i = 0; i < headers.size(); ++i) out << (i ? "\t" : "") << headers[i];
        out << '\n';
        for (std::size_t i = 0; i < seconds.size(); ++i) out << (i ? "\t" : "") << format_seconds(seconds[i]);
        out << '\n';
        return;
    }
    for (std::size_t i = 0; i < headers.size(); ++i) out << std::left << std::setw(20) << headers[i];
    out << '\n';
    for (std::size_t i = 0; i < seconds.size(); ++i)
        out << std::left << std::setw(20) << (format_seconds(seconds[i]) + " [s]");
    out << '\n';
}

int cmd_bench(const CliConfig& cfg, const BenchArgs& a, std::ostream& out) {
    if (a.reps < 10) throw std::runtime_error("--reps must be at least 10");
    const CurveParams curve = resolve_curve(cfg.curve);
    const IndexMode mode = parse_index_mode(cfg.mode);
    const GrayImage img = a.image.empty() ? synth_image(SynthKind::Blob, a.size, a.size, cfg.seed.value_or(1))
                                          : load_pgm_file(a.image);

    auto rng = make_rng(cfg.seed);
    crypto::KeyPair kp;
    if (!a.sec.empty()) {
        kp = crypto::keypair_from_private(crypto::parse_private_key(crypto::read_key_file(a.sec), curve), curve);
        if (!a.pub.empty() && !(crypto::parse_public_key(crypto::read_key_file(a.pub), curve) == kp.q)) {
            throw std::runtime_error("public key does not match private key");
        }
    } else if (!a.pub.empty()) {
        throw std::runtime_error("bench needs the private key (--sec) to time decryption");
    } else {
        kp = crypto::keygen(curve, *rng);
    }

    const IndexVector index = compute_index(img, mode, cfg.k);
    const auto ct = crypto::encrypt_index(index, kp.q, curve, *rng).to_bytes(curve);

    const double t_index = median_seconds(a.reps, [&] { (void)compute_index(img, mode, cfg.k); });
    const double t_enc = median_seconds(a.reps, [&] { (void)crypto::encrypt_index(index, kp.q, curve, *rng); });
    const double t_dec = median_seconds(a.reps, [&] { (void)crypto::decrypt_index(kp.d, ct, curve); });

    const OutputFormat fmt = output_format(cfg);
    out << "# image " << img.width() << "x" << img.height() << " mode=" << to_string(mode)
        << " k=" << cfg.k << " curve=" << curve.name << " reps=" << a.reps << " (median)\n";
    print_table({"Indexing time", "Encryption time", "Decryption time"}, {t_index, t_enc, t_dec}, fmt, out);

    if (a.compare_pca) {
        const double t_svd = median_seconds(a.reps, [&] { (void)compute_index(img, IndexMode::Svd, cfg.k); });
        const double t_pca = median_seconds(a.reps, [&] { (void)compute_index(img, IndexMode::Pca, cfg.k); });
        print_table({"SVD indexing time", "PCA indexing time"}, {t_svd, t_pca}, fmt, out);
    }
    return kExitOk;
}

}  // namespace

std::string format_distance(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    if (std::abs(value) < 1e3) {
        std::snprintf(buf, sizeof buf, "%.4f", value);
        // 999.99995 rounds up to "1000.0000" and belongs in scientific form.
        if (std::abs(std::strtod(buf, nullptr)) < 1e3) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.4e", value);
    std::string s = buf;
    const auto e = s.find('e');
    std::string mantissa = s.substr(0, e);
    const char sign = s[e + 1];
    const int exponent = std::stoi(s.substr(e + 2));
    return mantissa + "e" + sign + std::to_string(exponent);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Encrypted biometric index vault", "fpix"};
    app.require_subcommand(1);

    CliConfig cfg;
    app.add_option("--curve", cfg.curve, "Curve: toy, secp192r1 or a parameter file")->capture_default_str();
    app.add_option("--mode", cfg.mode, "Index mode")->check(CLI::IsMember({"svd", "hist", "pca"}))->capture_default_str();
    app.add_option("--k", cfg.k, "Index dimension (svd/pca)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--db", cfg.db, "Store directory (default: $FPIX_DB)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "tsv"}))->capture_default_str();
    app.add_option("--seed", cfg.seed, "Deterministic randomness for testing");

    KeygenArgs keygen;
    auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key pair");
    keygen_cmd->add_option("--out", keygen.out, "Output prefix for <prefix>.sec and <prefix>.pub")->required();
    keygen_cmd->add_flag("--force", keygen.force, "Overwrite existing key files");

    EnrollArgs enroll;
    auto* enroll_cmd = app.add_subcommand("enroll", "Index, encrypt and store an image");
    enroll_cmd->add_option("--image", enroll.image, "PGM image")->required();
    enroll_cmd->add_option("--id", enroll.id, "Record id")->required();
    enroll_cmd->add_option("--pub", enroll.pub, "Public key file")->required();
    enroll_cmd->add_flag("--overwrite", enroll.overwrite, "Replace an existing record");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Match a query image against the store");
    verify_cmd->add_option("--image", verify.image, "Query PGM image")->required();
    verify_cmd->add_option("--sec", verify.sec, "Private key file")->required();
    verify_cmd->add_option("--threshold", verify.threshold, "Accept distance (overrides the suggestion)");

    auto* list_cmd = app.add_subcommand("list", "List stored records");

    MatrixArgs matrix;
    auto* matrix_cmd = app.add_subcommand("matrix", "Pairwise index distances over a directory of PGM images");
    matrix_cmd->add_option("--dir,dir", matrix.dir, "Image directory")->required();

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time indexing, encryption and decryption");
    bench_cmd->add_option("--image", bench.image, "PGM image (default: synthetic blob)");
    bench_cmd->add_option("--size", bench.size, "Synthetic image side length")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--pub", bench.pub, "Public key file");
    bench_cmd->add_option("--sec", bench.sec, "Private key file (default: fresh key pair)");
    bench_cmd->add_option("--reps", bench.reps, "Timed repetitions (>= 10)")->capture_default_str();
    bench_cmd->add_flag("--compare-pca", bench.compare_pca, "Also time PCA against SVD indexing");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*keygen_cmd) return cmd_keygen(cfg, keygen, out);
        if (*enroll_cmd) return cmd_enroll(cfg, enroll, out);
        if (*verify_cmd) return cmd_verify(cfg, verify, out);
        if (*list_cmd) return cmd_list(cfg, out, err);
        if (*matrix_cmd) return cmd_matrix(cfg, matrix, out);
        if (*bench_cmd) return cmd_bench(cfg, bench, out);
    } catch (const Rejected& e) {
        err << "rejected: " << e.what() << '\n';
        return kExitRejected;
    } catch (const store::StoreError& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == store::StoreErrc::Exists ? kExitRejected : kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace fpix::cli
