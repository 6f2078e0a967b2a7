#include "fpix/crypto/random.hpp"

#include <sys/random.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <string>

#include "fpix/crypto/errors.hpp"
#include "fpix/crypto/sha256.hpp"

namespace fpix::crypto {

void SystemRandom::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        const ssize_t got = ::getrandom(out.data() + done, out.size() - done, 0);
        if (got < 0) {
            if (errno == EINTR) continue;
            throw RngError(std::string("getrandom failed: ") + std::strerror(errno));
        }
        done += static_cast<std::size_t>(got);
    }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pending_.empty()) {
            std::uint8_t block[16];
            for (int i = 0; i < 8; ++i) {
                block[i] = static_cast<std::uint8_t>(seed_ >> (56 - 8 * i));
                block[8 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
            }
            ++counter_;
            const Digest d = sha256(block);
            pending_.assign(d.begin(), d.end());
        }
        const std::size_t take = std::min(pending_.size(), out.size() - done);
        std::copy_n(pending_.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(done));
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));
        done += take;
    }
}

void ReplayRandom::fill(std::span<std::uint8_t> out) {
    if (remaining() < out.size()) throw RngError("replay random source exhausted");
    std::copy_n(script_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
    pos_ += out.size();
}

}  // namespace fpix::crypto
