#include "decoyqkd/reconciliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace decoyqkd {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
constexpr Count kVerificationBits = 64;

__extension__ using U128 = unsigned __int128;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
    const U128 p = static_cast<U128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & kMersenne61) + static_cast<std::uint64_t>(p >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

struct Pass {
    std::size_t block = 0;
    std::vector<std::uint32_t> order;  // pass position -> bit index
    std::vector<std::uint32_t> pos;    // bit index -> pass position
    std::vector<std::uint8_t> alice_parity;
    std::vector<std::uint8_t> bob_parity;
    std::vector<std::uint32_t> odd;  // candidate odd blocks
    // Alice's parities of sub-ranges already disclosed, keyed by (lo, hi).
    std::unordered_map<std::uint64_t, std::uint8_t> disclosed;

    std::size_t block_of(std::uint32_t bit) const { return pos[bit] / block; }
};

class Cascade {
  public:
    Cascade(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob)
        : alice_(alice), bob_(bob.begin(), bob.end()), n_(alice.size()) {}

    void run_pass(std::size_t block_size, Rng& rng, bool shuffle) {
        Pass p;
        p.block = std::max<std::size_t>(1, std::min(block_size, n_));
        p.order.resize(n_);
        std::iota(p.order.begin(), p.order.end(), 0u);
        if (shuffle) std::shuffle(p.order.begin(), p.order.end(), rng);
        p.pos.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) p.pos[p.order[j]] = static_cast<std::uint32_t>(j);

        const std::size_t blocks = (n_ + p.block - 1) / p.block;
        p.alice_parity.assign(blocks, 0);
        p.bob_parity.assign(blocks, 0);
        for (std::size_t j = 0; j < n_; ++j) {
            p.alice_parity[j / p.block] ^= alice_[p.order[j]];
            p.bob_parity[j / p.block] ^= bob_[p.order[j]];
        }
        leaked_per_pass_.push_back(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            if (p.alice_parity[b] != p.bob_parity[b]) p.odd.push_back(static_cast<std::uint32_t>(b));
        }
        passes_.push_back(std::move(p));
        drain();
    }

    ReconciliationResult finish(Rng& rng, bool verify) {
        ReconciliationResult r;
        r.leaked_per_pass = leaked_per_pass_;
        r.leaked_bits = std::accumulate(leaked_per_pass_.begin(), leaked_per_pass_.end(), Count{0});
        r.passes = static_cast<unsigned>(passes_.size());
        r.corrections = corrections_;
        if (verify) {
            const std::uint64_t key = rng() % kMersenne61;
            r.verification_bits = kVerificationBits;
            r.verified = polynomial_hash(bob_, key) == polynomial_hash(alice_, key);
            r.residual_error_estimate =
                r.verified ? static_cast<double>(n_) / static_cast<double>(kMersenne61) : 1.0;
        } else {
            r.verified = false;
            r.residual_error_estimate = 1.0;
        }
        r.corrected_bits = std::move(bob_);
        return r;
    }

  private:
    // Bisects an odd block of pass `p` down to one bit. Each step needs
    // Alice's parity of the left half; it is disclosed (and counted) only the
    // first time that half is asked for.
    std::uint32_t bisect(Pass& p, std::size_t block) {
        std::size_t lo = block * p.block;
        std::size_t hi = std::min(lo + p.block, n_);
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            std::uint8_t b = 0;
            for (std::size_t j = lo; j < mid; ++j) b ^= bob_[p.order[j]];
            const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | mid;
            auto [it, fresh] = p.disclosed.try_emplace(key, 0);
            if (fresh) {
                std::uint8_t a = 0;
                for (std::size_t j = lo; j < mid; ++j) a ^= alice_[p.order[j]];
                it->second = a;
                ++leaked_per_pass_.back();
            }
            const std::uint8_t a = it->second;
            if (a != b) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return p.order[lo];
    }

    void flip(std::uint32_t bit) {
        bob_[bit] ^= 1;
        ++corrections_;
        for (Pass& p : passes_) {
            const std::size_t b = p.block_of(bit);
            p.bob_parity[b] ^= 1;
            if (p.bob_parity[b] != p.alice_parity[b]) p.odd.push_back(static_cast<std::uint32_t>(b));
        }
    }

    // Corrects odd blocks until every block of every pass so far has even
    // relative parity, always working in the pass with the smallest blocks.
    void drain() {
        for (;;) {
            Pass* target = nullptr;
            for (Pass& p : passes_) {
                if (!p.odd.empty()) {
                    target = &p;
                    break;
                }
            }
            if (target == nullptr) return;
            const std::uint32_t block = target->odd.back();
            target->odd.pop_back();
            if (target->alice_parity[block] == target->bob_parity[block]) continue;
            flip(bisect(*target, block));
        }
    }

    std::span<const std::uint8_t> alice_;
    std::vector<std::uint8_t> bob_;
    std::size_t n_;
    std::vector<Pass> passes_;
    std::vector<Count> leaked_per_pass_;
    Count corrections_ = 0;
};

}  // namespace

std::uint64_t polynomial_hash(std::span<const std::uint8_t> bits, std::uint64_t key) {
    std::uint64_t h = 0;
    for (std::uint8_t b : bits) {
        h = mulmod61(h, key) + (b & 1u);
        if (h >= kMersenne61) h -= kMersenne61;
    }
    return h;
}

std::size_t cascade_first_block_size(double qber_estimate) {
    if (!(qber_estimate > 0.0 && qber_estimate < 0.5)) {
        throw std::invalid_argument("cascade: QBER estimate must lie in (0, 0.5)");
    }
    return static_cast<std::size_t>(std::ceil(0.73 / qber_estimate));
}

ReconciliationResult cascade_reconcile(std::span<const std::uint8_t> alice_bits,
                                       std::span<const std::uint8_t> bob_bits, double qber_estimate, Rng& rng,
                                       const CascadeOptions& options) {
    if (alice_bits.size() != bob_bits.size()) {
        throw std::invalid_argument("cascade: Alice has " + std::to_string(alice_bits.size()) + " bits, Bob " +
                                    std::to_string(bob_bits.size()));
    }
    if (alice_bits.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("cascade: string too long");
    }
    const std::size_t first =
        options.first_block_size != 0 ? options.first_block_size : cascade_first_block_size(qber_estimate);
    if (options.first_block_size != 0 && !(qber_estimate > 0.0 && qber_estimate < 0.5)) {
        throw std::invalid_argument("cascade: QBER estimate must lie in (0, 0.5)");
    }

    Cascade cascade(alice_bits, bob_bits);
    std::size_t block = first;
    for (unsigned pass = 0; pass < options.passes; ++pass) {
        cascade.run_pass(block, rng, pass > 0);
        block *= 2;
    }
    return cascade.finish(rng, options.verify);
}

}  // namespace decoyqkd
