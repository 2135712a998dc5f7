#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bcz {

/// One reduced fraction p/q of the Farey sequence F(n), with its position.
struct FareyFraction {
    std::int64_t p = 0;
    std::int64_t q = 1;
    std::int64_t index = 0;

    friend bool operator==(const FareyFraction&, const FareyFraction&) = default;
};

/// Order n together with A_n = |F(n)| - 1 = sum of phi(k), k <= n.
struct FareyLength {
    std::int64_t n = 0;
    std::int64_t a_n = 0;
};

/// Streaming generator for F(n): 0/1, 1/n, ..., 1/1 in increasing order.
///
/// Uses the neighbor recurrence
///   k = floor((n + q_{i-1}) / q_i),  p_{i+1} = k p_i - p_{i-1},
///   q_{i+1} = k q_i - q_{i-1}
/// and keeps only the two-term window, so memory is O(1) regardless of A_n.
class FareyStream {
public:
    explicit FareyStream(std::int64_t n) : n_(n) {
        if (n < 1) throw std::domain_error("Farey order must be >= 1");
        if (n > (std::int64_t{1} << 31)) throw std::domain_error("Farey order exceeds 2^31");
    }

    std::int64_t order() const { return n_; }

    /// Next fraction, or nullopt once 1/1 has been yielded.
    std::optional<FareyFraction> next() {
        if (done_) return std::nullopt;
        FareyFraction out;
        if (index_ == 0) {
            out = FareyFraction{0, 1, 0};
            p2_ = 1;
            q2_ = n_;
        } else {
            out = FareyFraction{p2_, q2_, index_};
            if (p2_ == q2_) {
                done_ = true;
            } else {
                const std::int64_t k = (n_ + q1_) / q2_;
                const std::int64_t p3 = k * p2_ - p1_;
                const std::int64_t q3 = k * q2_ - q1_;
                p1_ = p2_;
                q1_ = q2_;
                p2_ = p3;
                q2_ = q3;
            }
        }
        ++index_;
        return out;
    }

private:
    std::int64_t n_;
    std::int64_t p1_ = 0, q1_ = 1;  // previous term
    std::int64_t p2_ = 0, q2_ = 1;  // current term
    std::int64_t index_ = 0;
    bool done_ = false;
};

/// Exact A_n by totient sieve, O(n log log n) time and O(n) memory.
inline FareyLength farey_length(std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    std::vector<std::int64_t> phi(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) phi[static_cast<std::size_t>(i)] = i;
    for (std::int64_t p = 2; p <= n; ++p) {
        if (phi[static_cast<std::size_t>(p)] == p) {  // p prime
            for (std::int64_t m = p; m <= n; m += p)
                phi[static_cast<std::size_t>(m)] -= phi[static_cast<std::size_t>(m)] / p;
        }
    }
    std::int64_t sum = 0;
    for (std::int64_t k = 1; k <= n; ++k) sum += phi[static_cast<std::size_t>(k)];
    return FareyLength{n, sum};
}

/// Denominators q_0 = 1, q_1 = n, ..., q_{A_n} = 1 of F(n). These drive the
/// periodic orbit T^k(1/n, 1) = (q_k/n, q_{k+1}/n).
class DenominatorStream {
public:
    explicit DenominatorStream(std::int64_t n) : stream_(n) {}

    std::optional<std::int64_t> next() {
        auto f = stream_.next();
        if (!f) return std::nullopt;
        return f->q;
    }

private:
    FareyStream stream_;
};

}  // namespace bcz
