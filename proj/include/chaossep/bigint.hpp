#ifndef CHAOSSEP_BIGINT_HPP
#define CHAOSSEP_BIGINT_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaossep {

/// Minimal arbitrary-precision unsigned integer. Only the operations the
/// toolkit needs: addition (delta recursions), multiplication by a small
/// factor (capacity products), comparison, and decimal/double conversion.
class BigUInt {
public:
    BigUInt() : limbs_{0} {}

    explicit BigUInt(std::uint64_t v) {
        limbs_.clear();
        do {
            limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
            v /= kBase;
        } while (v != 0);
    }

    bool is_zero() const { return limbs_.size() == 1 && limbs_[0] == 0; }

    BigUInt& operator+=(const BigUInt& rhs) {
        const std::size_t n = std::max(limbs_.size(), rhs.limbs_.size());
        limbs_.resize(n, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t s = carry + limbs_[i];
            if (i < rhs.limbs_.size()) s += rhs.limbs_[i];
            limbs_[i] = static_cast<std::uint32_t>(s % kBase);
            carry = s / kBase;
        }
        if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
        return *this;
    }

    friend BigUInt operator+(BigUInt a, const BigUInt& b) { return a += b; }

    /// Multiply in place by a factor below 2^32 (limb * factor stays in 64 bits).
    BigUInt& mul_small(std::uint64_t m) {
        if (m > std::numeric_limits<std::uint32_t>::max())
            throw std::invalid_argument("BigUInt::mul_small: factor too large");
        std::uint64_t carry = 0;
        for (auto& limb : limbs_) {
            std::uint64_t prod = static_cast<std::uint64_t>(limb) * m + carry;
            limb = static_cast<std::uint32_t>(prod % kBase);
            carry = prod / kBase;
        }
        while (carry) {
            limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
        return *this;
    }

    friend bool operator==(const BigUInt& a, const BigUInt& b) { return a.limbs_ == b.limbs_; }

    friend bool operator<(const BigUInt& a, const BigUInt& b) {
        if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size();
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
        }
        return false;
    }
    friend bool operator<=(const BigUInt& a, const BigUInt& b) { return a < b || a == b; }

    double to_double() const {
        long double acc = 0.0L;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            acc = acc * kBase + limbs_[i];
            if (acc > std::numeric_limits<double>::max()) return std::numeric_limits<double>::infinity();
        }
        return static_cast<double>(acc);
    }

    /// True when this integer is <= the (finite) real threshold.
    bool fits_below(long double threshold) const {
        long double acc = 0.0L;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            acc = acc * kBase + limbs_[i];
            if (acc > threshold) return false;
        }
        return acc <= threshold;
    }

    std::string to_string() const {
        std::string out = std::to_string(limbs_.back());
        for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
            std::string part = std::to_string(limbs_[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

private:
    static constexpr std::uint64_t kBase = 1'000'000'000;

    std::vector<std::uint32_t> limbs_;  // little-endian base-1e9 limbs
};

}  // namespace chaossep

#endif
