#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace coweq {

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rational = boost::multiprecision::cpp_rational;

inline bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// Exact scalar in Q (p == 0) or F_p for a prime p < 2^31.
class Scalar {
  public:
    Scalar() : p_(0), q_(0), r_(0) {}
    static Scalar rational(Rational q) {
        Scalar s;
        s.q_ = std::move(q);
        return s;
    }
    static Scalar residue(std::uint64_t r, std::uint64_t p) {
        Scalar s;
        s.p_ = p;
        s.r_ = r % p;
        return s;
    }

    std::uint64_t characteristic() const { return p_; }
    bool is_zero() const { return p_ == 0 ? q_.is_zero() : r_ == 0; }
    const Rational& rational_value() const { return q_; }
    std::uint64_t residue_value() const { return r_; }

    Scalar operator-() const {
        Scalar s = *this;
        if (p_ == 0)
            s.q_ = -s.q_;
        else if (s.r_ != 0)
            s.r_ = p_ - s.r_;
        return s;
    }
    Scalar& operator+=(const Scalar& o) {
        match(o);
        if (p_ == 0)
            q_ += o.q_;
        else
            r_ = (r_ + o.r_) % p_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) { return *this += -o; }
    Scalar& operator*=(const Scalar& o) {
        match(o);
        if (p_ == 0)
            q_ *= o.q_;
        else
            r_ = (r_ * o.r_) % p_;
        return *this;
    }
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }

    Scalar inverse() const {
        if (is_zero()) throw validation_error("inverse of zero scalar");
        Scalar s = *this;
        if (p_ == 0) {
            s.q_ = 1 / q_;
        } else {
            // Fermat: r^(p-2) mod p.
            std::uint64_t base = r_, e = p_ - 2, acc = 1;
            while (e) {
                if (e & 1) acc = acc * base % p_;
                base = base * base % p_;
                e >>= 1;
            }
            s.r_ = acc;
        }
        return s;
    }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a *= b.inverse(); }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.p_ != b.p_) return false;
        return a.p_ == 0 ? a.q_ == b.q_ : a.r_ == b.r_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    std::string str() const {
        if (p_ == 0) {
            std::string s = numerator(q_).str();
            if (denominator(q_) != 1) s += "/" + denominator(q_).str();
            return s;
        }
        return std::to_string(r_) + " mod " + std::to_string(p_);
    }

  private:
    void match(const Scalar& o) const {
        if (p_ != o.p_) throw validation_error("scalars from different fields");
    }
    std::uint64_t p_;
    Rational q_;
    std::uint64_t r_;
};

// Field descriptor: characteristic 0 means Q, otherwise F_p.
struct Field {
    std::uint64_t p = 0;

    Field() = default;
    explicit Field(std::uint64_t characteristic) : p(characteristic) {
        if (p != 0 && (!is_prime(p) || p >= (1ull << 31)))
            throw validation_error("field characteristic must be 0 or a prime < 2^31");
    }

    Scalar zero() const { return of(0); }
    Scalar one() const { return of(1); }
    Scalar of(long long n) const {
        if (p == 0) return Scalar::rational(Rational(n));
        long long r = n % static_cast<long long>(p);
        if (r < 0) r += static_cast<long long>(p);
        return Scalar::residue(static_cast<std::uint64_t>(r), p);
    }
    // Accepts "a", "-a", "a/b" over Q; "r" or "r mod p" over F_p.
    Scalar parse(const std::string& text) const {
        auto mod_pos = text.find(" mod ");
        if (p == 0) {
            if (mod_pos != std::string::npos)
                throw validation_error("modular literal in a rational field: " + text);
            try {
                Rational q(text);
                if (denominator(q) == 0) throw validation_error("zero denominator: " + text);
                return Scalar::rational(q);
            } catch (const std::exception&) {
                throw validation_error("bad rational literal: " + text);
            }
        }
        std::string head = mod_pos == std::string::npos ? text : text.substr(0, mod_pos);
        if (mod_pos != std::string::npos) {
            std::uint64_t stated = std::stoull(text.substr(mod_pos + 5));
            if (stated != p)
                throw validation_error("literal modulus " + std::to_string(stated) +
                                       " does not match field F_" + std::to_string(p));
        }
        try {
            long long v = std::stoll(head);
            return of(v);
        } catch (const std::exception&) {
            throw validation_error("bad residue literal: " + text);
        }
    }

    friend bool operator==(const Field& a, const Field& b) { return a.p == b.p; }
};

}  // namespace coweq
