#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace toricount {

// Exact rational on __int128. Enough headroom for normalized residue counts
// M*_p(m)/p^{m(n+r-1)} and count/2^r quotients at desk scale; throws on overflow.
class Rat {
public:
    Rat() = default;
    Rat(long long v) : num_(v), den_(1) {}
    Rat(__int128 num, __int128 den) : num_(num), den_(den) { normalize(); }

    __int128 num() const { return num_; }
    __int128 den() const { return den_; }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
        return Rat(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        std::string s = int128_str(num_);
        if (den_ != 1) s += "/" + int128_str(den_);
        return s;
    }

    static std::string int128_str(__int128 v) {
        if (v == 0) return "0";
        bool neg = v < 0;
        unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
        std::string s;
        while (u) { s += char('0' + int(u % 10)); u /= 10; }
        if (neg) s += '-';
        return std::string(s.rbegin(), s.rend());
    }

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("Rat: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        __int128 a = num_ < 0 ? -num_ : num_, b = den_;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { num_ /= a; den_ /= a; }
    }

    __int128 num_ = 0;
    __int128 den_ = 1;
};

}  // namespace toricount
