#include "deform/rational.hpp"

#include <climits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace deform {
namespace {

using u128 = unsigned __int128;

u128 abs128(__int128 v) { return v < 0 ? u128(0) - u128(v) : u128(v); }

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        if ((a >> 64) == 0 && (b >> 64) == 0)
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        u128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

bool fits_small(__int128 v) { return v > INT64_MIN && v <= INT64_MAX; }

mpz_class mpz_from(__int128 v) {
    u128 mag = abs128(v);
    mpz_class hi(static_cast<unsigned long>(mag >> 64));
    mpz_class r = (hi << 64) + mpz_class(static_cast<unsigned long>(mag & ~std::uint64_t{0}));
    return v < 0 ? mpz_class(-r) : r;
}

bool small_mpz(const mpz_class& z) { return z.fits_slong_p() && z.get_si() != LONG_MIN; }

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(den < 0 ? -__int128(num) : __int128(num), den < 0 ? -__int128(den) : __int128(den));
}

Rational::Rational(const mpq_class& q) {
    mpq_class c(q);
    c.canonicalize();
    set_big(c);
}

Rational::Rational(const Rational& other)
    : num_(other.num_), den_(other.den_), big_(other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr) {}

Rational& Rational::operator=(const Rational& other) {
    if (this == &other) return *this;
    num_ = other.num_;
    den_ = other.den_;
    if (other.big_)
        big_ = std::make_unique<mpq_class>(*other.big_);
    else
        big_.reset();
    return *this;
}

void Rational::set_big(const mpq_class& q) {
    if (small_mpz(q.get_num()) && small_mpz(q.get_den())) {
        num_ = q.get_num().get_si();
        den_ = q.get_den().get_si();
        big_.reset();
    } else {
        num_ = 0;
        den_ = 1;
        big_ = std::make_unique<mpq_class>(q);
    }
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    Rational r;
    if (num == 0) return r;
    u128 g = gcd128(abs128(num), u128(den));
    if (g > 1) {
        num /= static_cast<__int128>(g);
        den /= static_cast<__int128>(g);
    }
    if (fits_small(num) && fits_small(den)) {
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
    } else {
        r.big_ = std::make_unique<mpq_class>(mpz_from(num), mpz_from(den));
    }
    return r;
}

Rational Rational::parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    auto check = [&](const std::string& part) {
        std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
        if (i == part.size()) throw std::invalid_argument("malformed rational '" + s + "'");
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9') throw std::invalid_argument("malformed rational '" + s + "'");
    };
    std::string n = slash == std::string::npos ? s : s.substr(0, slash);
    std::string d = slash == std::string::npos ? "1" : s.substr(slash + 1);
    check(n);
    check(d);
    if (n[0] == '+') n.erase(0, 1);
    if (d[0] == '+') d.erase(0, 1);
    mpz_class zn(n), zd(d);
    if (zd == 0) throw std::domain_error("rational with zero denominator");
    mpq_class q(zn, zd);
    q.canonicalize();
    Rational r;
    r.set_big(q);
    return r;
}

std::string Rational::str() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

mpq_class Rational::to_mpq() const {
    if (big_) return *big_;
    return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const { return big_ ? big_->get_num() : mpz_class(static_cast<long>(num_)); }
mpz_class Rational::denominator() const { return big_ ? big_->get_den() : mpz_class(static_cast<long>(den_)); }

bool Rational::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Rational::sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
}

Rational Rational::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (!big_) return num_ < 0 ? from_wide(-__int128(den_), -__int128(num_)) : from_wide(den_, num_);
    Rational r;
    r.set_big(1 / *big_);
    return r;
}

Rational Rational::operator-() const {
    Rational r(*this);
    if (r.big_)
        *r.big_ = -*r.big_;
    else
        r.num_ = -r.num_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (rhs.is_zero()) return *this;
    if (!big_ && !rhs.big_) {
        if (den_ == rhs.den_) {
            __int128 n = __int128(num_) + rhs.num_;
            if (den_ == 1 && fits_small(n)) {
                num_ = static_cast<std::int64_t>(n);
                return *this;
            }
            return *this = from_wide(n, den_);
        }
        return *this = from_wide(__int128(num_) * rhs.den_ + __int128(rhs.num_) * den_, __int128(den_) * rhs.den_);
    }
    set_big(to_mpq() + rhs.to_mpq());
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational operator*(const Rational& lhs, const Rational& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return {};
    if (!lhs.big_ && !rhs.big_) {
        if (lhs.den_ == 1 && rhs.den_ == 1) {
            __int128 n = __int128(lhs.num_) * rhs.num_;
            if (fits_small(n)) return Rational(static_cast<std::int64_t>(n));
        }
        return Rational::from_wide(__int128(lhs.num_) * rhs.num_, __int128(lhs.den_) * rhs.den_);
    }
    Rational r;
    r.set_big(lhs.to_mpq() * rhs.to_mpq());
    return r;
}

Rational& Rational::operator*=(const Rational& rhs) { return *this = *this * rhs; }
Rational& Rational::operator/=(const Rational& rhs) { return *this = *this * rhs.inverse(); }

void Rational::add_product(const Rational& a, const Rational& b) {
    if (a.is_zero() || b.is_zero()) return;
    if (!big_ && !a.big_ && !b.big_) {
        __int128 pn = __int128(a.num_) * b.num_;
        __int128 pd = __int128(a.den_) * b.den_;
        if (pd == 1 && den_ == 1) {
            __int128 n = pn + num_;
            if (fits_small(n)) {
                num_ = static_cast<std::int64_t>(n);
                return;
            }
        }
        if (pd == den_) {
            *this = from_wide(pn + num_, pd);
            return;
        }
        constexpr __int128 lim = __int128(1) << 62;
        if (pn < lim && pn > -lim && pd < lim) {
            // all factors below 2^62 keep the cross products inside 125 bits
            *this = from_wide(pn * den_ + __int128(num_) * pd, pd * den_);
            return;
        }
    }
    *this += a * b;
}

bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // canonical representation: a big value never equals a small one
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
        __int128 l = __int128(a.num_) * b.den_, r = __int128(b.num_) * a.den_;
        return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

}  // namespace deform
