#include "potpoly/decimal.hpp"

#include <cctype>
#include <stdexcept>

namespace potpoly {

void Decimal::normalize() {
  if (mant_ == 0) {
    exp_ = 0;
    return;
  }
  while (mpz_divisible_ui_p(mant_.get_mpz_t(), 10)) {
    mant_ /= 10;
    ++exp_;
  }
}

Decimal Decimal::parse(const std::string& s) {
  size_t i = 0;
  auto fail = [&]() -> Decimal {
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  };
  if (s.empty()) return fail();
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = (s[i] == '-');
    ++i;
  }
  std::string digits;
  long exp = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits += s[i++];
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      --exp;
      any = true;
    }
  }
  if (!any) return fail();
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      eneg = (s[i] == '-');
      ++i;
    }
    if (i >= s.size()) return fail();
    long e = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i++] - '0');
      if (e > 1000000) return fail();
    }
    exp += eneg ? -e : e;
  }
  if (i != s.size()) return fail();
  mpz_class m(digits, 10);
  if (neg) m = -m;
  return Decimal(m, exp);
}

std::string Decimal::str() const {
  if (mant_ == 0) return "0";
  std::string digits = mant_.get_str();
  bool neg = digits[0] == '-';
  if (neg) digits.erase(0, 1);
  std::string out;
  if (exp_ >= 0) {
    if (exp_ <= 12) {
      out = digits + std::string(static_cast<size_t>(exp_), '0');
    } else {
      out = digits + "e" + std::to_string(exp_);
    }
  } else {
    long frac = -exp_;
    if (frac < static_cast<long>(digits.size())) {
      out = digits.substr(0, digits.size() - frac) + "." +
            digits.substr(digits.size() - frac);
    } else if (frac - static_cast<long>(digits.size()) <= 12) {
      out = "0." + std::string(static_cast<size_t>(frac - digits.size()), '0') + digits;
    } else {
      out = digits + "e" + std::to_string(exp_);
    }
  }
  return neg ? "-" + out : out;
}

Real Decimal::to_real(mpfr_prec_t prec) const {
  Real r(prec > 0 ? prec : Real::working_precision());
  mpfr_set_z(r.raw(), mant_.get_mpz_t(), MPFR_RNDN);
  Real ten(prec > 0 ? prec : Real::working_precision());
  mpfr_set_ui(ten.raw(), 10, MPFR_RNDN);
  if (exp_ != 0) r *= pow(ten, exp_);
  return r;
}

int Decimal::cmp(const Decimal& a, const Decimal& b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  // Align exponents exactly.
  long e = std::min(a.exp_, b.exp_);
  mpz_class ma = a.mant_, mb = b.mant_;
  mpz_class p10;
  if (a.exp_ > e) {
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(a.exp_ - e));
    ma *= p10;
  }
  if (b.exp_ > e) {
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(b.exp_ - e));
    mb *= p10;
  }
  return mpz_cmp(ma.get_mpz_t(), mb.get_mpz_t());
}

static Decimal add_aligned(const Decimal& a, const Decimal& b, bool sub) {
  long e = std::min(a.exponent(), b.exponent());
  mpz_class ma = a.mantissa(), mb = b.mantissa();
  mpz_class p10;
  if (a.exponent() > e) {
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(a.exponent() - e));
    ma *= p10;
  }
  if (b.exponent() > e) {
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(b.exponent() - e));
    mb *= p10;
  }
  return Decimal(sub ? mpz_class(ma - mb) : mpz_class(ma + mb), e);
}

Decimal operator+(const Decimal& a, const Decimal& b) { return add_aligned(a, b, false); }
Decimal operator-(const Decimal& a, const Decimal& b) { return add_aligned(a, b, true); }
Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal(a.mant_ * b.mant_, a.exp_ + b.exp_);
}

}  // namespace potpoly
