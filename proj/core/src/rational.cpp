#include "cfsyn/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace cfsyn::rat {

Rational make(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational from_string(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = from_string(s.substr(0, slash));
        Rational den = from_string(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
        return Rational(num / den);
    }

    // Split off a decimal exponent if present ("1.5e-3").
    long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        const std::string epart = s.substr(epos + 1);
        if (epart.empty()) throw std::invalid_argument("bad numeric literal: " + text);
        char* end = nullptr;
        exp10 = std::strtol(epart.c_str(), &end, 10);
        if (*end != '\0') throw std::invalid_argument("bad numeric literal: " + text);
        s = s.substr(0, epos);
    }

    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = (s[i] == '-');
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw std::invalid_argument("bad numeric literal: " + text);
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            digits += s[i];
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else {
            throw std::invalid_argument("bad numeric literal: " + text);
        }
    }
    if (!seen_digit) throw std::invalid_argument("bad numeric literal: " + text);

    // explicit base 10: the single-argument constructor auto-detects C
    // prefixes, so a leading zero would silently parse as octal
    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    if (negative) mantissa = -mantissa;

    Rational q(mantissa);
    long net = exp10 - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
    if (net >= 0)
        q *= Rational(pow10);
    else
        q /= Rational(pow10);
    q.canonicalize();
    return q;
}

std::string to_decimal_string(const Rational& q, int significant_digits) {
    if (q == 0) return "0";
    if (significant_digits < 1) significant_digits = 1;
    // 4 bits per decimal digit plus slack keeps the mpf approximation from
    // contaminating the requested digits.
    const auto prec_bits = static_cast<mp_bitcnt_t>(significant_digits * 4 + 64);
    mpf_class f(q, prec_bits);
    mp_exp_t exp10 = 0;
    std::string digits = f.get_str(exp10, 10, static_cast<std::size_t>(significant_digits));

    bool negative = false;
    if (!digits.empty() && digits[0] == '-') {
        negative = true;
        digits.erase(digits.begin());
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

    std::ostringstream out;
    if (negative) out << '-';
    // get_str returns 0.<digits> * 10^exp10; render without an exponent when
    // the magnitude is moderate, scientific otherwise.
    if (exp10 >= 1 && exp10 <= 40 && static_cast<std::size_t>(exp10) >= digits.size()) {
        out << digits << std::string(static_cast<std::size_t>(exp10) - digits.size(), '0');
    } else if (exp10 >= 1 && exp10 <= 40) {
        out << digits.substr(0, static_cast<std::size_t>(exp10)) << '.'
            << digits.substr(static_cast<std::size_t>(exp10));
    } else if (exp10 <= 0 && exp10 > -8) {
        out << "0." << std::string(static_cast<std::size_t>(-exp10), '0') << digits;
    } else {
        out << digits.substr(0, 1);
        if (digits.size() > 1) out << '.' << digits.substr(1);
        out << 'e' << (exp10 - 1);
    }
    return out.str();
}

double to_double(const Rational& q) {
    if (q == 0) return 0.0;
    // 25 significant digits pin the nearest double uniquely (17 suffice);
    // strtod performs the final correctly rounded conversion.
    return std::strtod(to_decimal_string(q, 25).c_str(), nullptr);
}

Rational factorial(unsigned k) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), k);
    return Rational(f);
}

}  // namespace cfsyn::rat
