#include "entlayer/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace entlayer {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

mpz_class pow10(unsigned long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
    return r;
}

Rational parse_decimal(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
            exp_negative = exp.front() == '-';
            exp.remove_prefix(1);
        }
        if (!all_digits(exp) || exp.size() > 4) {
            throw std::invalid_argument("bad exponent");
        }
        exponent = std::stol(std::string(exp));
        if (exp_negative) {
            exponent = -exponent;
        }
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
            (whole.empty() && frac.empty())) {
            throw std::invalid_argument("bad decimal");
        }
        digits = std::string(whole) + std::string(frac);
        exponent -= static_cast<long>(frac.size());
    } else {
        if (!all_digits(s)) {
            throw std::invalid_argument("bad number");
        }
        digits = std::string(s);
    }
    Rational r{mpz_class(digits, 10)};
    if (exponent > 0) {
        r *= pow10(static_cast<unsigned long>(exponent));
    } else if (exponent < 0) {
        r /= pow10(static_cast<unsigned long>(-exponent));
    }
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && text.front() == ' ') {
        text.remove_prefix(1);
    }
    while (!text.empty() && text.back() == ' ') {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        throw std::invalid_argument("empty number");
    }
    try {
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            std::string_view num = text.substr(0, slash);
            std::string_view den = text.substr(slash + 1);
            std::string_view num_digits = num;
            if (!num_digits.empty() && num_digits.front() == '-') {
                num_digits.remove_prefix(1);
            }
            if (!all_digits(num_digits) || !all_digits(den)) {
                throw std::invalid_argument("bad fraction");
            }
            mpz_class d(std::string(den), 10);
            if (d == 0) {
                throw std::invalid_argument("zero denominator");
            }
            Rational r(mpz_class(std::string(num), 10), d);
            r.canonicalize();
            return r;
        }
        return parse_decimal(text);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
}

std::string to_fraction_string(const Rational& r) { return r.get_str(); }

double surprisal_term(const Rational& p) {
    if (sgn(p) <= 0) {
        return 0.0;
    }
    double d = p.get_d();
    return -d * std::log2(d);
}

}  // namespace entlayer
