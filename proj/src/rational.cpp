#include "sforest/rational.hpp"

#include <cctype>

#include "sforest/errors.hpp"

namespace sforest {

std::string to_string(const Rational& q) {
    Rational c(q);
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}

std::string strip_sign(const std::string& s, bool& negative) {
    negative = !s.empty() && s[0] == '-';
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) return s.substr(1);
    return s;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    bool neg = false;
    std::string body = strip_sign(text, neg);
    Rational out;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string::npos) {
        std::string p = body.substr(0, slash), q = body.substr(slash + 1);
        if (!all_digits(p) || !all_digits(q)) throw InvalidInput("not a rational: " + text);
        mpz_class den(q, 10);
        if (den == 0) throw InvalidInput("zero denominator: " + text);
        out = Rational(mpz_class(p, 10), den);
    } else if (dot != std::string::npos) {
        std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || (!fp.empty() && !all_digits(fp)))
            throw InvalidInput("not a rational: " + text);
        mpz_class scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        out = Rational(mpz_class(ip + fp, 10), scale);
    } else {
        if (!all_digits(body)) throw InvalidInput("not a rational: " + text);
        out = Rational(mpz_class(body, 10));
    }
    out.canonicalize();
    return neg ? Rational(-out) : out;
}

}  // namespace sforest
