#include "qcylab/exact_scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace qcylab {

namespace {

Integer pollard_rho(const Integer& n, unsigned long c0) {
    // n odd composite, no factors below the trial-division bound.
    Integer x(2), y(2), d(1), c(c0), diff;
    while (d == 1) {
        x = (x * x + c) % n;
        y = (y * y + c) % n;
        y = (y * y + c) % n;
        diff = x - y;
        if (diff < 0) diff = -diff;
        if (diff == 0) return Integer(0);  // cycle, retry with another c
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    return d == n ? Integer(0) : d;
}

void factor_rec(const Integer& n, std::map<long long, long>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        if (!n.fits_slong_p())
            throw UnsupportedArgument("prime factor too large for ExactScalar base: " + n.get_str());
        out[n.get_si()] += 1;
        return;
    }
    for (unsigned long c = 1;; ++c) {
        Integer d = pollard_rho(n, c);
        if (d != 0) {
            factor_rec(d, out);
            factor_rec(n / d, out);
            return;
        }
    }
}

} // namespace

std::vector<std::pair<long long, long>> factor_integer(const Integer& v) {
    if (v == 0) throw UnsupportedArgument("factor_integer(0)");
    Integer n = v < 0 ? Integer(-v) : v;
    std::map<long long, long> acc;
    for (long p = 2; p <= 100000 && Integer(p) * p <= n; p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
            acc[p] += 1;
            n /= static_cast<unsigned long>(p);
        }
    }
    if (n > 1) factor_rec(n, acc);
    return {acc.begin(), acc.end()};
}

ExactScalar factorial_exact(long n) {
    ExactScalar r = ExactScalar::one();
    for (long k = 2; k <= n; ++k) r = r * ExactScalar::from_long(k);
    return r;
}

ExactScalar ExactScalar::from_integer(const Integer& v) {
    if (v == 0) return ExactScalar();
    Monomial m;
    m.sign = v < 0 ? -1 : 1;
    for (auto& [p, e] : factor_integer(v)) m.powers.emplace_back(p, Rational(e));
    ExactScalar r;
    r.terms_.push_back(std::move(m));
    return r;
}

ExactScalar ExactScalar::from_rational(const Rational& q) {
    Rational v = q;
    v.canonicalize();
    if (v == 0) return ExactScalar();
    return from_integer(v.get_num()) * from_integer(v.get_den()).pow(Rational(-1));
}

ExactScalar ExactScalar::pi_pow(const Rational& e) {
    Monomial m;
    m.pi_exp = e;
    m.pi_exp.canonicalize();
    ExactScalar r;
    r.terms_.push_back(std::move(m));
    return r;
}

bool ExactScalar::is_rational() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    const Monomial& m = terms_.front();
    if (m.pi_exp != 0) return false;
    for (auto& [p, e] : m.powers)
        if (!is_integer(e)) return false;
    return true;
}

Rational ExactScalar::rational_value() const {
    if (!is_rational()) throw PiResidue("not a plain rational: " + str());
    if (terms_.empty()) return Rational(0);
    const Monomial& m = terms_.front();
    Rational v(m.sign);
    for (auto& [p, e] : m.powers) {
        Integer pw;
        long k = std::labs(e.get_num().get_si());
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
        if (e > 0)
            v *= Rational(pw);
        else
            v /= Rational(pw);
    }
    return v;
}

namespace {

// Comparison key used both for sorting and for mergeability grouping.
// Two monomials can merge iff their pi exponents agree exactly and every
// prime exponent differs by an integer, i.e. the fractional parts agree.
struct Signature {
    Rational pi_exp;
    std::vector<std::pair<long long, Rational>> fracs;  // fractional parts != 0

    bool operator<(const Signature& o) const {
        if (pi_exp != o.pi_exp) return pi_exp < o.pi_exp;
        return fracs < o.fracs;
    }
};

Signature signature_of(const ExactScalar::Monomial& m) {
    Signature s;
    s.pi_exp = m.pi_exp;
    for (auto& [p, e] : m.powers) {
        Rational f = e - Rational(rational_floor(e));
        if (f != 0) s.fracs.emplace_back(p, f);
    }
    return s;
}

bool monomial_less(const ExactScalar::Monomial& a, const ExactScalar::Monomial& b) {
    if (a.pi_exp != b.pi_exp) return a.pi_exp < b.pi_exp;
    if (a.powers != b.powers) return a.powers < b.powers;
    return a.sign < b.sign;
}

} // namespace

ExactScalar ExactScalar::from_terms(std::vector<Monomial> raw) {
    // Group by signature, extract the per-base minimum exponent, evaluate the
    // signed sum of the integer residuals and refactor it.
    std::map<Signature, std::vector<Monomial>> groups;
    for (auto& m : raw) groups[signature_of(m)].push_back(std::move(m));

    ExactScalar out;
    for (auto& [sig, members] : groups) {
        std::map<long long, Rational> common;
        for (auto& m : members)
            for (auto& [p, e] : m.powers) {
                auto it = common.find(p);
                if (it == common.end())
                    common[p] = e;
                else if (e < it->second)
                    it->second = e;
            }
        // A member missing base p has exponent 0 there, so clamp the common
        // exponent to 0 whenever some member lacks the base.
        for (auto& [p, low] : common) {
            bool everywhere = true;
            for (auto& m : members) {
                bool found = false;
                for (auto& [q, e] : m.powers)
                    if (q == p) { found = true; break; }
                if (!found) { everywhere = false; break; }
            }
            if (!everywhere && low > 0) low = Rational(0);
        }

        Integer total(0);
        for (auto& m : members) {
            Integer residual(1);
            for (auto& [p, low] : common) {
                Rational e(0);
                for (auto& [q, ex] : m.powers)
                    if (q == p) { e = ex; break; }
                Rational k = e - low;  // non-negative integer by construction
                Integer pw;
                mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                              static_cast<unsigned long>(k.get_num().get_ui()));
                residual *= pw;
            }
            total += m.sign > 0 ? residual : -residual;
        }
        if (total == 0) continue;

        Monomial merged;
        merged.sign = total < 0 ? -1 : 1;
        merged.pi_exp = sig.pi_exp;
        std::map<long long, Rational> powers;
        for (auto& [p, low] : common) powers[p] = low;
        for (auto& [p, e] : factor_integer(total)) powers[p] += Rational(e);
        for (auto& [p, e] : powers)
            if (e != 0) merged.powers.emplace_back(p, e);
        out.terms_.push_back(std::move(merged));
    }
    std::sort(out.terms_.begin(), out.terms_.end(), monomial_less);
    return out;
}

ExactScalar ExactScalar::operator-() const {
    ExactScalar r = *this;
    for (auto& m : r.terms_) m.sign = -m.sign;
    return r;
}

ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    std::vector<ExactScalar::Monomial> raw = a.terms_;
    raw.insert(raw.end(), b.terms_.begin(), b.terms_.end());
    return ExactScalar::from_terms(std::move(raw));
}

ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) { return a + (-b); }

ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    std::vector<ExactScalar::Monomial> raw;
    raw.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ma : a.terms_)
        for (const auto& mb : b.terms_) {
            ExactScalar::Monomial m;
            m.sign = ma.sign * mb.sign;
            m.pi_exp = ma.pi_exp + mb.pi_exp;
            std::map<long long, Rational> powers(ma.powers.begin(), ma.powers.end());
            for (auto& [p, e] : mb.powers) powers[p] += e;
            for (auto& [p, e] : powers)
                if (e != 0) m.powers.emplace_back(p, e);
            raw.push_back(std::move(m));
        }
    return ExactScalar::from_terms(std::move(raw));
}

ExactScalar ExactScalar::pow(const Rational& e_in) const {
    Rational e = e_in;
    e.canonicalize();
    if (terms_.size() != 1 || terms_.front().sign < 0)
        throw MultiTermPower("pow requires a single positive monomial: " + str());
    if (e == 0) return one();
    ExactScalar r = *this;
    Monomial& m = r.terms_.front();
    m.pi_exp *= e;
    for (auto& [p, ex] : m.powers) ex *= e;
    std::erase_if(m.powers, [](const auto& pe) { return pe.second == 0; });
    return r;
}

ExactScalar ExactScalar::gamma(const Rational& t_in) {
    Rational t = t_in;
    t.canonicalize();
    if (t <= 0) throw UnsupportedArgument("gamma argument must be positive: " + to_string(t));
    if (is_integer(t)) {
        return factorial_exact(t.get_num().get_si() - 1);
    }
    if (t.get_den() == 2) {
        // Gamma(m + 1/2) = (2m-1)!! / 2^m * sqrt(pi)
        Rational whole = t - Rational(1, 2);
        long m = Integer(whole.get_num() / whole.get_den()).get_si();
        ExactScalar dfac = one();
        for (long k = 3; k <= 2 * m - 1; k += 2) dfac = dfac * from_long(k);
        ExactScalar half_pow = from_long(2).pow(Rational(-m));
        return dfac * half_pow * pi_pow(Rational(1, 2));
    }
    throw UnsupportedArgument("gamma supports integer and half-integer arguments only: " +
                              to_string(t));
}

double ExactScalar::to_float() const {
    double total = 0;
    for (const auto& m : terms_) {
        double v = m.sign;
        for (auto& [p, e] : m.powers) v *= std::pow(static_cast<double>(p), to_double(e));
        if (m.pi_exp != 0) v *= std::pow(M_PI, to_double(m.pi_exp));
        total += v;
    }
    return total;
}

namespace {

std::string exponent_str(const Rational& e) {
    if (is_integer(e) && e >= 0) return to_string(e);
    return "(" + to_string(e) + ")";
}

std::string monomial_str(const ExactScalar::Monomial& m, bool leading) {
    // Integer-exponent prime content becomes the rational coefficient;
    // fractional exponents stay as base^(p/q) factors.
    Rational coef(1);
    std::vector<std::pair<long long, Rational>> fracs;
    for (auto& [p, e] : m.powers) {
        if (is_integer(e)) {
            Integer pw;
            mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                          static_cast<unsigned long>(std::labs(e.get_num().get_si())));
            if (e > 0)
                coef *= Rational(pw);
            else
                coef /= Rational(pw);
        } else {
            fracs.emplace_back(p, e);
        }
    }
    std::ostringstream os;
    if (leading && m.sign < 0) os << "-";
    std::vector<std::string> parts;
    if (coef != 1 || (fracs.empty() && m.pi_exp == 0)) parts.push_back(to_string(coef));
    for (auto& [p, e] : fracs) parts.push_back(std::to_string(p) + "^" + exponent_str(e));
    if (m.pi_exp == 1)
        parts.push_back("pi");
    else if (m.pi_exp != 0)
        parts.push_back("pi^" + exponent_str(m.pi_exp));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << " * ";
        os << parts[i];
    }
    return os.str();
}

} // namespace

std::string ExactScalar::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i == 0) {
            os << monomial_str(terms_[i], true);
        } else {
            os << (terms_[i].sign < 0 ? " - " : " + ") << monomial_str(terms_[i], false);
        }
    }
    return os.str();
}

namespace {

struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Integer parse_integer() {
        skip_ws();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        std::size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) throw ParseError("expected integer in ExactScalar literal");
        return Integer(std::string(s.substr(start, pos - start)));
    }

    Rational parse_rational() {
        Integer num = parse_integer();
        if (consume('/')) {
            Integer den = parse_integer();
            if (den == 0) throw ParseError("zero denominator");
            Rational q(num);
            q /= Rational(den);
            return q;
        }
        return Rational(num);
    }

    Rational parse_exponent() {
        if (consume('(')) {
            Rational q = parse_rational();
            if (!consume(')')) throw ParseError("expected ')' in exponent");
            return q;
        }
        return Rational(parse_integer());
    }

    ExactScalar parse_factor() {
        skip_ws();
        if (pos + 1 < s.size() && s.compare(pos, 2, "pi") == 0) {
            pos += 2;
            Rational e(1);
            if (consume('^')) e = parse_exponent();
            return ExactScalar::pi_pow(e);
        }
        Rational base = parse_rational();
        skip_ws();
        if (pos < s.size() && s[pos] == '^') {
            ++pos;
            Rational e = parse_exponent();
            if (!is_integer(base) || base <= 1)
                throw ParseError("exponent base must be an integer >= 2");
            return ExactScalar::from_integer(base.get_num()).pow(e);
        }
        return ExactScalar::from_rational(base);
    }

    ExactScalar parse_term() {
        bool negative = false;
        for (;;) {
            if (consume('-'))
                negative = !negative;
            else if (!consume('+'))
                break;
        }
        ExactScalar v = parse_factor();
        while (consume('*')) v = v * parse_factor();
        return negative ? -v : v;
    }

    ExactScalar parse_expr() {
        ExactScalar v = parse_term();
        for (;;) {
            skip_ws();
            if (pos >= s.size()) break;
            if (s[pos] == '+') {
                ++pos;
                v = v + parse_term();
            } else if (s[pos] == '-') {
                ++pos;
                v = v - parse_term();
            } else {
                throw ParseError("unexpected character in ExactScalar literal: " +
                                 std::string(1, s[pos]));
            }
        }
        return v;
    }
};

} // namespace

ExactScalar ExactScalar::parse(std::string_view text) {
    Parser p{text};
    if (p.eof()) throw ParseError("empty ExactScalar literal");
    if (p.peek() == '0') {
        // allow a bare zero
        std::size_t save = p.pos;
        ++p.pos;
        if (p.eof()) return ExactScalar();
        p.pos = save;
    }
    return p.parse_expr();
}

} // namespace qcylab
