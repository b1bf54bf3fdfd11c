#include <specbounds/error.hpp>
#include <specbounds/implicit.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace specbounds {

Polynomial Polynomial::constant(double c)
{
    Polynomial p;
    if (c != 0.0) p.m_terms[{0, 0, 0}] = c;
    return p;
}

Polynomial Polynomial::variable(int axis)
{
    Polynomial p;
    Exponents e{0, 0, 0};
    e[axis] = 1;
    p.m_terms[e] = 1.0;
    return p;
}

void Polynomial::prune()
{
    for (auto it = m_terms.begin(); it != m_terms.end();) {
        it = it->second == 0.0 ? m_terms.erase(it) : std::next(it);
    }
}

int Polynomial::degree() const
{
    int d = 0;
    for (const auto& [e, c] : m_terms) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
}

double Polynomial::eval(const Vec3& p) const
{
    double sum = 0.0;
    for (const auto& [e, c] : m_terms) {
        double term = c;
        for (int k = 0; k < 3; ++k) {
            for (int i = 0; i < e[k]; ++i) term *= p[k];
        }
        sum += term;
    }
    return sum;
}

Vec3 Polynomial::gradient(const Vec3& p) const
{
    Vec3 g = Vec3::Zero();
    for (const auto& [e, c] : m_terms) {
        for (int k = 0; k < 3; ++k) {
            if (e[k] == 0) continue;
            double term = c * e[k];
            for (int j = 0; j < 3; ++j) {
                const int power = j == k ? e[j] - 1 : e[j];
                for (int i = 0; i < power; ++i) term *= p[j];
            }
            g[k] += term;
        }
    }
    return g;
}

std::string Polynomial::to_string() const
{
    if (m_terms.empty()) return "0";
    std::string out;
    static constexpr char names[3] = {'x', 'y', 'z'};
    for (const auto& [e, c] : m_terms) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%+.17g", c);
        out += buf;
        for (int k = 0; k < 3; ++k) {
            if (e[k] == 0) continue;
            out += '*';
            out += names[k];
            if (e[k] > 1) out += "^" + std::to_string(e[k]);
        }
    }
    return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
    Polynomial r = *this;
    for (const auto& [e, c] : o.m_terms) r.m_terms[e] += c;
    r.prune();
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const
{
    Polynomial r = *this;
    for (auto& [e, c] : r.m_terms) c = -c;
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const
{
    Polynomial r;
    for (const auto& [ea, ca] : m_terms) {
        for (const auto& [eb, cb] : o.m_terms) {
            r.m_terms[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
        }
    }
    r.prune();
    return r;
}

Polynomial Polynomial::pow(int exponent) const
{
    if (exponent < 0) throw Error(ErrorKind::Parse, "negative exponent in polynomial");
    Polynomial result = constant(1.0);
    Polynomial base = *this;
    while (exponent > 0) {
        if (exponent & 1) result = result * base;
        base = base * base;
        exponent >>= 1;
    }
    return result;
}

namespace {

// expr   := term (('+'|'-') term)*
// term   := unary ('*' unary)*
// unary  := '-' unary | power
// power  := atom ('^' integer)?
// atom   := number | x | y | z | '(' expr ')'
class Parser {
public:
    explicit Parser(std::string_view text)
        : m_text(text)
    {}

    Polynomial parse_all()
    {
        Polynomial p = expr();
        skip();
        if (m_pos != m_text.size()) fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(
            ErrorKind::Parse,
            "polynomial: " + what + " at offset " + std::to_string(m_pos) + " in '" + std::string(m_text) + "'");
    }

    void skip()
    {
        while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos]))) ++m_pos;
    }

    bool accept(char c)
    {
        skip();
        if (m_pos < m_text.size() && m_text[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        Polynomial p = term();
        for (;;) {
            if (accept('+')) {
                p = p + term();
            } else if (accept('-')) {
                p = p - term();
            } else {
                return p;
            }
        }
    }

    Polynomial term()
    {
        Polynomial p = unary();
        while (accept('*')) p = p * unary();
        return p;
    }

    Polynomial unary()
    {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power()
    {
        Polynomial base = atom();
        if (accept('^')) {
            skip();
            int exponent = 0;
            auto [ptr, ec] = std::from_chars(m_text.data() + m_pos, m_text.data() + m_text.size(), exponent);
            if (ec != std::errc()) fail("expected integer exponent");
            m_pos = static_cast<std::size_t>(ptr - m_text.data());
            if (exponent < 0 || exponent > 64) fail("exponent out of range");
            return base.pow(exponent);
        }
        return base;
    }

    Polynomial atom()
    {
        skip();
        if (m_pos >= m_text.size()) fail("unexpected end of input");
        const char c = m_text[m_pos];
        if (c == '(') {
            ++m_pos;
            Polynomial p = expr();
            if (!accept(')')) fail("expected ')'");
            return p;
        }
        if (c == 'x' || c == 'y' || c == 'z') {
            ++m_pos;
            return Polynomial::variable(c - 'x');
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(m_text.data() + m_pos, m_text.data() + m_text.size(), value);
            if (ec != std::errc()) fail("bad number");
            m_pos = static_cast<std::size_t>(ptr - m_text.data());
            return Polynomial::constant(value);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

} // namespace

Polynomial Polynomial::parse(std::string_view text)
{
    return Parser(text).parse_all();
}

} // namespace specbounds
