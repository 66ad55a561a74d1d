#pragma once

// Prospect notation, function-registry specs and CSV emission.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "regret/engine.hpp"
#include "regret/error.hpp"
#include "regret/functions.hpp"
#include "regret/prospect.hpp"

namespace regret {

/// Decimal text with 17 significant digits.
inline std::string format17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Shortest decimal text that reads back to exactly x.
inline std::string format_shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace detail {

class Cursor {
public:
    Cursor(std::string_view text, int line, int column) : text_(text), line_(line), column_(column) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) advance();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + what);
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) fail(std::string("expected '") + c + "'" + found());
        advance();
    }

    std::string found() const {
        if (done()) return " but input ended";
        return std::string(" but found '") + peek() + "'";
    }

    // decimal := [+-] digits [. digits] [(e|E) [+-] digits], or a leading "." form.
    double number() {
        skip_space();
        const std::size_t start = pos_;
        const int start_col = column_;
        std::string spelled;
        if (peek() == '+' || peek() == '-') {
            if (peek() == '-') spelled += '-';
            advance();
        }
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            spelled += peek();
            advance();
            digits = true;
        }
        if (peek() == '.') {
            spelled += '.';
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                spelled += peek();
                advance();
                digits = true;
            }
        }
        if (!digits) {
            pos_ = start;
            column_ = start_col;
            fail("expected a number or '?'" + found());
        }
        if (peek() == 'e' || peek() == 'E') {
            spelled += 'e';
            advance();
            if (peek() == '+' || peek() == '-') {
                spelled += peek();
                advance();
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent" + found());
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                spelled += peek();
                advance();
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(spelled.data(), spelled.data() + spelled.size(), value);
        if (res.ec != std::errc() || !std::isfinite(value)) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_) + ", column " +
                                                   std::to_string(start_col) + ": number out of range");
        }
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
    int column_;
};

}  // namespace detail

/// Parses "(x1, p1; x2, p2; ...)" without checking the probability invariants.
/// `line` and `column` locate the text inside a larger file for error messages.
inline Prospect parse_prospect_unchecked(std::string_view text, int line = 1, int column = 1,
                                         Interpretation interpretation = Interpretation::money) {
    detail::Cursor c(text, line, column);
    Prospect p;
    p.interpretation = interpretation;
    c.expect('(');
    while (true) {
        c.skip_space();
        Outcome outcome = Outcome::unknown();
        if (c.peek() == '?') {
            c.advance();
        } else {
            outcome = Outcome::known(c.number());
        }
        c.expect(',');
        const double prob = c.number();
        p.branches.push_back({outcome, prob});
        c.skip_space();
        if (c.peek() == ';') {
            c.advance();
            continue;
        }
        if (c.peek() == ')') {
            c.advance();
            break;
        }
        c.fail("expected ';' or ')'" + c.found());
    }
    c.skip_space();
    if (!c.done()) c.fail("unexpected trailing text");
    return p;
}

inline Prospect parse_prospect(std::string_view text, int line = 1, int column = 1,
                               Interpretation interpretation = Interpretation::money) {
    Prospect p = parse_prospect_unchecked(text, line, column, interpretation);
    require_valid(p);
    return p;
}

/// Canonical spelling: "(x1, p1; x2, p2)" with shortest round-trip numbers.
inline std::string print_prospect(const Prospect& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.branches.size(); ++i) {
        if (i) out += "; ";
        const Branch& b = p.branches[i];
        out += b.outcome.is_unknown() ? std::string("?") : format_shortest(b.outcome.value());
        out += ", ";
        out += format_shortest(b.prob);
    }
    return out + ")";
}

inline Interpretation parse_interpretation(std::string_view s) {
    if (s == "money") return Interpretation::money;
    if (s == "utility") return Interpretation::utility;
    throw Error(ErrorKind::Usage, "interpretation must be 'money' or 'utility', got '" + std::string(s) + "'");
}

constexpr std::string_view to_string(Interpretation i) {
    return i == Interpretation::money ? "money" : "utility";
}

inline Relation parse_relation(std::string_view s) {
    if (s == "f>g") return Relation::f_strict;
    if (s == "f<g") return Relation::g_strict;
    if (s == "f~g") return Relation::indifferent;
    throw Error(ErrorKind::ParseError, "relation must be f>g, f<g or f~g, got '" + std::string(s) + "'");
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        parts.emplace_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

inline double spec_number(const std::string& s, std::string_view token) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s[0] == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != last) {
        throw Error(ErrorKind::ParseError, "bad number '" + s + "' in '" + std::string(token) + "'");
    }
    return v;
}

inline int spec_int(const std::string& s, std::string_view token) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorKind::ParseError, "bad integer '" + s + "' in '" + std::string(token) + "'");
    }
    return v;
}

[[noreturn]] inline void bad_token(std::string_view token) {
    throw Error(ErrorKind::ParseError, "unknown function spec '" + std::string(token) + "'");
}

}  // namespace detail

/// v:poly:a or v:sin:a.
inline FearFn parse_fear(std::string_view token) {
    const auto parts = detail::split(token, ':');
    if (parts.size() != 3 || parts[0] != "v") detail::bad_token(token);
    const double a = detail::spec_number(parts[2], token);
    if (parts[1] == "poly") return FearFn::poly(a);
    if (parts[1] == "sin") return FearFn::sinpoly(a);
    detail::bad_token(token);
}

/// Applies one registry token (u:..., v:..., q:..., r:...) to a profile.
inline void apply_spec_token(AgentProfile& profile, std::string_view token) {
    const auto parts = detail::split(token, ':');
    const std::string& kind = parts[0];
    if (kind == "v") {
        profile.v = parse_fear(token);
    } else if (kind == "u") {
        if (parts.size() == 2 && parts[1] == "identity") {
            profile.u = UtilityFn::identity();
        } else if (parts.size() == 4 && parts[1] == "affine") {
            profile.u = UtilityFn::affine(detail::spec_number(parts[2], token), detail::spec_number(parts[3], token));
        } else if (parts.size() == 3 && parts[1] == "power") {
            profile.u = UtilityFn::power(detail::spec_number(parts[2], token));
        } else {
            detail::bad_token(token);
        }
    } else if (kind == "q") {
        if (parts.size() == 2 && parts[1] == "linear") {
            profile.q = RegretQ::linear();
        } else if (parts.size() == 3 && parts[1] == "power") {
            profile.q = RegretQ::power_odd(detail::spec_int(parts[2], token));
        } else {
            detail::bad_token(token);
        }
    } else if (kind == "r") {
        if (parts.size() != 4 || parts[1] != "power") detail::bad_token(token);
        profile.q = RegretQ::from_r(
            RegretR::power_odd(detail::spec_int(parts[2], token), detail::spec_number(parts[3], token)));
    } else {
        detail::bad_token(token);
    }
}

/// Default profile of the command line: u:identity v:poly:1 q:power:3.
inline AgentProfile default_profile() { return AgentProfile{}; }

/// Space-separated registry tokens applied over the defaults.
inline AgentProfile parse_profile(std::string_view spec) {
    AgentProfile profile = default_profile();
    std::istringstream in{std::string(spec)};
    std::string token;
    while (in >> token) apply_spec_token(profile, token);
    return profile;
}

/// CSV with a header row, LF line endings and 17-significant-digit values.
inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format17(row[i]);
        os << '\n';
    }
}

}  // namespace regret
