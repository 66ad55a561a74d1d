#pragma once

// Scenario corpus files:
//
//   # comment
//   [case 3]
//   f = (4000, 0.8; ?, 0.2)
//   g = (3000, 1)
//   expect = f<g
//   interpretation = money
//   note = free text

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regret/engine.hpp"
#include "regret/error.hpp"
#include "regret/prospect.hpp"
#include "regret/text.hpp"

namespace regret {

struct ScenarioCase {
    std::string name;
    Prospect f;
    Prospect g;
    std::optional<Relation> expect;
    Interpretation interpretation = Interpretation::money;
    std::string note;
    int line = 0;  // line of the [case] header
};

struct ScenarioFile {
    std::vector<ScenarioCase> cases;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] inline void corpus_error(int line, const std::string& what) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

struct PendingCase {
    ScenarioCase c;
    std::optional<std::pair<std::string, int>> f_text, g_text;  // text and its column
    int f_line = 0;
    int g_line = 0;
};

}  // namespace detail

/// Parses corpus text. With `normalize` the prospects are rescaled to sum to
/// one instead of being rejected.
inline ScenarioFile parse_corpus(std::string_view text, bool normalize = false) {
    ScenarioFile file;
    std::set<std::string> names;
    std::optional<detail::PendingCase> pending;

    auto finish = [&]() {
        if (!pending) return;
        auto& pc = *pending;
        if (!pc.f_text || !pc.g_text) {
            detail::corpus_error(pc.c.line, "case '" + pc.c.name + "' needs both f and g");
        }
        auto build = [&](const std::pair<std::string, int>& src, int line) {
            Prospect p = parse_prospect_unchecked(src.first, line, src.second, pc.c.interpretation);
            if (normalize) p = normalized(std::move(p));
            if (auto err = validate(p)) {
                throw Error(err->kind(), "line " + std::to_string(line) + ": " + err->what(), err->value());
            }
            return p;
        };
        pc.c.f = build(*pc.f_text, pc.f_line);
        pc.c.g = build(*pc.g_text, pc.g_line);
        file.cases.push_back(std::move(pc.c));
        pending.reset();
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            finish();
            if (line.back() != ']' || line.substr(0, 5) != "[case") {
                detail::corpus_error(line_no, "expected '[case <name>]'");
            }
            const std::string name(detail::trim(line.substr(5, line.size() - 6)));
            if (name.empty()) detail::corpus_error(line_no, "case name is empty");
            if (!names.insert(name).second) detail::corpus_error(line_no, "duplicate case name '" + name + "'");
            pending.emplace();
            pending->c.name = name;
            pending->c.line = line_no;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) detail::corpus_error(line_no, "expected 'key = value'");
        if (!pending) detail::corpus_error(line_no, "entry outside a [case] section");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        // Column of the value in the raw line, for prospect error positions.
        const int value_col = static_cast<int>(value.data() - raw.data()) + 1;

        auto& pc = *pending;
        if (key == "f" || key == "g") {
            auto& slot = key == "f" ? pc.f_text : pc.g_text;
            if (slot) detail::corpus_error(line_no, "prospect '" + key + "' given twice");
            slot.emplace(std::string(value), value_col);
            (key == "f" ? pc.f_line : pc.g_line) = line_no;
        } else if (key == "expect") {
            try {
                pc.c.expect = parse_relation(value);
            } catch (const Error& e) {
                detail::corpus_error(line_no, e.what());
            }
        } else if (key == "interpretation") {
            try {
                pc.c.interpretation = parse_interpretation(value);
            } catch (const Error& e) {
                detail::corpus_error(line_no, e.what());
            }
        } else if (key == "note") {
            pc.c.note = std::string(value);
        } else {
            detail::corpus_error(line_no, "unknown key '" + key + "'");
        }
    }
    finish();
    return file;
}

inline ScenarioFile load_corpus(const std::string& path, bool normalize = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open corpus '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_corpus(buf.str(), normalize);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what(), e.value());
    }
}

}  // namespace regret
