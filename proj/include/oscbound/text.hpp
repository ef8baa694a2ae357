#pragma once

// Line-oriented `[section]` / `key = value` text blocks shared by every
// serializable type (domains, field specs, experiment configs).

#include "core.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace oscbound {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
    bool has(std::string_view key) const { return find(key) != nullptr; }
};

/// Raised when a block cannot be interpreted; carries the offending line (0 if unknown).
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line), msg_(msg) {}
    int line() const { return line_; }
    const std::string& message() const { return msg_; }

private:
    int line_;
    std::string msg_;
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// Splits text into sections. Comments start with '#' or ';'. Entries before the
/// first header land in a section with an empty name.
inline std::vector<Section> parse_sections(std::string_view text) {
    std::vector<Section> sections;
    sections.push_back(Section{"", 0, {}});
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++line_no;
        std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (auto c = raw.find_first_of("#;"); c != std::string_view::npos) raw = raw.substr(0, c);
        std::string line = trim(raw);
        if (line.empty()) {
            if (nl == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "malformed section header '" + line + "'");
            sections.push_back(Section{trim(std::string_view(line).substr(1, line.size() - 2)), line_no, {}});
        } else {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
            std::string key = trim(std::string_view(line).substr(0, eq));
            if (key.empty()) throw ParseError(line_no, "empty key");
            sections.back().entries.push_back(Entry{key, trim(std::string_view(line).substr(eq + 1)), line_no});
        }
        if (nl == text.size()) break;
    }
    if (sections.front().entries.empty()) sections.erase(sections.begin());
    return sections;
}

inline double entry_number(const Entry& e) {
    double v = 0.0;
    if (!parse_double(e.value, v) || !std::isfinite(v))
        throw ParseError(e.line, "malformed number '" + e.value + "' for key '" + e.key + "'");
    return v;
}

inline std::vector<double> entry_numbers(const Entry& e) {
    std::vector<double> out;
    for (const auto& tok : split_ws(e.value)) {
        double v = 0.0;
        if (!parse_double(tok, v) || !std::isfinite(v))
            throw ParseError(e.line, "malformed number '" + tok + "' for key '" + e.key + "'");
        out.push_back(v);
    }
    return out;
}

inline const Entry& require(const Section& s, std::string_view key) {
    if (const Entry* e = s.find(key)) return *e;
    throw ParseError(s.line, "section [" + s.name + "] is missing required key '" + std::string(key) + "'");
}

inline Vec2 entry_point(const Entry& e) {
    auto v = entry_numbers(e);
    if (v.size() != 2) throw ParseError(e.line, "key '" + e.key + "' expects two coordinates");
    return {v[0], v[1]};
}

/// Rejects keys outside `allowed`.
inline void check_keys(const Section& s, std::initializer_list<std::string_view> allowed) {
    for (const auto& e : s.entries) {
        bool ok = false;
        for (auto a : allowed) ok = ok || e.key == a;
        if (!ok) throw ParseError(e.line, "unknown key '" + e.key + "' in section [" + s.name + "]");
    }
}

} // namespace oscbound
