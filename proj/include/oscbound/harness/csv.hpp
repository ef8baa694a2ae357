#pragma once

#include "../core.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace oscbound::harness {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_escape(cells[i]);
    return line;
}

/// Splits one CSV record, honouring double-quoted cells.
inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cells.back() += '"', ++i;
            else if (c == '"') quoted = false;
            else cells.back() += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else if (c != '\r') {
            cells.back() += c;
        }
    }
    return cells;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }

    const std::string& cell(std::size_t row, const std::string& name) const {
        int c = column(name);
        if (c < 0) throw Error("CSV has no column '" + name + "'");
        return rows.at(row).at(static_cast<std::size_t>(c));
    }

    double number(std::size_t row, const std::string& name) const {
        double v = 0.0;
        const auto& s = cell(row, name);
        if (s.empty() || !parse_double(s, v)) return std::numeric_limits<double>::quiet_NaN();
        return v;
    }

    std::string str() const {
        std::string out = csv_join(header) + "\n";
        for (const auto& r : rows) out += csv_join(r) + "\n";
        return out;
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = csv_split(line);
        if (first) t.header = std::move(cells), first = false;
        else {
            if (cells.size() != t.header.size()) throw Error("CSV row has " + std::to_string(cells.size()) +
                                                             " cells, header has " + std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw Error("CSV is empty");
    return t;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

} // namespace oscbound::harness
