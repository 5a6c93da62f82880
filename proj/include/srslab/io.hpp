#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "srslab/error.hpp"
#include "srslab/moments.hpp"
#include "srslab/population.hpp"

namespace srslab {

namespace detail {

inline std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' ||
                          s.back() == '\t'))
        s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
    return s.substr(start);
}

inline std::optional<double> parse_double(const std::string& s) {
    const std::string t = strip(s);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace detail

/// Strict CSV loader: header must be exactly `y,x,z`, every row three
/// decimal numbers, no NaN/inf. Errors report the offending row/column.
inline Population load_population(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open population file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    // tolerate a UTF-8 BOM and CRLF line endings
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB &&
        static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);
    if (detail::strip(line) != "y,x,z")
        throw InputError(path + ": column order must be y,x,z (got '" +
                         detail::strip(line) + "')");

    std::vector<double> y, x, z;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(stripped);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 3)
            throw InputError(path + ": row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " columns, expected 3");
        double vals[3];
        const char* names[3] = {"y", "x", "z"};
        for (int c = 0; c < 3; ++c) {
            const auto v = detail::parse_double(cells[static_cast<std::size_t>(c)]);
            if (!v || !std::isfinite(*v))
                throw InputError(path + ": row " + std::to_string(row) + ", column " +
                                 names[c] + ": non-numeric cell '" +
                                 detail::strip(cells[static_cast<std::size_t>(c)]) + "'");
            vals[c] = *v;
        }
        y.push_back(vals[0]);
        x.push_back(vals[1]);
        z.push_back(vals[2]);
    }
    if (y.empty()) throw InputError(path + ": no data rows");
    return Population(std::move(y), std::move(x), std::move(z));
}

/// A V table loaded from a literal fixture file, together with every
/// defect found while reading it. Duplicate indices keep all candidate
/// values for manual resolution; the table itself holds the first one.
struct VFixture {
    VTable table;
    std::optional<double> ybar, xbar, zbar;
    std::map<Index3, std::vector<double>> duplicates;
    std::vector<std::string> warnings;
};

/// Fixture grammar: one `Vpqr = <decimal>` per line, `#` comments,
/// optional `Ybar = / Xbar = / Zbar =` lines for the population means.
/// Malformed values are reported verbatim as warnings and skipped.
inline VFixture load_v_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open fixture file: " + path);

    VFixture fx;
    std::string line;
    int lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::strip(line);
        if (const auto hash = s.find('#'); hash != std::string::npos)
            s = detail::strip(s.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            fx.warnings.push_back("line " + std::to_string(lineno) +
                                  ": no '=' sign, skipped: '" + s + "'");
            continue;
        }
        const std::string key = detail::strip(s.substr(0, eq));
        const std::string valstr = detail::strip(s.substr(eq + 1));
        const auto value = detail::parse_double(valstr);

        auto mean_slot = [&]() -> std::optional<double>* {
            if (key == "Ybar") return &fx.ybar;
            if (key == "Xbar") return &fx.xbar;
            if (key == "Zbar") return &fx.zbar;
            return nullptr;
        }();
        if (mean_slot) {
            if (!value) {
                fx.warnings.push_back("line " + std::to_string(lineno) +
                                      ": malformed value, skipped: '" + s + "'");
                continue;
            }
            *mean_slot = *value;
            continue;
        }

        if (key.size() != 4 || key[0] != 'V' || !std::isdigit(key[1]) ||
            !std::isdigit(key[2]) || !std::isdigit(key[3])) {
            fx.warnings.push_back("line " + std::to_string(lineno) +
                                  ": unrecognized key, skipped: '" + s + "'");
            continue;
        }
        const Index3 idx{key[1] - '0', key[2] - '0', key[3] - '0'};
        if (idx.total() > 4) {
            fx.warnings.push_back("line " + std::to_string(lineno) + ": index " +
                                  to_string(idx) + " exceeds order 4, skipped");
            continue;
        }
        if (!value) {
            fx.warnings.push_back("line " + std::to_string(lineno) +
                                  ": malformed value, skipped: '" + s + "'");
            continue;
        }
        any = true;
        if (fx.table.has(idx.p, idx.q, idx.r)) {
            auto& cands = fx.duplicates[idx];
            if (cands.empty()) cands.push_back(fx.table.at(idx.p, idx.q, idx.r));
            cands.push_back(*value);
            fx.warnings.push_back("line " + std::to_string(lineno) + ": duplicate V" +
                                  to_string(idx) + " (" + valstr +
                                  "); keeping first value, both recorded");
            continue;
        }
        fx.table.set(idx.p, idx.q, idx.r, *value, Provenance::LiteralFixture);
    }
    if (!any) throw InputError(path + ": fixture contains no V entries");
    return fx;
}

/// Line-oriented debug serialization: `p q r value provenance` per entry.
inline void write_v_table_records(std::ostream& out, const VTable& v) {
    for (const auto& [idx, e] : v.entries) {
        out << idx.p << ' ' << idx.q << ' ' << idx.r << ' ';
        const auto old = out.precision(17);
        out << e.value;
        out.precision(old);
        out << ' ' << to_string(e.provenance) << '\n';
    }
}

}  // namespace srslab
