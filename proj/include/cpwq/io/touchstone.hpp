#pragma once

// Touchstone v1 reader for 2-port files: extracts the S21 column as a complex
// linear trace. Option line: # <freq-unit> S <RI|MA|DB> R <ref>; data rows
// carry 9 columns (f, S11, S21, S12, S22 as pairs). Anything ambiguous is a
// parse error naming the line.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "../constants.hpp"
#include "../errors.hpp"
#include "../resonance.hpp"
#include "csv.hpp"

namespace cpwq::io {

namespace detail {

inline std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

enum class TsFormat { ri, ma, db };

inline std::complex<double> ts_to_complex(double a, double b, TsFormat fmt) {
    switch (fmt) {
    case TsFormat::ri: return {a, b};
    case TsFormat::ma: return std::polar(a, b * pi / 180.0);
    case TsFormat::db: return std::polar(std::pow(10.0, a / 20.0), b * pi / 180.0);
    }
    return {};
}

} // namespace detail

inline std::vector<S21Trace> parse_touchstone(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);

    bool have_option = false;
    double freq_scale = 1e9; // v1 default unit is GHz
    detail::TsFormat format = detail::TsFormat::ma;
    S21Trace trace;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        std::string line = lines[li];
        if (const auto bang = line.find('!'); bang != std::string::npos)
            line = line.substr(0, bang);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line[0] == '#') {
            if (have_option)
                throw parse_error("duplicate option line", line_no);
            std::stringstream ss(line.substr(1));
            std::vector<std::string> tokens;
            std::string tok;
            while (ss >> tok) tokens.push_back(detail::upper(tok));

            std::size_t i = 0;
            if (i < tokens.size() &&
                (tokens[i] == "HZ" || tokens[i] == "KHZ" || tokens[i] == "MHZ" ||
                 tokens[i] == "GHZ")) {
                freq_scale = tokens[i] == "HZ"    ? 1.0
                             : tokens[i] == "KHZ" ? 1e3
                             : tokens[i] == "MHZ" ? 1e6
                                                  : 1e9;
                ++i;
            }
            if (i < tokens.size() && tokens[i].size() == 1 &&
                std::string("SYZGH").find(tokens[i][0]) != std::string::npos) {
                if (tokens[i] != "S")
                    throw parse_error("only S-parameter files are supported",
                                      line_no);
                ++i;
            }
            if (i < tokens.size() &&
                (tokens[i] == "RI" || tokens[i] == "MA" || tokens[i] == "DB")) {
                format = tokens[i] == "RI"   ? detail::TsFormat::ri
                         : tokens[i] == "MA" ? detail::TsFormat::ma
                                             : detail::TsFormat::db;
                ++i;
            }
            if (i < tokens.size()) {
                if (tokens[i] != "R")
                    throw parse_error("malformed option line near '" + tokens[i] +
                                          "'",
                                      line_no);
                ++i;
                if (i >= tokens.size())
                    throw parse_error("option line: R without a reference value",
                                      line_no);
                try {
                    (void)std::stod(tokens[i]);
                } catch (...) {
                    throw parse_error("option line: bad reference impedance '" +
                                          tokens[i] + "'",
                                      line_no);
                }
                ++i;
            }
            if (i != tokens.size())
                throw parse_error("malformed option line near '" + tokens[i] + "'",
                                  line_no);
            have_option = true;
            continue;
        }

        if (!have_option)
            throw parse_error("data before the option line", line_no);

        std::stringstream ss(line);
        std::vector<double> cols;
        std::string cell;
        while (ss >> cell) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size())
                throw parse_error("non-numeric field '" + cell + "'", line_no);
            cols.push_back(v);
        }
        if (cols.size() != 9)
            throw parse_error("expected 9 columns for a 2-port record, got " +
                                  std::to_string(cols.size()),
                              line_no);

        const double f = cols[0] * freq_scale;
        if (!trace.frequencies.empty() && !(f > trace.frequencies.back()))
            throw parse_error("frequencies must be strictly increasing", line_no);
        trace.frequencies.push_back(f);
        // 2-port column order: S11, S21, S12, S22.
        trace.s21.push_back(detail::ts_to_complex(cols[3], cols[4], format));
    }

    if (!have_option)
        throw parse_error("missing option line", lines.size() + 1);
    if (trace.frequencies.empty())
        throw parse_error("no data rows", lines.size() + 1);

    std::vector<S21Trace> traces;
    traces.push_back(std::move(trace));
    return traces;
}

} // namespace cpwq::io
