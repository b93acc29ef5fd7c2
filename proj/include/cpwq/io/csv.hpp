#pragma once

// CSV readers/writers for complex scattering traces, loss-vs-bridge-count
// datasets, and photon-number sweeps. Parsers reject malformed content with
// the offending line number; writers emit 17 significant digits so a
// write/read cycle is lossless in double precision.

#include <cctype>
#include <charconv>
#include <complex>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../regression.hpp"
#include "../resonance.hpp"
#include "report.hpp"

namespace cpwq::io {

namespace detail {

// Splits on '\n', tolerating '\r\n' and lone '\r' endings.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
    std::vector<std::string> lines;
    std::string current;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else if (c == '\r') {
            lines.push_back(current);
            current.clear();
            if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

inline double parse_number(const std::string& cell, std::size_t line_no) {
    const std::string t = trim(cell);
    if (t.empty()) throw parse_error("empty numeric cell", line_no);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw parse_error("non-numeric cell '" + t + "'", line_no);
    return v;
}

} // namespace detail

// Header: freq_hz,s21_re,s21_im[,power_dbm]. The power column, when present,
// must be constant over the file.
inline S21Trace parse_csv_complex(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parse_error("empty file", 1);

    const auto header = detail::split_csv(lines[0]);
    const bool has_power = header.size() == 4 && header[3] == "power_dbm";
    if (!(header.size() == 3 || has_power) || header[0] != "freq_hz" ||
        header[1] != "s21_re" || header[2] != "s21_im")
        throw parse_error(
            "expected header freq_hz,s21_re,s21_im[,power_dbm]", 1);

    S21Trace trace;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto cells = detail::split_csv(lines[i]);
        if (cells.size() != header.size())
            throw parse_error("expected " + std::to_string(header.size()) +
                                  " columns, got " + std::to_string(cells.size()),
                              i + 1);
        const double f = detail::parse_number(cells[0], i + 1);
        const double re = detail::parse_number(cells[1], i + 1);
        const double im = detail::parse_number(cells[2], i + 1);
        if (!trace.frequencies.empty() && !(f > trace.frequencies.back()))
            throw parse_error("frequencies must be strictly increasing", i + 1);
        trace.frequencies.push_back(f);
        trace.s21.emplace_back(re, im);
        if (has_power) {
            const double p = detail::parse_number(cells[3], i + 1);
            if (trace.input_power_dbm && *trace.input_power_dbm != p)
                throw parse_error("power_dbm must be constant within a trace",
                                  i + 1);
            trace.input_power_dbm = p;
        }
    }
    if (trace.frequencies.empty()) throw parse_error("no data rows", lines.size());
    return trace;
}

inline void write_csv_complex(const S21Trace& trace,
                              const std::filesystem::path& path) {
    trace.validate();
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << (trace.input_power_dbm ? "freq_hz,s21_re,s21_im,power_dbm\n"
                                : "freq_hz,s21_re,s21_im\n");
    for (std::size_t i = 0; i < trace.frequencies.size(); ++i) {
        f << format_double(trace.frequencies[i], 17) << ','
          << format_double(trace.s21[i].real(), 17) << ','
          << format_double(trace.s21[i].imag(), 17);
        if (trace.input_power_dbm)
            f << ',' << format_double(*trace.input_power_dbm, 17);
        f << '\n';
    }
    if (!f) throw std::runtime_error("failed while writing " + path.string());
}

// Header: bridge_count,loss[,loss_err].
inline LossDataset parse_loss_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parse_error("empty file", 1);

    const auto header = detail::split_csv(lines[0]);
    const bool has_err = header.size() == 3 && header[2] == "loss_err";
    if (!(header.size() == 2 || has_err) || header[0] != "bridge_count" ||
        header[1] != "loss")
        throw parse_error("expected header bridge_count,loss[,loss_err]", 1);

    LossDataset ds;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto cells = detail::split_csv(lines[i]);
        if (cells.size() != header.size())
            throw parse_error("expected " + std::to_string(header.size()) +
                                  " columns, got " + std::to_string(cells.size()),
                              i + 1);
        LossPoint p;
        const double count = detail::parse_number(cells[0], i + 1);
        if (count < 0 || count != static_cast<int>(count))
            throw parse_error("bridge_count must be a nonnegative integer", i + 1);
        p.bridge_count = static_cast<int>(count);
        p.loss = detail::parse_number(cells[1], i + 1);
        if (has_err) p.loss_err = detail::parse_number(cells[2], i + 1);
        ds.points.push_back(p);
    }
    if (ds.points.empty()) throw parse_error("no data rows", lines.size());
    return ds;
}

inline void write_loss_csv(const LossDataset& ds,
                           const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    bool any_err = false;
    for (const auto& p : ds.points) any_err |= p.loss_err.has_value();
    f << (any_err ? "bridge_count,loss,loss_err\n" : "bridge_count,loss\n");
    for (const auto& p : ds.points) {
        f << p.bridge_count << ',' << format_double(p.loss, 17);
        if (any_err) f << ',' << format_double(p.loss_err.value_or(0.0), 17);
        f << '\n';
    }
    if (!f) throw std::runtime_error("failed while writing " + path.string());
}

// Header: mean_photon_number,qi,qi_err.
inline PowerSweepResult parse_sweep_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parse_error("empty file", 1);
    const auto header = detail::split_csv(lines[0]);
    if (header.size() != 3 || header[0] != "mean_photon_number" ||
        header[1] != "qi" || header[2] != "qi_err")
        throw parse_error("expected header mean_photon_number,qi,qi_err", 1);

    PowerSweepResult sweep;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto cells = detail::split_csv(lines[i]);
        if (cells.size() != 3)
            throw parse_error("expected 3 columns, got " +
                                  std::to_string(cells.size()),
                              i + 1);
        PowerSweepPoint p;
        p.mean_photon_number = detail::parse_number(cells[0], i + 1);
        p.qi = detail::parse_number(cells[1], i + 1);
        p.qi_err = detail::parse_number(cells[2], i + 1);
        sweep.points.push_back(p);
    }
    if (sweep.points.empty()) throw parse_error("no data rows", lines.size());
    return sweep;
}

inline void write_sweep_csv(const PowerSweepResult& sweep,
                            const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "mean_photon_number,qi,qi_err\n";
    for (const auto& p : sweep.points)
        f << format_double(p.mean_photon_number, 17) << ','
          << format_double(p.qi, 17) << ',' << format_double(p.qi_err, 17)
          << '\n';
    if (!f) throw std::runtime_error("failed while writing " + path.string());
}

} // namespace cpwq::io
