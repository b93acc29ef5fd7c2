#pragma once

// Deterministic SVG 1.1 scatter/line plots: fixed layout, fixed number
// formatting, no timestamps, so identical data render to identical bytes.
// Linear and log10 axes with 1-2-5 or decade ticks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"

namespace cpwq::io {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool line = true;
    bool markers = false;
    std::string label;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string px(double v) { return format_double(v, 6); }

// Largest 1-2-5 step giving at most ~max_ticks intervals.
inline double nice_step(double range, int max_ticks) {
    const double raw = range / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

} // namespace detail

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)),
          y_label_(std::move(y_label)) {}

    void set_log_x(bool on) { log_x_ = on; }
    void set_log_y(bool on) { log_y_ = on; }

    void add(Series s) { series_.push_back(std::move(s)); }

    int width() const { return width_; }
    int height() const { return height_; }

    // Renders the panel as a <g> translated to (x_off, y_off).
    std::string render_group(double x_off, double y_off) const {
        double tx_min = std::numeric_limits<double>::infinity();
        double tx_max = -tx_min, ty_min = tx_min, ty_max = -tx_min;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const auto tx = transform(s.x[i], log_x_);
                const auto ty = transform(s.y[i], log_y_);
                if (!tx || !ty) continue;
                tx_min = std::min(tx_min, *tx);
                tx_max = std::max(tx_max, *tx);
                ty_min = std::min(ty_min, *ty);
                ty_max = std::max(ty_max, *ty);
            }
        if (!(tx_min <= tx_max)) { tx_min = 0; tx_max = 1; }
        if (!(ty_min <= ty_max)) { ty_min = 0; ty_max = 1; }
        if (tx_max == tx_min) { tx_min -= 1; tx_max += 1; }
        if (ty_max == ty_min) { ty_min -= 1; ty_max += 1; }
        const double pad_x = 0.05 * (tx_max - tx_min);
        const double pad_y = 0.05 * (ty_max - ty_min);
        tx_min -= pad_x; tx_max += pad_x;
        ty_min -= pad_y; ty_max += pad_y;

        const double pw = width_ - ml_ - mr_;
        const double ph = height_ - mt_ - mb_;
        const auto sx = [&](double t) { return ml_ + (t - tx_min) / (tx_max - tx_min) * pw; };
        const auto sy = [&](double t) { return height_ - mb_ - (t - ty_min) / (ty_max - ty_min) * ph; };

        std::string g = "<g transform=\"translate(" + detail::px(x_off) + "," +
                        detail::px(y_off) + ")\">\n";
        g += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) +
             "\" height=\"" + std::to_string(height_) +
             "\" fill=\"#ffffff\"/>\n";
        g += "<rect x=\"" + detail::px(ml_) + "\" y=\"" + detail::px(mt_) +
             "\" width=\"" + detail::px(pw) + "\" height=\"" + detail::px(ph) +
             "\" fill=\"none\" stroke=\"#000000\"/>\n";

        // Ticks.
        for (const double t : ticks(tx_min, tx_max, log_x_)) {
            const double X = sx(t);
            g += "<line x1=\"" + detail::px(X) + "\" y1=\"" + detail::px(height_ - mb_) +
                 "\" x2=\"" + detail::px(X) + "\" y2=\"" + detail::px(height_ - mb_ + 5) +
                 "\" stroke=\"#000000\"/>\n";
            g += "<line x1=\"" + detail::px(X) + "\" y1=\"" + detail::px(mt_) +
                 "\" x2=\"" + detail::px(X) + "\" y2=\"" + detail::px(height_ - mb_) +
                 "\" stroke=\"#dddddd\"/>\n";
            g += "<text x=\"" + detail::px(X) + "\" y=\"" + detail::px(height_ - mb_ + 18) +
                 "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
                 tick_label(t, log_x_) + "</text>\n";
        }
        for (const double t : ticks(ty_min, ty_max, log_y_)) {
            const double Y = sy(t);
            g += "<line x1=\"" + detail::px(ml_ - 5) + "\" y1=\"" + detail::px(Y) +
                 "\" x2=\"" + detail::px(ml_) + "\" y2=\"" + detail::px(Y) +
                 "\" stroke=\"#000000\"/>\n";
            g += "<line x1=\"" + detail::px(ml_) + "\" y1=\"" + detail::px(Y) +
                 "\" x2=\"" + detail::px(width_ - mr_) + "\" y2=\"" + detail::px(Y) +
                 "\" stroke=\"#dddddd\"/>\n";
            g += "<text x=\"" + detail::px(ml_ - 8) + "\" y=\"" + detail::px(Y + 4) +
                 "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" +
                 tick_label(t, log_y_) + "</text>\n";
        }

        // Series.
        for (const auto& s : series_) {
            if (s.line && s.x.size() >= 2) {
                std::string d;
                bool pen_down = false;
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    const auto tx = transform(s.x[i], log_x_);
                    const auto ty = transform(s.y[i], log_y_);
                    if (!tx || !ty) { pen_down = false; continue; }
                    d += (pen_down ? "L" : "M");
                    d += detail::px(sx(*tx)) + " " + detail::px(sy(*ty)) + " ";
                    pen_down = true;
                }
                g += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color +
                     "\" stroke-width=\"1.5\"/>\n";
            }
            if (s.markers) {
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    const auto tx = transform(s.x[i], log_x_);
                    const auto ty = transform(s.y[i], log_y_);
                    if (!tx || !ty) continue;
                    g += "<circle cx=\"" + detail::px(sx(*tx)) + "\" cy=\"" +
                         detail::px(sy(*ty)) + "\" r=\"3\" fill=\"" + s.color +
                         "\"/>\n";
                }
            }
        }

        // Legend, top right inside the frame.
        double ly = mt_ + 14;
        for (const auto& s : series_) {
            if (s.label.empty()) continue;
            const double lx = width_ - mr_ - 150;
            g += "<line x1=\"" + detail::px(lx) + "\" y1=\"" + detail::px(ly - 4) +
                 "\" x2=\"" + detail::px(lx + 18) + "\" y2=\"" + detail::px(ly - 4) +
                 "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
            g += "<text x=\"" + detail::px(lx + 24) + "\" y=\"" + detail::px(ly) +
                 "\" font-size=\"11\" font-family=\"sans-serif\">" +
                 detail::xml_escape(s.label) + "</text>\n";
            ly += 16;
        }

        g += "<text x=\"" + detail::px(width_ / 2.0) + "\" y=\"" + detail::px(mt_ - 12.0) +
             "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
             detail::xml_escape(title_) + "</text>\n";
        g += "<text x=\"" + detail::px(ml_ + pw / 2.0) + "\" y=\"" +
             detail::px(height_ - 12.0) +
             "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
             detail::xml_escape(x_label_) + "</text>\n";
        g += "<text x=\"16\" y=\"" + detail::px(mt_ + ph / 2.0) +
             "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "transform=\"rotate(-90 16 " + detail::px(mt_ + ph / 2.0) + ")\">" +
             detail::xml_escape(y_label_) + "</text>\n";
        g += "</g>\n";
        return g;
    }

    std::string render() const {
        std::string svg =
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
            std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
            "\">\n";
        svg += render_group(0, 0);
        svg += "</svg>\n";
        return svg;
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << render();
        if (!f) throw std::runtime_error("failed while writing " + path.string());
    }

private:
    static std::optional<double> transform(double v, bool log) {
        if (!std::isfinite(v)) return std::nullopt;
        if (!log) return v;
        if (!(v > 0.0)) return std::nullopt;
        return std::log10(v);
    }

    static std::vector<double> ticks(double lo, double hi, bool log) {
        std::vector<double> t;
        if (log) {
            int d0 = static_cast<int>(std::ceil(lo));
            int d1 = static_cast<int>(std::floor(hi));
            int step = std::max(1, (d1 - d0) / 8 + ((d1 - d0) % 8 ? 1 : 0));
            for (int d = d0; d <= d1; d += step) t.push_back(d);
        } else {
            const double step = detail::nice_step(hi - lo, 6);
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step;
                 v += step)
                t.push_back(v);
        }
        return t;
    }

    static std::string tick_label(double t, bool log) {
        const double v = log ? std::pow(10.0, t) : t;
        // Collapse -0 from rounding.
        return format_double(v == 0.0 ? 0.0 : v, 6);
    }

    std::string title_, x_label_, y_label_;
    bool log_x_ = false, log_y_ = false;
    std::vector<Series> series_;
    int width_ = 640, height_ = 420;
    double ml_ = 80, mr_ = 20, mt_ = 40, mb_ = 56;
};

// Vertically stacked panels in a single SVG document.
class SvgFigure {
public:
    void add_panel(SvgPlot panel) { panels_.push_back(std::move(panel)); }

    std::string render() const {
        int w = 0, h = 0;
        for (const auto& p : panels_) {
            w = std::max(w, p.width());
            h += p.height();
        }
        std::string svg =
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
            std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
        double y = 0;
        for (const auto& p : panels_) {
            svg += p.render_group(0, y);
            y += p.height();
        }
        svg += "</svg>\n";
        return svg;
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << render();
        if (!f) throw std::runtime_error("failed while writing " + path.string());
    }

private:
    std::vector<SvgPlot> panels_;
};

} // namespace cpwq::io
