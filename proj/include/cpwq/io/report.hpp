#pragma once

// Flat key = value report documents. Keys carry their units; values are
// printed with fixed formatting so identical inputs give byte-identical
// output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpwq::io {

inline std::string format_double(double value, int significant_digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

class Report {
public:
    explicit Report(std::string title) {
        entries_.emplace_back("report", std::move(title));
    }

    Report& add(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
        return *this;
    }

    Report& add(const std::string& key, double value, int significant_digits = 9) {
        return add(key, format_double(value, significant_digits));
    }

    Report& add(const std::string& key, long long value) {
        return add(key, std::to_string(value));
    }

    Report& add(const std::string& key, int value) {
        return add(key, static_cast<long long>(value));
    }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += k;
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write report to " + path.string());
        f << str();
        if (!f)
            throw std::runtime_error("failed while writing " + path.string());
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace cpwq::io
