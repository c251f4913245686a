#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace uavloc {

/// Locale-independent shortest round-trip formatting; identical input yields
/// identical bytes, which the deterministic outputs rely on.
inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_number(long long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_number(int v) { return csv_number(static_cast<long long>(v)); }

/// Minimal CSV emitter: one header row, '\n' after every row including the
/// last.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) {
            throw std::runtime_error("cannot open output file \"" + path + "\"");
        }
    }

    void header(std::initializer_list<const char*> columns) {
        bool first = true;
        for (const char* c : columns) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const std::string& c : cells) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (out_.fail()) {
            throw std::runtime_error("failed writing output file");
        }
    }

private:
    std::ofstream out_;
};

}  // namespace uavloc
