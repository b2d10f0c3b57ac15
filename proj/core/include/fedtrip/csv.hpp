#pragma once

#include <charconv>
#include <fstream>
#include <string>

#include "fedtrip/errors.hpp"

namespace fedtrip {

// Shortest round-trip decimal representation; '.' separator regardless of
// locale, so emitted CSVs are byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw UsageError("format_double: conversion failed");
    return std::string(buf, end);
}

// Line-oriented CSV writer with LF endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw FormatError(path + ": cannot open for writing");
    }

    void raw_line(const std::string& line) { out_ << line << '\n'; }

    CsvWriter& field(const std::string& v) {
        if (!first_) out_ << ',';
        out_ << v;
        first_ = false;
        return *this;
    }
    CsvWriter& field(double v) { return field(format_double(v)); }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    CsvWriter& field(std::size_t v) { return field(std::to_string(v)); }
    void end_line() {
        out_ << '\n';
        first_ = true;
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace fedtrip
