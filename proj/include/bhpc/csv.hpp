#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhpc {

/// Shortest decimal string that round-trips to the same double. Used for all
/// numeric output so files are byte-identical across runs and worker counts.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

/// Minimal CSV emitter: header row then homogeneous data rows.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void header(const std::vector<std::string>& names) { write_strings(names); }

    void row(const std::vector<double>& values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            first = false;
            out_ << format_double(v);
        }
        out_ << '\n';
    }

    void raw_row(const std::vector<std::string>& cells) { write_strings(cells); }

private:
    void write_strings(const std::vector<std::string>& cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out_ << ',';
            first = false;
            out_ << c;
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }

    std::vector<double> column(const std::string& name) const {
        int idx = column_index(name);
        if (idx < 0) throw std::runtime_error("csv column not found: " + name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(idx)]);
        return out;
    }
};

/// Reads a CSV produced by CsvWriter (no quoting or escapes).
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.columns = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size())
                throw std::runtime_error("csv: non-numeric cell '" + c + "' in " + path);
            row.push_back(v);
        }
        if (row.size() != table.columns.size())
            throw std::runtime_error("csv: ragged row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace bhpc
