#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kobalab/errors.hpp"

namespace kobalab {

// Shortest round-trip decimal form; locale-free, '.' decimal point.
inline std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
        line(header_);
    }

    void cell(const std::string& s) {
        if (!row_.empty()) row_ += ',';
        row_ += s;
    }
    void cell(double v) { cell(fmt_double(v)); }
    void cell(int v) { cell(std::to_string(v)); }
    void end_row() {
        if (cells_in_row(row_) != header_.size())
            throw NumericalError("csv row width does not match the header");
        out_ += row_;
        out_ += '\n';
        row_.clear();
    }

    const std::string& str() const { return out_; }

    void write_file(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + path + "'");
        f << out_;
    }

  private:
    static std::size_t cells_in_row(const std::string& row) {
        if (row.empty()) return 0;
        std::size_t n = 1;
        for (char c : row)
            if (c == ',') ++n;
        return n;
    }
    void line(const std::vector<std::string>& cells) {
        for (const auto& c : cells) cell(c);
        out_ += row_;
        out_ += '\n';
        row_.clear();
    }

    std::vector<std::string> header_;
    std::string row_;
    std::string out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // parsed numeric cells (NaN when not numeric)
    std::vector<std::vector<std::string>> raw;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read csv file '" + path + "'");
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError("csv schema mismatch: row width differs from header");
        std::vector<double> vals;
        for (const auto& c : cells) {
            double v = std::nan("");
            std::from_chars(c.data(), c.data() + c.size(), v);
            vals.push_back(v);
        }
        t.raw.push_back(cells);
        t.rows.push_back(vals);
    }
    if (first) throw ConfigError("csv file is empty");
    return t;
}

}  // namespace kobalab
