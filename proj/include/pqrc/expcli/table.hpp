// Copyright 2026 The pqrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pqrc::expcli {

/// Empty, integer, unsigned, real or text.
using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

[[nodiscard]] inline Cell cell(std::size_t v) { return static_cast<std::uint64_t>(v); }
[[nodiscard]] inline Cell cell(std::int64_t v) { return v; }
[[nodiscard]] inline Cell cell(int v) { return static_cast<std::int64_t>(v); }
[[nodiscard]] inline Cell cell(bool v) { return static_cast<std::int64_t>(v ? 1 : 0); }
[[nodiscard]] inline Cell cell(double v) { return v; }
[[nodiscard]] inline Cell cell(std::string v) { return v; }
[[nodiscard]] inline Cell cell(const char *v) { return std::string(v); }
[[nodiscard]] inline Cell cell(std::optional<double> v) {
    return v ? Cell(*v) : Cell(std::monostate{});
}

/// Shortest round-trip text, so equal doubles always print equal bytes.
[[nodiscard]] inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        return "0"; // folds -0
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

[[nodiscard]] inline std::string format_cell(const Cell &c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string &v) const {
            if (v.find_first_of(",\"\n") == std::string::npos) {
                return v;
            }
            std::string out = "\"";
            for (const char ch : v) {
                if (ch == '"') {
                    out += '"';
                }
                out += ch;
            }
            return out + '"';
        }
    };
    return std::visit(Visitor{}, c);
}

class Table {
  public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns_.size()) {
            throw std::logic_error("Table: row has " + std::to_string(row.size()) + " cells, expected " +
                                   std::to_string(columns_.size()));
        }
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] const std::vector<std::string> &columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<Cell>> &rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i] == name) {
                return i;
            }
        }
        throw std::out_of_range("Table: no column '" + std::string(name) + "'");
    }

    [[nodiscard]] std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out += (i ? "," : "") + columns_[i];
        }
        out += '\n';
        for (const auto &row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) {
                    out += ',';
                }
                out += format_cell(row[i]);
            }
            out += '\n';
        }
        return out;
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Splits one CSV line written by Table::to_csv.
[[nodiscard]] inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

} // namespace pqrc::expcli
