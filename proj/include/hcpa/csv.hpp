/*
 Copyright 2026 The hcpa Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef HCPA_CSV_HPP
#define HCPA_CSV_HPP

#include <cstddef>
#include <initializer_list>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hcpa/errors.hpp"

namespace hcpa::csv {

/// Round-trippable decimal text (17 significant digits, '.' separator).
inline std::string format(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

/// Writes comma-separated rows terminated by '\n'.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto n : names) {
            if (!first) os_ << ',';
            os_ << n;
            first = false;
        }
        os_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((emit(fields, first)), ...);
        os_ << '\n';
    }

private:
    void emit(double v, bool& first) { sep(first); os_ << format(v); }
    void emit(std::size_t v, bool& first) { sep(first); os_ << v; }
    void emit(std::string_view v, bool& first) { sep(first); os_ << v; }
    void emit(const char* v, bool& first) { sep(first); os_ << v; }
    void sep(bool& first) {
        if (!first) os_ << ',';
        first = false;
    }

    std::ostream& os_;
};

/// Parsed numeric table with a header row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ConfigError("CSV is missing column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

inline Table read(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("CSV is empty");
    t.columns = split(line);
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != t.columns.size()) throw ConfigError("CSV row has wrong number of fields: " + line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::istringstream cs(c);
            cs.imbue(std::locale::classic());
            double v = 0.0;
            if (!(cs >> v)) throw ConfigError("CSV field is not a number: '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace hcpa::csv

#endif  // HCPA_CSV_HPP
