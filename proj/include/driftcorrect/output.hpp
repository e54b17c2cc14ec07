#pragma once

// Emission of result tables as CSV (with '#'-prefixed metadata header) or
// as a single JSON object {"meta": {...}, "data": {column: [values...]}}.
//
// Doubles are printed with 17 significant digits so every value round-trips
// exactly; stripping the '#' lines from the CSV leaves a strictly valid CSV
// file. JSON output follows the library's JSON serializer convention of
// rendering non-finite numbers as null (found_flag tells the two cases
// apart for boundary curves).

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace driftcorrect {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// %.17g: shortest fixed-precision form that round-trips IEEE doubles.
inline std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

inline void write_csv(const Table& t, std::ostream& os) {
    for (const auto& [k, v] : t.meta) os << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ",";
            if (const double* d = std::get_if<double>(&row[c]))
                os << format_full(*d);
            else if (const long long* i = std::get_if<long long>(&row[c]))
                os << *i;
            else
                os << std::get<std::string>(row[c]);
        }
        os << "\n";
    }
}

inline void write_json(const Table& t, std::ostream& os) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["data"] = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        nlohmann::ordered_json col = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            if (const double* d = std::get_if<double>(&row[c]))
                col.push_back(*d);
            else if (const long long* i = std::get_if<long long>(&row[c]))
                col.push_back(*i);
            else
                col.push_back(std::get<std::string>(row[c]));
        }
        j["data"][t.columns[c]] = std::move(col);
    }
    os << j.dump(2) << "\n";
}

}  // namespace driftcorrect
