#include "netfx/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netfx/error.hpp"

namespace netfx {

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return static_cast<int>(k);
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    const int ix = column_index(name);
    if (ix < 0) throw DataError("missing column '" + name + "'");
    return ix;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace

CsvTable read_csv(std::istream& in, char sep) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            table.columns = split_line(line, sep);
            have_header = true;
            continue;
        }
        auto row = split_line(line, sep);
        if (row.size() != table.columns.size())
            throw DataError("row " + std::to_string(lineno) + " has " +
                            std::to_string(row.size()) + " fields, header has " +
                            std::to_string(table.columns.size()));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw DataError("CSV input has no header row");
    return table;
}

CsvTable read_csv_file(const std::string& path, char sep) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    return read_csv(in, sep);
}

double csv_double(const std::vector<std::string>& row, int col) {
    const std::string& s = row[static_cast<std::size_t>(col)];
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("cannot parse '" + s + "' as a number");
    }
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& columns) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (k) out << ",";
        out << columns[k];
    }
    out << "\n";
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace netfx
