#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netfx {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 when absent
    int require_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, char sep = ',');
CsvTable read_csv_file(const std::string& path, char sep = ',');

double csv_double(const std::vector<std::string>& row, int col);

void write_csv_header(std::ostream& out, const std::vector<std::string>& columns);

// enough digits to round-trip a double
std::string format_double(double value);

} // namespace netfx
