#pragma once

#include <string>
#include <vector>

#include "fpflux/types.hpp"

namespace fpflux {

// Writes to a temporary file in the same directory, then renames over `path`.
void atomic_write(const std::string &path, const std::string &content);

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are quoted and inner
// quotes doubled.
std::string csv_field(const std::string &s);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable &row(std::vector<std::string> fields);
    // Convenience for all-numeric rows.
    CsvTable &row_values(const std::vector<double> &values);
    std::string str() const;
    size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// MatrixMarket coordinate format ("real general" / "complex general"); entries with magnitude
// below `drop` are omitted.
std::string matrix_market(const Mat &m, double drop = 0.0);
std::string matrix_market(const CMat &m, double drop = 0.0);
Mat parse_matrix_market_real(const std::string &text);

}  // namespace fpflux
