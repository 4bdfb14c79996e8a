#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace eaclutch::io {

/// Numeric CSV with a header row. Empty cells read as NaN.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    bool has(const std::string& name) const;
    /// Throws FormatError naming the missing column.
    const std::vector<double>& column(const std::string& name) const;
};

/// Throws FormatError with origin:line on bad numbers or ragged rows.
CsvTable parse_csv(const std::string& text, const std::string& origin = "<memory>");
CsvTable read_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// 9 significant digits, scientific. "nan" / "inf" / "-inf" otherwise.
std::string format_number(double v);

using Cell = std::variant<double, long long, std::string>;

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);
    void row(const std::vector<double>& values);

private:
    std::ostream& os_;
    std::size_t width_;
};

}  // namespace eaclutch::io
