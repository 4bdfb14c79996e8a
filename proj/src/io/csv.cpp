#include "eaclutch/io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "eaclutch/errors.hpp"

namespace eaclutch::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace

bool CsvTable::has(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw FormatError("missing column '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto cells = split(s);
        if (!have_header) {
            t.header = cells;
            t.columns.assign(cells.size(), {});
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].empty()) {
                t.columns[i].push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str() || *end != '\0') {
                throw FormatError(origin + ":" + std::to_string(lineno) + ": not a number in column '" +
                                  t.header[i] + "': " + cells[i]);
            }
            t.columns[i].push_back(v);
        }
    }
    if (!have_header) throw FormatError(origin + ": empty file");
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed: " + path);
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << csv_escape(header[i]);
    os_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw DomainError("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        if (const auto* d = std::get_if<double>(&cells[i])) {
            os_ << format_number(*d);
        } else if (const auto* n = std::get_if<long long>(&cells[i])) {
            os_ << *n;
        } else {
            os_ << csv_escape(std::get<std::string>(cells[i]));
        }
    }
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<Cell> cells(values.begin(), values.end());
    row(cells);
}

}  // namespace eaclutch::io
