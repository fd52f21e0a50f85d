#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pacchi2 {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Comma-separated with optional double-quoted fields; fields are trimmed.
// Throws InputError on ragged rows or unreadable files.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& source = "<stream>");

// Parses the whole string as a finite double.
bool parse_double(const std::string& s, double& out);

// %.17g rendering used by every numeric CSV output.
std::string format_real(double x);

// Shortest text that parses back to x; used for labels and keys.
std::string format_short(double x);

}  // namespace pacchi2
