#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace sizenet {

struct TextLine {
  std::size_t number = 0;  // 1-based line number in the source file
  std::string text;
};

// Non-empty lines of a text file, with their original line numbers.
// Lines that are empty or all-whitespace are skipped.
std::vector<TextLine> read_lines(const std::string& path);

std::vector<std::string> split_fields(const std::string& line, char sep = ',');

// Strict parsers: the whole field must be consumed. `where` names the file
// and line for the error message, e.g. "sales.csv:12".
long parse_long(const std::string& field, const std::string& where);
double parse_double(const std::string& field, const std::string& where);

// Shortest round-trippable-ish decimal; %.9g keeps the artifact files
// stable across runs without dumping 17 digits everywhere.
std::string fmt_g9(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sizenet
