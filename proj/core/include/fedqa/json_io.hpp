#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fedqa::io {

/// Whole-file read; throws Error(kIoError) when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);

/// Non-empty lines of a JSON-lines file, without trailing newlines.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Appends one line (a newline is added) and flushes.
void append_line(const std::filesystem::path& path, std::string_view line);

/// RFC 4180 field quoting when the value contains a comma, quote or newline.
std::string csv_escape(std::string_view value);

}  // namespace fedqa::io
