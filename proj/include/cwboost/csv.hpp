#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cwboost {

// Shortest round-trip decimal representation.
std::string format_double(double value);

// Quotes a field only when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Writes via a temporary file in the same directory plus rename, so an
// interrupted run never leaves a partial file at the final path.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

// Comma-separated, header required, UTF-8, '.' decimal separator.
CsvTable read_csv(const std::filesystem::path& path);

double parse_csv_number(const std::string& field, const std::string& context);

}  // namespace cwboost
