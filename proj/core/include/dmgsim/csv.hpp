#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dmgsim {

/// Shortest decimal form that round-trips ("0.1", "1e-05", "51200000").
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; throws std::runtime_error naming the missing column.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

} // namespace dmgsim
