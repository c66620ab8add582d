#include "dmgsim/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dmgsim {

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_number failed");
    }
    return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::runtime_error("missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const
{
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_open = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            row_open = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            row_open = true;
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(row));
            row.clear();
            row_open = false;
        } else if (c != '\r') {
            field += c;
            row_open = true;
        }
    }
    if (quoted) {
        throw std::runtime_error("unterminated quoted CSV field");
    }
    if (row_open) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
    }
    CsvTable t;
    if (records.empty()) {
        return t;
    }
    t.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size()) {
            throw std::runtime_error("CSV row " + std::to_string(r + 1) + " has " +
                                     std::to_string(records[r].size()) + " fields, header has " +
                                     std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

} // namespace dmgsim
