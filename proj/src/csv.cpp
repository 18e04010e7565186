#include "csv.hpp"

#include "blendrp/core_data.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace blendrp::csv {

std::string trim(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) {
            break;
        }
        start = pos + 1;
    }
    return fields;
}

Table Table::read(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(path.filename().string() + " not found", path.string());
    }
    Table table;
    table.file_ = path.string();
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split(line);
        if (!have_header) {
            table.header_ = fields;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (!table.columns_.emplace(fields[i], i).second) {
                    throw DataError("duplicate column '" + fields[i] + "'", table.file_, line_no);
                }
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header_.size()) {
            throw DataError("expected " + std::to_string(table.header_.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            table.file_, line_no);
        }
        table.rows_.push_back(Row{line_no, std::move(fields)});
    }
    if (!have_header) {
        throw DataError("missing header row", table.file_, 1);
    }
    return table;
}

std::optional<std::size_t> Table::find(const std::string& column) const
{
    const auto it = columns_.find(column);
    if (it == columns_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Table::require(const std::string& column) const
{
    const auto index = find(column);
    if (!index) {
        throw DataError("missing column '" + column + "'", file_, 1);
    }
    return *index;
}

const std::string& Table::field(const Row& row, std::size_t column) const
{
    return row.fields.at(column);
}

std::optional<double> Table::optional_number(const Row& row, std::size_t column) const
{
    const auto& text = field(row, column);
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw DataError("column '" + header_[column] + "': '" + text + "' is not a finite number", file_, row.line);
    }
    return value;
}

double Table::number(const Row& row, std::size_t column) const
{
    const auto value = optional_number(row, column);
    if (!value) {
        throw DataError("column '" + header_[column] + "' must not be blank", file_, row.line);
    }
    return *value;
}

int Table::integer(const Row& row, std::size_t column) const
{
    const auto& text = field(row, column);
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw DataError("column '" + header_[column] + "': '" + text + "' is not an integer", file_, row.line);
    }
    return value;
}

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";
    }
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

} // namespace blendrp::csv
