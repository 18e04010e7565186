#pragma once

// Minimal reader/writer for the plain comma-separated tables used by the data
// directories and result files. No quoting: fields never contain commas.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace blendrp::csv {

struct Row {
    std::size_t line = 0; // 1-based line in the file
    std::vector<std::string> fields;
};

class Table {
public:
    static Table read(const std::filesystem::path& path);

    const std::string& file() const { return file_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }

    /// Column index; throws DataError when the column is absent.
    std::size_t require(const std::string& column) const;
    std::optional<std::size_t> find(const std::string& column) const;

    const std::string& field(const Row& row, std::size_t column) const;
    double number(const Row& row, std::size_t column) const;
    /// Blank cell yields nullopt; anything else must parse as a number.
    std::optional<double> optional_number(const Row& row, std::size_t column) const;
    int integer(const Row& row, std::size_t column) const;

private:
    std::string file_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> columns_;
    std::vector<Row> rows_;
};

std::vector<std::string> split(const std::string& line, char sep = ',');
std::string trim(const std::string& text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

} // namespace blendrp::csv
