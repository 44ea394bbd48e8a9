#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stark {

// RFC 4180 text with LF line endings and 17 significant digits for reals.
std::string csv_field(std::string_view text);
std::string csv_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Appends one row; numbers are formatted with csv_number.
    template <class... Cells>
    void add(const Cells&... cells) {
        rows.push_back({cell(cells)...});
    }

    std::string str() const;
    // Index of a header column; throws when absent.
    std::size_t column(std::string_view name) const;

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double x) { return csv_number(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long x) { return std::to_string(x); }
    static std::string cell(unsigned long x) { return std::to_string(x); }
    static std::string cell(unsigned x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "true" : "false"; }
};

CsvTable parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace stark
