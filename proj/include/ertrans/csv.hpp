#pragma once

// Comma-separated tables with a '#'-prefixed metadata block, plus a gnuplot
// script writer for each table.

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace ertrans::csv {

// Shortest round-trip decimal form; identical input gives identical text.
std::string format(double v);

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void add_meta(std::string key, std::string value);
    void add_meta(std::string key, double value) { add_meta(std::move(key), format(value)); }

    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& values);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& meta() const noexcept { return meta_; }

    void write(std::ostream& os) const;
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

struct Series {
    int column;  // 1-based, gnuplot convention
    std::string title;
    // Plot only rows whose filter_column equals filter_value (0 = all rows).
    int filter_column = 0;
    double filter_value = 0.0;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int x_column = 1;
    std::vector<Series> series;
};

// Writes <csv stem>.gp next to the CSV, rendering to <csv stem>.png.
void save_gnuplot(const std::filesystem::path& csv_path, const PlotSpec& spec);

}  // namespace ertrans::csv
