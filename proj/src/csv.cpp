#include "ertrans/csv.hpp"

#include "ertrans/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace ertrans::csv {

namespace {

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::string format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw Error(ErrorKind::InvalidParameter, "table needs at least one column");
}

void Table::add_meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) {
        throw Error(ErrorKind::InvalidParameter, "row has " + std::to_string(cells.size()) + " cells, table has " +
                                                     std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(cells));
}

void Table::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    add_row(std::move(cells));
}

void Table::write(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << quote(columns_[i]);
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << quote(row[i]);
        os << "\n";
    }
}

void Table::save(const std::filesystem::path& path) const {
    auto out = open_for_write(path);
    write(out);
}

void save_gnuplot(const std::filesystem::path& csv_path, const PlotSpec& spec) {
    auto gp = csv_path;
    gp.replace_extension(".gp");
    auto png = csv_path.filename();
    png.replace_extension(".png");
    auto out = open_for_write(gp);
    out << "set datafile separator ','\n"
        << "set datafile commentschars '#'\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << png.string() << "'\n"
        << "set title '" << spec.title << "'\n"
        << "set xlabel '" << spec.xlabel << "'\n"
        << "set ylabel '" << spec.ylabel << "'\n"
        << "set grid\n";
    const std::string data = "'" + csv_path.filename().string() + "'";
    out << "plot ";
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        if (i) out << ", \\\n     ";
        out << data << " using " << spec.x_column << ":";
        if (s.filter_column > 0) {
            out << "($" << s.filter_column << "==" << format(s.filter_value) << " ? $" << s.column << " : 1/0)";
        } else {
            out << s.column;
        }
        out << " with lines title '" << s.title << "'";
    }
    out << "\n";
}

}  // namespace ertrans::csv
