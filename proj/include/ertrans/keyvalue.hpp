#pragma once

// Flat, sectioned key-value text:
//
//   # comment
//   top_level_key = value
//   [section]
//   key = value   # trailing comment
//
// Used for run configurations and spin-parameter files alike.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ertrans::kv {

struct Entry {
    std::string section;  // "" for keys before the first [section]
    std::string key;
    std::string value;
    int line = 0;
};

class Document {
public:
    static Document parse(std::string_view text, std::string origin = "<string>");
    static Document load(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const std::string& origin() const noexcept { return origin_; }
    const Entry* find(std::string_view section, std::string_view key) const;

    // "origin:line: message", used for every diagnostic.
    std::string where(const Entry& e) const;

private:
    std::string origin_;
    std::vector<Entry> entries_;
};

double to_double(const Document& doc, const Entry& e);
int to_int(const Document& doc, const Entry& e);
// Whitespace- or comma-separated list; expected_count < 0 accepts any length.
std::vector<double> to_doubles(const Document& doc, const Entry& e, int expected_count = -1);

std::string trim(std::string_view s);

}  // namespace ertrans::kv
