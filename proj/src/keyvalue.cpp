#include "ertrans/keyvalue.hpp"

#include "ertrans/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ertrans::kv {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

Document Document::parse(std::string_view text, std::string origin) {
    Document doc;
    doc.origin_ = std::move(origin);
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        const auto hash = raw.find('#');
        std::string line = trim(raw.substr(0, hash));
        if (line.empty() || line[0] == ';') continue;

        const auto fail = [&](const std::string& msg) {
            throw Error(ErrorKind::Config, doc.origin_ + ":" + std::to_string(line_no) + ": " + msg);
        };

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) fail("empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        Entry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
        if (e.key.empty()) fail("missing key before '='");
        if (doc.find(e.section, e.key) != nullptr) {
            fail("duplicate key '" + e.key + "'" + (section.empty() ? "" : " in [" + section + "]"));
        }
        doc.entries_.push_back(std::move(e));
    }
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

const Entry* Document::find(std::string_view section, std::string_view key) const {
    for (const auto& e : entries_) {
        if (e.section == section && e.key == key) return &e;
    }
    return nullptr;
}

std::string Document::where(const Entry& e) const { return origin_ + ":" + std::to_string(e.line); }

namespace {

double parse_number(const Document& doc, const Entry& e, std::string_view token) {
    double out = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::Config, doc.where(e) + ": key '" + e.key + "' expects a number, got '" + std::string(token) + "'");
    }
    return out;
}

}  // namespace

double to_double(const Document& doc, const Entry& e) { return parse_number(doc, e, e.value); }

int to_int(const Document& doc, const Entry& e) {
    const double v = to_double(doc, e);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw Error(ErrorKind::Config, doc.where(e) + ": key '" + e.key + "' expects an integer");
    }
    return static_cast<int>(v);
}

std::vector<double> to_doubles(const Document& doc, const Entry& e, int expected_count) {
    std::vector<double> out;
    std::string_view v = e.value;
    std::size_t i = 0;
    while (i < v.size()) {
        while (i < v.size() && (v[i] == ' ' || v[i] == '\t' || v[i] == ',')) ++i;
        std::size_t j = i;
        while (j < v.size() && v[j] != ' ' && v[j] != '\t' && v[j] != ',') ++j;
        if (j > i) out.push_back(parse_number(doc, e, v.substr(i, j - i)));
        i = j;
    }
    if (expected_count >= 0 && static_cast<int>(out.size()) != expected_count) {
        throw Error(ErrorKind::Config, doc.where(e) + ": key '" + e.key + "' expects " + std::to_string(expected_count) +
                                           " numbers, got " + std::to_string(out.size()));
    }
    return out;
}

}  // namespace ertrans::kv
