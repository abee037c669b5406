// Small RFC-4180 CSV reader/writer plus locale-independent number formatting.
// Doubles are printed with std::to_chars (shortest round-trip form) so output
// bytes are deterministic and parse back to the exact same value.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcl {

inline std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

// Parses a whole CSV file. Requires a header row; every data row must have
// the same number of fields as the header (ragged rows are an error).
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;

    auto end_record = [&](std::size_t pos) {
        if (record.empty() && field.empty()) return;  // blank line
        record.push_back(field);
        field.clear();
        if (table.header.empty()) {
            table.header = record;
        } else if (record.size() != table.header.size()) {
            throw std::runtime_error("read_csv: ragged row at byte " + std::to_string(pos) + " in " +
                                     path + " (" + std::to_string(record.size()) +
                                     " fields, header has " + std::to_string(table.header.size()) +
                                     ")");
        } else {
            table.rows.push_back(record);
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            record.push_back(field);
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record(i);
        } else {
            field += c;
        }
    }
    if (in_quotes) throw std::runtime_error("read_csv: unterminated quote in " + path);
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record(text.size());
    if (table.header.empty()) throw std::runtime_error("read_csv: empty file " + path);
    return table;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (out_.fail()) throw std::runtime_error("CsvWriter: write failed");
    }

private:
    std::ofstream out_;
};

}  // namespace rcl
