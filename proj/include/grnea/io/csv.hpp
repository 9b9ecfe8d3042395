#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace grnea::io {

/// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// RFC-4180 writer: comma separated, CRLF line ends, UTF-8.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : os_(path, std::ios::binary | std::ios::trunc) {
        if (!os_) throw std::runtime_error("csv: cannot open for writing: " + path);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            os_ << csv_escape(fields[i]);
        }
        os_ << "\r\n";
    }

    void close() { os_.close(); }

private:
    std::ofstream os_;
};

/// Minimal RFC-4180 reader (quoted fields, doubled quotes, CRLF or LF).
inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("csv: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
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
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
            }
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace grnea::io
