#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lakeice {

/// File-system level failure; maps to exit code 2 in the CLI.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace csv {

/// Shortest decimal form that parses back to the identical double, so
/// canonical files round-trip byte-for-byte.
inline std::string format_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view field, int line_no, std::string_view what) {
    double v = 0.0;
    auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    if (r.ec != std::errc{} || r.ptr != field.data() + field.size())
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-numeric " +
                                    std::string(what) + " '" + std::string(field) + "'");
    return v;
}

inline long parse_int(std::string_view field, int line_no, std::string_view what) {
    long v = 0;
    auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    if (r.ec != std::errc{} || r.ptr != field.data() + field.size())
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-integer " +
                                    std::string(what) + " '" + std::string(field) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Splits into lines; accepts both \n and \r\n, ignores one trailing newline.
inline std::vector<std::string_view> lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string_view line =
            pos == std::string_view::npos ? text.substr(start) : text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace csv

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return ss.str();
}

/// Write-temp-then-rename so partially written outputs are never observed.
inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw IoError("write failure on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

}  // namespace lakeice
