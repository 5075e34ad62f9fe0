#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "types.hpp"

namespace tangle {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("cannot format number");
    return {buf, end};
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("malformed number: " + std::string(s));
    return v;
}

inline unsigned long long parse_uint(std::string_view s) {
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("malformed integer: " + std::string(s));
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Ordered key/value record of an experiment's parameters. Rendered as the
/// `# config: ...` header of every CSV so a run can be repeated from its output.
class ConfigRecord {
public:
    ConfigRecord& set(std::string key, std::string value) {
        for (auto& [k, v] : entries_)
            if (k == key) {
                v = std::move(value);
                return *this;
            }
        entries_.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    ConfigRecord& set(std::string key, double value) { return set(std::move(key), format_double(value)); }
    ConfigRecord& set(std::string key, unsigned long long value) {
        return set(std::move(key), std::to_string(value));
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string header() const {
        std::string out = "# config:";
        for (const auto& [k, v] : entries_) out += " " + k + "=" + v;
        return out;
    }

    /// INI form readable by the CLI's --config option.
    std::string ini() const {
        std::string out;
        for (const auto& [k, v] : entries_)
            if (k != "command") out += k + "=" + v + "\n";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const ConfigRecord& config, std::string_view columns)
        : path_(path), out_(path) {
        if (!out_) throw Error("cannot open output file " + path);
        out_ << config.header() << '\n' << columns << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw Error("failed writing " + path_);
    }

    const std::string& path() const { return path_; }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const char* v) { return v; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v) {
        if constexpr (std::is_same_v<I, bool>)
            return v ? "1" : "0";
        else
            return std::to_string(v);
    }

    std::string path_;
    std::ofstream out_;
};

} // namespace tangle
