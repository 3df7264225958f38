// Flat key-value configuration.
//
// Grammar (UTF-8, one entry per line):
//
//   line    := blank | comment | entry
//   comment := '#' anything
//   entry   := key ws* '=' ws* value [ws* comment]
//   key     := [A-Za-z0-9_.]+
//
// Keys may appear at most once. Values are kept as text and converted on
// access, so the same file can carry solver-specific keys that other
// subcommands ignore.

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dickesq {

class Config {
public:
    Config() = default;

    static Config parse(std::string_view text, std::string_view source = "<string>");
    static Config load(const std::filesystem::path& path);

    // Reads the "# key = value" header block of a CSV written by write_series.
    // Lines of the form "# @ ..." carry run metadata and are skipped.
    static Config from_record_header(const std::filesystem::path& csv_path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value);
    void erase(const std::string& key) { values_.erase(key); }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    // Keys that were set but never read through a getter.
    std::vector<std::string> unused_keys() const;
    // Marks as used every key that was read from a copy of this config.
    void absorb_usage(const Config& copy) const;

    // Canonical text form: sorted "key = value" lines.
    std::string serialize() const;

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

// Parses "linspace(a, b, n)" or a comma/space separated list of numbers.
std::vector<double> parse_number_list(std::string_view text);

} // namespace dickesq
