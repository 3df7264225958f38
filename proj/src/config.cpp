#include "dickesq/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "dickesq/error.hpp"

namespace dickesq {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

double to_double(std::string_view text, const std::string& key) {
    text = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': expected a number, got '" + std::string(text) + "'");
    return v;
}

} // namespace

Config Config::parse(std::string_view text, std::string_view source) {
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = std::string(source) + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = std::string(trim(line.substr(eq + 1)));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
        if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

Config Config::from_record_header(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open '" + csv_path.string() + "'");
    std::string text, line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        std::string_view body = trim(std::string_view(line).substr(1));
        if (body.empty() || body.front() == '@') continue;
        text += std::string(body) + "\n";
    }
    return parse(text, csv_path.string());
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
    values_[key] = std::string(trim(value));
}

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(raw(key), key); }

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const std::string& s = raw(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + s + "'");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + s + "'");
}

void Config::absorb_usage(const Config& copy) const {
    for (const auto& k : copy.used_)
        if (values_.count(k)) used_.insert(k);
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::vector<double> parse_number_list(std::string_view text) {
    text = trim(text);
    std::vector<double> out;
    if (text.rfind("linspace", 0) == 0) {
        const auto open = text.find('('), close = text.rfind(')');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open)
            throw ConfigError("malformed linspace: '" + std::string(text) + "'");
        auto args = parse_number_list(text.substr(open + 1, close - open - 1));
        if (args.size() != 3 || args[2] < 1 || args[2] != static_cast<long long>(args[2]))
            throw ConfigError("linspace expects (start, stop, count)");
        const auto n = static_cast<std::size_t>(args[2]);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(n == 1 ? args[0] : args[0] + (args[1] - args[0]) * i / double(n - 1));
        return out;
    }
    std::string token;
    auto flush = [&] {
        if (!token.empty()) out.push_back(to_double(token, "list"));
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) flush();
        else token += c;
    }
    flush();
    return out;
}

} // namespace dickesq
