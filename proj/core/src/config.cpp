#include "osc_ising/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace osc_ising {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

const std::string &last_value(const std::map<std::string, std::vector<std::string>> &values, const std::string &key) {
    return values.at(key).back();
}

}  // namespace

Config Config::parse(const std::string &text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        cfg.add(key, trim(line.substr(eq + 1)));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void Config::set(const std::string &key, const std::string &value) { values_[key] = {value}; }

void Config::add(const std::string &key, const std::string &value) { values_[key].push_back(value); }

void Config::set_assignment(const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::vector<std::string> &Config::all(const std::string &key) const {
    static const std::vector<std::string> empty;
    auto it = values_.find(key);
    return it == values_.end() ? empty : it->second;
}

std::optional<std::string> Config::get_string(const std::string &key) const {
    if (!has(key)) return std::nullopt;
    return last_value(values_, key);
}

std::optional<double> Config::get_double(const std::string &key) const {
    if (!has(key)) return std::nullopt;
    const std::string &text = last_value(values_, key);
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a number");
    }
    return v;
}

std::optional<std::int64_t> Config::get_int(const std::string &key) const {
    if (!has(key)) return std::nullopt;
    const std::string &text = last_value(values_, key);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
    }
    return v;
}

std::optional<std::uint64_t> Config::get_uint(const std::string &key) const {
    if (!has(key)) return std::nullopt;
    const std::string &text = last_value(values_, key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
    }
    return v;
}

std::optional<bool> Config::get_bool(const std::string &key) const {
    if (!has(key)) return std::nullopt;
    const std::string &text = last_value(values_, key);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

void Config::check_known(const std::vector<std::string> &known) const {
    for (const auto &[key, _] : values_) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
    }
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    for (const auto &[key, _] : values_) out.push_back(key);
    return out;
}

std::vector<std::string> split_list(const std::string &text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace osc_ising
