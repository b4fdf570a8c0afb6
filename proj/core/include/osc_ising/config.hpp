#ifndef OSC_ISING_CONFIG_HPP
#define OSC_ISING_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace osc_ising {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration. Keys may repeat; '#' starts a comment.
class Config {
public:
    static Config parse(const std::string &text);
    static Config load(const std::filesystem::path &path);

    /// Replaces every value of `key` (used for command-line overrides).
    void set(const std::string &key, const std::string &value);
    void add(const std::string &key, const std::string &value);
    /// Parses "key=value" and calls set().
    void set_assignment(const std::string &assignment);

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    const std::vector<std::string> &all(const std::string &key) const;

    std::optional<std::string> get_string(const std::string &key) const;
    std::optional<double> get_double(const std::string &key) const;
    std::optional<std::int64_t> get_int(const std::string &key) const;
    std::optional<std::uint64_t> get_uint(const std::string &key) const;
    std::optional<bool> get_bool(const std::string &key) const;

    /// Throws ConfigError naming the first key not in `known`.
    void check_known(const std::vector<std::string> &known) const;

    std::vector<std::string> keys() const;

private:
    std::map<std::string, std::vector<std::string>> values_;
};

std::vector<std::string> split_list(const std::string &text, char sep = ',');

}  // namespace osc_ising

#endif  // OSC_ISING_CONFIG_HPP
