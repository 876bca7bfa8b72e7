#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace fpflux {

// Sectioned key = value text:
//
//   # comment
//   [flux]
//   beta = 5
//   times = 0.5, 1, 2
//
// Keys before the first section header belong to the section "" . Values keep their text;
// typed getters convert on access and report the source line on failure.
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Config parse(const std::string &text, const std::string &origin = "<config>");
    static Config load(const std::string &path);

    // Throws ConfigError naming the first key (with its line) that is not in `allowed` for
    // its section, and the first section not listed at all.
    void restrict_to(const std::map<std::string, std::set<std::string>> &allowed) const;

    bool has(const std::string &section, const std::string &key) const;
    std::string get_string(const std::string &section, const std::string &key, const std::string &dflt) const;
    double get_double(const std::string &section, const std::string &key, double dflt) const;
    long get_long(const std::string &section, const std::string &key, long dflt) const;
    bool get_bool(const std::string &section, const std::string &key, bool dflt) const;
    std::vector<double> get_doubles(const std::string &section, const std::string &key,
                                    const std::vector<double> &dflt) const;

    void set(const std::string &section, const std::string &key, const std::string &value);

    const std::map<std::string, std::map<std::string, Entry>> &sections() const { return data_; }
    const std::string &origin() const { return origin_; }

    // Canonical text form: sections and keys sorted, one "key = value" per line.
    std::string canonical() const;

private:
    std::map<std::string, std::map<std::string, Entry>> data_;
    std::string origin_;

    const Entry *find(const std::string &section, const std::string &key) const;
    [[noreturn]] void fail(const Entry &e, const std::string &section, const std::string &key,
                           const std::string &why) const;
};

}  // namespace fpflux
