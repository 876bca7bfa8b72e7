#include "fpflux/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fpflux/types.hpp"

namespace fpflux {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string &s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return true;
}

}  // namespace

Config Config::parse(const std::string &text, const std::string &origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream is(text);
    std::string raw, section;
    int lineno = 0;
    auto err = [&](const std::string &why) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') err("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_name(section)) err("invalid section name '" + section + "'");
            c.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) err("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) err("invalid key '" + key + "'");
        auto &sec = c.data_[section];
        if (sec.count(key)) err("duplicate key '" + key + "' (first set on line " + std::to_string(sec[key].line) + ")");
        sec[key] = Entry{value, lineno};
    }
    return c;
}

Config Config::load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::restrict_to(const std::map<std::string, std::set<std::string>> &allowed) const {
    for (const auto &[section, keys] : data_) {
        auto it = allowed.find(section);
        for (const auto &[key, e] : keys) {
            if (it == allowed.end())
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown section '" + section + "'");
            if (!it->second.count(key))
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" + key + "' in section '" +
                                  section + "'");
        }
        if (keys.empty() && it == allowed.end()) throw ConfigError(origin_ + ": unknown section '" + section + "'");
    }
}

const Config::Entry *Config::find(const std::string &section, const std::string &key) const {
    auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void Config::fail(const Entry &e, const std::string &section, const std::string &key, const std::string &why) const {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key + "' in section '" + section + "': " +
                      why);
}

bool Config::has(const std::string &section, const std::string &key) const { return find(section, key) != nullptr; }

std::string Config::get_string(const std::string &section, const std::string &key, const std::string &dflt) const {
    const Entry *e = find(section, key);
    return e ? e->value : dflt;
}

double Config::get_double(const std::string &section, const std::string &key, double dflt) const {
    const Entry *e = find(section, key);
    if (!e) return dflt;
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (e->value.empty() || *end != '\0' || errno == ERANGE) fail(*e, section, key, "expected a real number");
    return v;
}

long Config::get_long(const std::string &section, const std::string &key, long dflt) const {
    const Entry *e = find(section, key);
    if (!e) return dflt;
    errno = 0;
    char *end = nullptr;
    const long v = std::strtol(e->value.c_str(), &end, 10);
    if (e->value.empty() || *end != '\0' || errno == ERANGE) fail(*e, section, key, "expected an integer");
    return v;
}

bool Config::get_bool(const std::string &section, const std::string &key, bool dflt) const {
    const Entry *e = find(section, key);
    if (!e) return dflt;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(*e, section, key, "expected true or false");
}

std::vector<double> Config::get_doubles(const std::string &section, const std::string &key,
                                        const std::vector<double> &dflt) const {
    const Entry *e = find(section, key);
    if (!e) return dflt;
    std::vector<double> out;
    std::istringstream is(e->value);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        errno = 0;
        char *end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0' || errno == ERANGE) fail(*e, section, key, "expected a comma-separated list of reals");
        out.push_back(v);
    }
    if (out.empty()) fail(*e, section, key, "empty list");
    return out;
}

void Config::set(const std::string &section, const std::string &key, const std::string &value) {
    if (!valid_name(key) || (!section.empty() && !valid_name(section))) throw ConfigError("invalid name in override");
    auto &sec = data_[section];
    auto it = sec.find(key);
    sec[key] = Entry{value, it == sec.end() ? 0 : it->second.line};
}

std::string Config::canonical() const {
    std::ostringstream os;
    for (const auto &[section, keys] : data_) {
        if (!section.empty()) os << '[' << section << "]\n";
        for (const auto &[key, e] : keys) os << key << " = " << e.value << '\n';
    }
    return os.str();
}

}  // namespace fpflux
