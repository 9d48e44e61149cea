#pragma once

#include <map>
#include <string>

#include "cmalab/errors.hpp"

namespace cmalab {

/// Flat key-value configuration with [section] headers, '#' or ';' comments.
/// Values stay strings; typed access via get/get_double/get_long.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        if (a == std::string::npos) return "";
        return s.substr(a, b - a + 1);
    }

    static ConfigFile parse(const std::string& text) {
        ConfigFile cf;
        std::string section;
        size_t pos = 0;
        int lineno = 0;
        while (pos <= text.size()) {
            size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            std::string line = trim(text.substr(pos, eol - pos));
            pos = eol + 1;
            ++lineno;
            if (line.empty() || line[0] == '#' || line[0] == ';') {
                if (pos > text.size()) break;
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error("config: malformed section header at line " + std::to_string(lineno));
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw config_error("config: empty section name at line " + std::to_string(lineno));
            } else {
                const size_t eq = line.find('=');
                if (eq == std::string::npos)
                    throw config_error("config: expected 'key = value' at line " + std::to_string(lineno));
                const std::string key = trim(line.substr(0, eq));
                const std::string val = trim(line.substr(eq + 1));
                if (key.empty())
                    throw config_error("config: empty key at line " + std::to_string(lineno));
                cf.sections[section][key] = val;
            }
            if (pos > text.size()) break;
        }
        return cf;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections.find(section);
        return s != sections.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key, const std::string& dflt) const {
        auto s = sections.find(section);
        if (s == sections.end()) return dflt;
        auto k = s->second.find(key);
        return k == s->second.end() ? dflt : k->second;
    }

    double get_double(const std::string& section, const std::string& key, double dflt) const {
        if (!has(section, key)) return dflt;
        const std::string v = get(section, key, "");
        try {
            size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw config_error("config: bad numeric value '" + v + "' for " + section + "." + key);
        }
    }

    long get_long(const std::string& section, const std::string& key, long dflt) const {
        if (!has(section, key)) return dflt;
        const std::string v = get(section, key, "");
        try {
            size_t used = 0;
            const long x = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw config_error("config: bad integer value '" + v + "' for " + section + "." + key);
        }
    }
};

}  // namespace cmalab
