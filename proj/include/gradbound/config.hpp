#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gradbound {

/// Raised for malformed or semantically invalid experiment specs; the
/// message carries the line or field that failed.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structured key-value spec text:
///   [section]
///   key = value     # number | "string" | bareword | true/false | [v, ...]
/// Keys are addressed as "section.key"; keys before any section header live
/// in the "" section.
class Config {
  public:
    using Value = std::variant<double, std::string, bool, std::vector<double>,
                               std::vector<std::string>>;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open spec file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static Config parse(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = strip_comment(line);
            std::size_t b = 0, e = stripped.size();
            while (b < e && std::isspace(static_cast<unsigned char>(stripped[b]))) ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(stripped[e - 1]))) --e;
            if (b == e) continue;
            const std::string body = stripped.substr(b, e - b);
            if (body.front() == '[') {
                if (body.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": unterminated section header");
                section = body.substr(1, body.size() - 2);
                continue;
            }
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(body.substr(0, eq));
            std::string val = trim(body.substr(eq + 1));
            if (key.empty() || val.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": empty key or value");
            const std::string full = section.empty() ? key : section + "." + key;
            cfg.values_[full] = parse_value(val, origin, lineno);
            cfg.lines_[full] = lineno;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double number(const std::string& key) const {
        const Value& v = fetch(key);
        if (const double* d = std::get_if<double>(&v)) return *d;
        throw ConfigError(where(key) + ": expected a number for '" + key + "'");
    }
    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    std::string text(const std::string& key) const {
        const Value& v = fetch(key);
        if (const std::string* s = std::get_if<std::string>(&v)) return *s;
        if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
        if (const double* d = std::get_if<double>(&v)) {
            std::ostringstream ss;
            ss << *d;
            return ss.str();
        }
        throw ConfigError(where(key) + ": expected a string for '" + key + "'");
    }
    std::string text_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }
    bool flag_or(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const Value& v = fetch(key);
        if (const bool* b = std::get_if<bool>(&v)) return *b;
        throw ConfigError(where(key) + ": expected true/false for '" + key + "'");
    }
    std::vector<double> numbers(const std::string& key) const {
        const Value& v = fetch(key);
        if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
        if (const double* d = std::get_if<double>(&v)) return {*d};
        throw ConfigError(where(key) + ": expected a numeric array for '" + key + "'");
    }
    std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const {
        return has(key) ? numbers(key) : fallback;
    }

    /// Positive-number accessor used by validation-heavy call sites.
    double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0))
            throw ConfigError(where(key) + ": field '" + key + "' must be positive (got " +
                              std::to_string(v) + ")");
        return v;
    }
    double positive_or(const std::string& key, double fallback) const {
        return has(key) ? positive(key) : fallback;
    }

    std::string where(const std::string& key) const {
        auto it = lines_.find(key);
        if (it == lines_.end()) return origin_;
        return origin_ + ":" + std::to_string(it->second);
    }
    const std::string& origin() const { return origin_; }

    /// Keys in file order, for the manifest echo.
    std::vector<std::pair<std::string, std::string>> entries() const {
        std::vector<std::pair<int, std::string>> order;
        for (const auto& [k, line] : lines_) order.emplace_back(line, k);
        std::sort(order.begin(), order.end());
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [line, k] : order) out.emplace_back(k, render(values_.at(k)));
        return out;
    }

  private:
    static std::string strip_comment(const std::string& line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) return line.substr(0, i);
        }
        return line;
    }
    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }
    static Value parse_value(const std::string& raw, const std::string& origin, int lineno) {
        if (raw.front() == '[') {
            if (raw.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": unterminated array");
            std::vector<double> nums;
            std::vector<std::string> strs;
            bool numeric = true;
            std::string item;
            std::istringstream in(raw.substr(1, raw.size() - 2));
            while (std::getline(in, item, ',')) {
                const std::string v = trim(item);
                if (v.empty()) continue;
                try {
                    std::size_t used = 0;
                    const double d = std::stod(v, &used);
                    if (used != v.size()) throw std::invalid_argument("partial");
                    nums.push_back(d);
                } catch (const std::exception&) {
                    numeric = false;
                }
                strs.push_back(unquote(v));
            }
            if (numeric && !nums.empty()) return nums;
            return strs;
        }
        if (raw == "true") return true;
        if (raw == "false") return false;
        if (raw.front() == '"') return unquote(raw);
        try {
            std::size_t used = 0;
            const double d = std::stod(raw, &used);
            if (used == raw.size()) return d;
        } catch (const std::exception&) {
        }
        return raw;  // bareword string (e.g. expressions, enum names)
    }
    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            return s.substr(1, s.size() - 2);
        return s;
    }
    static std::string render(const Value& v) {
        if (const double* d = std::get_if<double>(&v)) {
            std::ostringstream ss;
            ss.precision(17);
            ss << *d;
            return ss.str();
        }
        if (const std::string* s = std::get_if<std::string>(&v)) return *s;
        if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
        if (const auto* a = std::get_if<std::vector<double>>(&v)) {
            std::ostringstream ss;
            ss.precision(17);
            ss << "[";
            for (std::size_t i = 0; i < a->size(); ++i) ss << (i ? ", " : "") << (*a)[i];
            ss << "]";
            return ss.str();
        }
        if (const auto* a = std::get_if<std::vector<std::string>>(&v)) {
            std::ostringstream ss;
            ss << "[";
            for (std::size_t i = 0; i < a->size(); ++i) ss << (i ? ", " : "") << (*a)[i];
            ss << "]";
            return ss.str();
        }
        return "";
    }
    const Value& fetch(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw ConfigError(origin_ + ": missing required field '" + key + "'");
        return it->second;
    }

    std::string origin_;
    std::map<std::string, Value> values_;
    std::map<std::string, int> lines_;
};

}  // namespace gradbound
