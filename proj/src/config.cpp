#include "lab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

ConfigFile parse_config_text(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("unterminated section header", lineno,
                                  static_cast<int>(body.size()));
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", lineno, 1);
            cfg.sections[section];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineno, 1);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno, 1);
        if (section.empty()) throw ConfigError("key before any [section]", lineno, 1);
        auto& sec = cfg.sections[section];
        if (sec.count(key))
            throw ConfigError("duplicate key '" + key + "'", lineno, 1);
        sec[key] = ConfigFile::Entry{value, lineno};
    }
    return cfg;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

ParamReader::ParamReader(const ConfigFile& file, std::string section)
    : file_(file), section_(std::move(section)) {}

std::optional<std::string> ParamReader::raw(const std::string& key) {
    consumed_[key] = true;
    const auto s = file_.sections.find(section_);
    if (s == file_.sections.end()) return std::nullopt;
    const auto e = s->second.find(key);
    if (e == s->second.end()) return std::nullopt;
    return e->second.value;
}

bool ParamReader::present(const std::string& key) const {
    return file_.has(section_, key);
}

double ParamReader::number(const std::string& key) {
    const auto v = raw(key);
    if (!v) throw ConfigError("missing required key '" + section_ + "." + key + "'");
    try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing characters");
        resolved_[key] = *v;
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + section_ + "." + key + "' is not a number: " + *v);
    }
}

double ParamReader::number(const std::string& key, double fallback) {
    if (!raw(key)) {
        std::ostringstream os;
        os << fallback;
        resolved_[key] = os.str();
        return fallback;
    }
    consumed_[key] = false;  // re-read through the strict path
    return number(key);
}

long ParamReader::integer(const std::string& key) {
    const double d = number(key);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d)
        throw ConfigError("key '" + section_ + "." + key + "' must be an integer");
    return l;
}

long ParamReader::integer(const std::string& key, long fallback) {
    if (!raw(key)) {
        resolved_[key] = std::to_string(fallback);
        return fallback;
    }
    return integer(key);
}

std::string ParamReader::str(const std::string& key) {
    const auto v = raw(key);
    if (!v) throw ConfigError("missing required key '" + section_ + "." + key + "'");
    resolved_[key] = *v;
    return *v;
}

std::string ParamReader::str(const std::string& key, const std::string& fallback) {
    if (!raw(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    return str(key);
}

bool ParamReader::flag(const std::string& key, bool fallback) {
    const auto v = raw(key);
    if (!v) {
        resolved_[key] = fallback ? "true" : "false";
        return fallback;
    }
    resolved_[key] = *v;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("key '" + section_ + "." + key + "' must be a boolean");
}

std::vector<double> ParamReader::number_list(const std::string& key) {
    const auto v = raw(key);
    if (!v) throw ConfigError("missing required key '" + section_ + "." + key + "'");
    resolved_[key] = *v;
    std::vector<double> out;
    std::string cur;
    std::istringstream in(*v);
    while (std::getline(in, cur, ',')) {
        try {
            out.push_back(std::stod(cur));
        } catch (const std::exception&) {
            throw ConfigError("key '" + section_ + "." + key + "' has a malformed entry: " + cur);
        }
    }
    if (out.empty()) throw ConfigError("key '" + section_ + "." + key + "' is an empty list");
    return out;
}

std::vector<double> ParamReader::number_list(const std::string& key,
                                             const std::vector<double>& fallback) {
    if (!raw(key)) {
        std::ostringstream os;
        for (std::size_t i = 0; i < fallback.size(); ++i) {
            if (i) os << ",";
            os << fallback[i];
        }
        resolved_[key] = os.str();
        return fallback;
    }
    return number_list(key);
}

void ParamReader::finish() const {
    const auto s = file_.sections.find(section_);
    if (s == file_.sections.end()) return;
    for (const auto& [key, entry] : s->second) {
        if (!consumed_.count(key))
            throw ConfigError("unknown key '" + section_ + "." + key + "'", entry.line, 1);
    }
}

}  // namespace lab
