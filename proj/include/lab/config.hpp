#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// Strict line-oriented configuration: "[section]" headers and "key = value"
// lines; '#' starts a comment. Duplicate keys and malformed lines are
// rejected with line/column positions.
struct ConfigFile {
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections;

    bool has(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config_text(const std::string& text);
ConfigFile parse_config_file(const std::string& path);

// Typed, consumption-tracked access to one section. Reading a key marks it
// consumed and records the resolved value (defaults included); finish()
// rejects any key the experiment never asked for.
class ParamReader {
  public:
    ParamReader(const ConfigFile& file, std::string section);

    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    long integer(const std::string& key);
    long integer(const std::string& key, long fallback);
    std::string str(const std::string& key);
    std::string str(const std::string& key, const std::string& fallback);
    bool flag(const std::string& key, bool fallback);
    std::vector<double> number_list(const std::string& key);
    std::vector<double> number_list(const std::string& key, const std::vector<double>& fallback);
    bool present(const std::string& key) const;

    void finish() const;  // throws ConfigError on unknown keys
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

  private:
    const ConfigFile& file_;
    std::string section_;
    std::map<std::string, bool> consumed_;
    std::map<std::string, std::string> resolved_;

    std::optional<std::string> raw(const std::string& key);
};

}  // namespace lab
