#pragma once

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordlift/metadata.hpp"
#include "chordlift/text.hpp"

namespace chordlift {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string lexicon_path;
    std::string wordlist_path;  // empty: skip the English filter
    double band_low = 3.0;
    double band_high = 7.0;
    std::string metadata_file;
    std::string metadata_endpoint;
    int top_genres = 20;
    // empty allowlist means no restriction
    std::vector<std::string> regions = default_regions();
    std::vector<std::string> eras = default_eras();
    std::string output_dir = ".";
    int parallelism = 4;
};

namespace detail {

inline double config_double(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: '" + value + "'");
    }
}

inline int config_int(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not an integer: '" + value + "'");
    }
}

inline std::vector<std::string> config_list(const std::string& value) {
    std::vector<std::string> out;
    for (const auto& part : text::split(value, ',')) {
        std::string t = text::trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

// key=value lines; '#' starts a comment line; unknown keys are errors so
// typos fail loudly instead of silently running with defaults.
inline Config parse_config(std::istream& in, const std::string& source) {
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
        std::string key = text::trim(t.substr(0, eq));
        std::string value = text::trim(t.substr(eq + 1));

        if (key == "lexicon_path") cfg.lexicon_path = value;
        else if (key == "wordlist_path") cfg.wordlist_path = value;
        else if (key == "band_low") cfg.band_low = detail::config_double(value, where);
        else if (key == "band_high") cfg.band_high = detail::config_double(value, where);
        else if (key == "metadata_file") cfg.metadata_file = value;
        else if (key == "metadata_endpoint") cfg.metadata_endpoint = value;
        else if (key == "top_genres") cfg.top_genres = detail::config_int(value, where);
        else if (key == "regions") cfg.regions = detail::config_list(value);
        else if (key == "eras") cfg.eras = detail::config_list(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "parallelism") cfg.parallelism = detail::config_int(value, where);
        else throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (!(cfg.band_low < cfg.band_high))
        throw ConfigError(source + ": band_low must be below band_high");
    if (cfg.top_genres < 1) throw ConfigError(source + ": top_genres must be at least 1");
    if (cfg.parallelism < 1) throw ConfigError(source + ": parallelism must be at least 1");
    return cfg;
}

inline Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    return parse_config(in, path);
}

// defaults unless CHORDLIFT_CONFIG names a config file
inline Config load_config_from_env() {
    const char* path = std::getenv("CHORDLIFT_CONFIG");
    if (path && *path) return load_config_file(path);
    return Config{};
}

}  // namespace chordlift
