#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
// httplib drags in glibc's resolv.h, whose `_res` macro mangles identifiers
// in unrelated headers (Eigen uses `_res` as a parameter name); nothing here
// touches the BIND resolver globals, so drop it
#ifdef _res
#undef _res
#endif
#include <json.hpp>

#include "chordlift/factor.hpp"
#include "chordlift/text.hpp"

namespace chordlift {

// Genre is an album-level label; era and region are artist-level. The record
// flattens all three onto the song, which joins the same way.
struct SongRecord {
    std::string song_id;
    std::optional<std::string> genre;
    std::optional<std::string> era;     // "1970's" .. validated decade label
    std::optional<std::string> region;  // normalized vocabulary
    std::optional<int> album_year;
};

inline const std::vector<std::string>& default_regions() {
    static const std::vector<std::string> v = {"Asia", "Australia/Oceania", "North America",
                                               "Scandinavia", "Western Europe"};
    return v;
}

inline const std::vector<std::string>& default_eras() {
    static const std::vector<std::string> v = {"1950's", "1960's", "1970's", "1980's",
                                               "1990's", "2000's", "2010's"};
    return v;
}

using RegionAliases = std::map<std::string, std::string>;

inline const RegionAliases& default_region_aliases() {
    static const RegionAliases m = {
        {"Oceania", "Australia/Oceania"},
        {"Australia", "Australia/Oceania"},
        {"America", "North America"},
        {"Europe (Western)", "Western Europe"},
    };
    return m;
}

inline std::string normalize_region(std::string_view region,
                                    const RegionAliases& aliases = default_region_aliases()) {
    std::string r = text::trim(region);
    auto it = aliases.find(r);
    return it != aliases.end() ? it->second : r;
}

// Accepts only the decade labels the analyses use; anything else is treated
// as missing.
inline std::optional<std::string> validate_era(std::string_view era) {
    std::string e = text::trim(era);
    for (const auto& valid : default_eras())
        if (e == valid) return e;
    return std::nullopt;
}

inline std::optional<std::string> decade_label(int year) {
    int decade = (year / 10) * 10;
    if (decade < 1950 || decade > 2010) return std::nullopt;
    return std::to_string(decade) + "'s";
}

// Era with the release-year fallback: the artist-level label wins; otherwise
// the album year's decade; otherwise nothing.
inline std::optional<std::string> resolve_era(const SongRecord& rec) {
    if (rec.era) return rec.era;
    if (rec.album_year) return decade_label(*rec.album_year);
    return std::nullopt;
}

struct MetadataFile {
    std::map<std::string, SongRecord> records;  // keyed by song_id
    std::size_t malformed_lines = 0;
    std::size_t duplicate_ids = 0;
};

enum class MetadataErrorKind { FileUnreadable, NetworkError, MalformedResponse };

class MetadataError : public std::runtime_error {
public:
    MetadataError(MetadataErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    MetadataErrorKind kind() const { return kind_; }

private:
    MetadataErrorKind kind_;
};

namespace detail {

inline std::optional<std::string> json_opt_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
    return it->get<std::string>();
}

inline std::optional<int> json_opt_int(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw std::invalid_argument(std::string(key) + " must be an int");
    return it->get<int>();
}

inline SongRecord record_from_json(const nlohmann::json& j, std::string song_id) {
    SongRecord rec;
    rec.song_id = std::move(song_id);
    rec.genre = json_opt_string(j, "genre");
    if (auto era = json_opt_string(j, "era")) rec.era = validate_era(*era);
    if (auto region = json_opt_string(j, "region")) rec.region = normalize_region(*region);
    rec.album_year = json_opt_int(j, "album_year");
    return rec;
}

}  // namespace detail

// JSONL metadata: one object per line with song_id plus optional genre, era,
// region, album_year. Malformed lines are skipped and counted; duplicate
// song_ids keep the last record.
inline MetadataFile load_metadata_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MetadataError(MetadataErrorKind::FileUnreadable, "cannot open metadata: " + path);
    MetadataFile out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::is_blank(line)) continue;
        try {
            auto j = nlohmann::json::parse(line);
            if (!j.is_object()) throw std::invalid_argument("not an object");
            auto id = detail::json_opt_string(j, "song_id");
            if (!id || id->empty()) throw std::invalid_argument("missing song_id");
            auto rec = detail::record_from_json(j, *id);
            auto [it, inserted] = out.records.insert_or_assign(rec.song_id, std::move(rec));
            (void)it;
            if (!inserted) ++out.duplicate_ids;
        } catch (const std::exception&) {
            ++out.malformed_lines;
        }
    }
    return out;
}

struct FetchOptions {
    int max_retries = 3;  // retry budget for 5xx and transport failures
    std::chrono::milliseconds base_delay{200};
    std::chrono::milliseconds timeout{5000};
};

namespace detail {

struct SplitUrl {
    std::string base;  // scheme://host:port
    std::string path;  // leading '/', possibly just "/"
};

inline SplitUrl split_url(const std::string& endpoint) {
    auto scheme = endpoint.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    auto slash = endpoint.find('/', host_start);
    if (slash == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace detail

// Looks one song up by title and artist. 404 means the provider has no
// record and the caller drops the song. 5xx and transport failures retry
// with exponential backoff up to the configured budget.
inline std::optional<SongRecord> fetch_metadata(const std::string& endpoint,
                                                const std::string& title,
                                                const std::string& artist,
                                                const FetchOptions& opts = {}) {
    auto url = detail::split_url(endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(opts.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(opts.timeout));

    httplib::Params params{{"title", title}, {"artist", artist}};
    std::string last_error;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(opts.base_delay * (1 << (attempt - 1)));
        auto res = client.Get(url.path, params, httplib::Headers{});
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 404) return std::nullopt;
        if (res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw MetadataError(MetadataErrorKind::MalformedResponse,
                                endpoint + ": unexpected status " + std::to_string(res->status));
        try {
            auto j = nlohmann::json::parse(res->body);
            if (!j.is_object()) throw std::invalid_argument("not an object");
            return detail::record_from_json(j, "");
        } catch (const std::exception& e) {
            throw MetadataError(MetadataErrorKind::MalformedResponse,
                                endpoint + ": bad body: " + e.what());
        }
    }
    throw MetadataError(MetadataErrorKind::NetworkError,
                        endpoint + ": giving up after " + std::to_string(opts.max_retries + 1) +
                            " attempts (" + last_error + ")");
}

// The k most frequent labels of a factor, most frequent first, ties broken
// lexicographically. Region and era default to their fixed vocabularies; an
// explicit allowlist overrides.
inline std::vector<std::string> top_levels(
    const std::vector<SongRecord>& records, Factor factor, std::size_t k,
    const std::optional<std::vector<std::string>>& allowlist = std::nullopt) {
    std::optional<std::vector<std::string>> allowed = allowlist;
    if (!allowed) {
        if (factor == Factor::Region) allowed = default_regions();
        if (factor == Factor::Era) allowed = default_eras();
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& rec : records) {
        std::optional<std::string> label;
        switch (factor) {
            case Factor::Genre: label = rec.genre; break;
            case Factor::Era: label = resolve_era(rec); break;
            case Factor::Region: label = rec.region; break;
            case Factor::Category: break;  // not a song-record factor
        }
        if (!label) continue;
        if (allowed && std::find(allowed->begin(), allowed->end(), *label) == allowed->end())
            continue;
        ++counts[*label];
    }

    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    for (const auto& [label, n] : ranked) {
        if (out.size() == k) break;
        out.push_back(label);
    }
    return out;
}

}  // namespace chordlift
