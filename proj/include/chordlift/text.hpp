#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace chordlift::text {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

// True for UTF-8 continuation bytes (0b10xxxxxx). Everything else, including
// invalid lead bytes, starts a new column.
inline bool is_utf8_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Number of Unicode scalars in s. Invalid sequences count one column per
// non-continuation byte, so arbitrary bytes never throw.
inline std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char b : s)
        if (!is_utf8_continuation(b)) ++n;
    return n;
}

struct Token {
    std::string text;
    std::size_t column;  // scalar offset of the first character
};

// Whitespace-separated tokens with their start columns measured in Unicode
// scalars, so multi-byte characters do not skew chord/lyric alignment.
inline std::vector<Token> tokenize_columns(std::string_view line) {
    std::vector<Token> out;
    std::size_t col = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        if (is_space(line[i])) {
            ++col;
            ++i;
            while (i < line.size() && is_utf8_continuation(static_cast<unsigned char>(line[i]))) ++i;
            continue;
        }
        std::size_t start_col = col;
        std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) {
            ++col;
            ++i;
            while (i < line.size() && is_utf8_continuation(static_cast<unsigned char>(line[i]))) ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), start_col});
    }
    return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : tokenize_columns(s)) out.push_back(std::move(t.text));
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// ASCII-only lowercasing; multi-byte characters pass through.
inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool is_blank(std::string_view s) {
    for (char c : s)
        if (!is_space(c)) return false;
    return true;
}

// Lowercase key for dedup matching: trimmed, internal whitespace runs
// collapsed to single spaces.
inline std::string normalize_key(std::string_view s) {
    std::string out;
    bool in_space = true;  // swallows leading whitespace
    for (char c : to_lower(s)) {
        if (is_space(c)) {
            if (!in_space) out += ' ';
            in_space = true;
        } else {
            out += c;
            in_space = false;
        }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline bool is_edge_punct(char c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':':
        case '"': case '\'': case '(': case ')': case '[': case ']':
            return true;
        default:
            return false;
    }
}

// Strips punctuation at token edges only; internal apostrophes survive
// ("don't" stays intact, "'cause" loses its leading quote).
inline std::string strip_edge_punct(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_edge_punct(s[b])) ++b;
    while (e > b && is_edge_punct(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Replaces the Unicode flat/sharp signs with their ASCII tab spellings.
inline std::string normalize_accidentals(std::string_view s) {
    static constexpr std::string_view kFlat = "\xE2\x99\xAD";   // U+266D
    static constexpr std::string_view kSharp = "\xE2\x99\xAF";  // U+266F
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, kFlat.size(), kFlat) == 0) {
            out += 'b';
            i += kFlat.size();
        } else if (s.compare(i, kSharp.size(), kSharp) == 0) {
            out += '#';
            i += kSharp.size();
        } else {
            out += s[i++];
        }
    }
    return out;
}

}  // namespace chordlift::text
