#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "chordlift/expected.hpp"
#include "chordlift/text.hpp"

namespace chordlift {

enum class ChordCategory {
    Major,
    Minor,
    Major7,
    Minor7,
    Dominant7,
    Power,
    Augmented,
    Diminished,
    Other,
};

inline constexpr std::array<ChordCategory, 9> kAllCategories = {
    ChordCategory::Major,     ChordCategory::Minor,  ChordCategory::Major7,
    ChordCategory::Minor7,    ChordCategory::Dominant7, ChordCategory::Power,
    ChordCategory::Augmented, ChordCategory::Diminished, ChordCategory::Other,
};

inline constexpr std::string_view category_name(ChordCategory c) {
    switch (c) {
        case ChordCategory::Major: return "Major";
        case ChordCategory::Minor: return "Minor";
        case ChordCategory::Major7: return "Major7";
        case ChordCategory::Minor7: return "Minor7";
        case ChordCategory::Dominant7: return "Dominant7";
        case ChordCategory::Power: return "Power";
        case ChordCategory::Augmented: return "Augmented";
        case ChordCategory::Diminished: return "Diminished";
        case ChordCategory::Other: return "Other";
    }
    return "Other";
}

inline std::optional<ChordCategory> category_from_name(std::string_view name) {
    for (ChordCategory c : kAllCategories)
        if (category_name(c) == name) return c;
    return std::nullopt;
}

// Category is a pure function of the quality suffix. The table is exact and
// case sensitive: "M" is Major, "m" is Minor. Anything unlisted is Other.
inline ChordCategory classify_quality(std::string_view quality) {
    if (quality.empty() || quality == "M" || quality == "maj") return ChordCategory::Major;
    if (quality == "m" || quality == "min") return ChordCategory::Minor;
    if (quality == "M7" || quality == "maj7") return ChordCategory::Major7;
    if (quality == "m7" || quality == "min7") return ChordCategory::Minor7;
    if (quality == "7" || quality == "dom7") return ChordCategory::Dominant7;
    if (quality == "5") return ChordCategory::Power;
    if (quality == "aug" || quality == "+") return ChordCategory::Augmented;
    if (quality == "dim") return ChordCategory::Diminished;
    return ChordCategory::Other;
}

enum class Accidental { None, Sharp, Flat };

inline constexpr std::string_view accidental_text(Accidental a) {
    switch (a) {
        case Accidental::Sharp: return "#";
        case Accidental::Flat: return "b";
        case Accidental::None: break;
    }
    return "";
}

struct ChordSymbol {
    std::string raw;        // token as it appeared, asterisks and all
    char root = 'C';        // 'A'..'G'
    Accidental accidental = Accidental::None;
    std::string quality;    // suffix between root and the optional slash
    std::string bass;       // "E", "F#", ... empty when there is no slash bass
    ChordCategory category = ChordCategory::Major;

    // Canonical spelling: root + accidental + quality ( + "/" + bass ).
    std::string name() const {
        std::string out;
        out += root;
        out += accidental_text(accidental);
        out += quality;
        if (!bass.empty()) {
            out += '/';
            out += bass;
        }
        return out;
    }

    bool operator==(const ChordSymbol&) const = default;

    // Equality ignoring the raw spelling; "G*" and "G" are the same chord.
    bool same_chord(const ChordSymbol& o) const {
        return root == o.root && accidental == o.accidental && quality == o.quality &&
               bass == o.bass && category == o.category;
    }
};

enum class ChordError { EmptyToken, InvalidRoot, InvalidBass };

namespace detail {
// Consumes root letter + optional accidental from s; returns consumed length.
inline std::size_t parse_root(std::string_view s, char& root, Accidental& acc) {
    if (s.empty() || s[0] < 'A' || s[0] > 'G') return 0;
    root = s[0];
    acc = Accidental::None;
    std::size_t used = 1;
    if (s.size() > 1) {
        if (s[1] == '#') {
            acc = Accidental::Sharp;
            used = 2;
        } else if (s[1] == 'b') {
            acc = Accidental::Flat;
            used = 2;
        }
    }
    return used;
}
}  // namespace detail

// Parses one whitespace-free chord token. Trailing '*' markers are stripped
// first ("G*" parses like "G"); Unicode flat/sharp signs are normalized to
// "b"/"#". Never throws on arbitrary input.
inline Expected<ChordSymbol, ChordError> parse_chord(std::string_view token) {
    if (token.empty()) return ChordError::EmptyToken;

    std::string norm = text::normalize_accidentals(token);
    std::size_t end = norm.size();
    while (end > 0 && norm[end - 1] == '*') --end;
    std::string_view body(norm.data(), end);
    if (body.empty()) return ChordError::EmptyToken;

    ChordSymbol sym;
    sym.raw = std::string(token);
    std::size_t used = detail::parse_root(body, sym.root, sym.accidental);
    if (used == 0) return ChordError::InvalidRoot;

    std::string_view rest = body.substr(used);
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) {
        sym.quality = std::string(rest);
    } else {
        sym.quality = std::string(rest.substr(0, slash));
        std::string_view bass = rest.substr(slash + 1);
        char broot;
        Accidental bacc;
        std::size_t bused = detail::parse_root(bass, broot, bacc);
        if (bused == 0 || bused != bass.size()) return ChordError::InvalidBass;
        sym.bass = broot;
        sym.bass += accidental_text(bacc);
    }
    // The slash bass never affects the category; the sounding triad quality
    // comes from the pre-slash suffix.
    sym.category = classify_quality(sym.quality);
    return sym;
}

inline bool is_chord_token(std::string_view token) { return parse_chord(token).has_value(); }

}  // namespace chordlift
