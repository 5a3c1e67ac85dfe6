#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chordlift/chord.hpp"
#include "chordlift/text.hpp"

namespace chordlift {

struct TabDocument {
    std::string song_id;
    std::string title;
    std::string artist;
    double rating = 0.0;
    std::string body;  // plain-text tab, markup already removed
};

// One chord instance with the lyric words that sounded under it.
struct ChordLyricEvent {
    std::string song_id;
    ChordSymbol chord;
    std::vector<std::string> words;  // lowercase, edge punctuation stripped
    std::size_t line_index = 0;      // line of the chord token
    std::size_t column = 0;          // scalar column of the chord token
};

enum class LineKind { ChordLine, LyricLine, TabStaff, Blank };

// [Verse], [Chorus 2], ... -- resets the carry chord, never treated as lyrics.
inline bool is_section_header(std::string_view line) {
    std::string t = text::trim(line);
    return t.size() >= 2 && t.front() == '[' && t.back() == ']';
}

inline LineKind classify_line(std::string_view line) {
    if (text::is_blank(line)) return LineKind::Blank;

    // Staff heuristic: optional string letter, then '|', and at least half of
    // the non-space characters drawn from fret/technique notation.
    std::size_t p = 0;
    while (p < line.size() && text::is_space(line[p])) ++p;
    std::size_t q = p;
    if (q < line.size() && std::isalpha(static_cast<unsigned char>(line[q]))) ++q;
    if (q < line.size() && line[q] == '|') {
        std::size_t staffish = 0, nonspace = 0;
        for (char c : line) {
            if (text::is_space(c)) continue;
            ++nonspace;
            if (c == '-' || c == '|' || (c >= '0' && c <= '9') || c == 'h' || c == 'p' ||
                c == '/' || c == '\\' || c == '~')
                ++staffish;
        }
        if (nonspace > 0 && staffish * 2 >= nonspace) return LineKind::TabStaff;
    }

    auto tokens = text::split_whitespace(line);
    if (!tokens.empty()) {
        std::size_t chords = 0;
        for (const auto& t : tokens)
            if (is_chord_token(t)) ++chords;
        if (chords * 2 > tokens.size()) return LineKind::ChordLine;
    }
    return LineKind::LyricLine;
}

struct AssocResult {
    // One event per parseable chord token, in column order. Word lists may be
    // empty here; parse_tab drops empty events before emitting.
    std::vector<ChordLyricEvent> events;
    // Words that started before the first chord column and belong to the
    // incoming carry chord. Empty when there was no carry (those words drop).
    std::vector<std::string> carry_words;
    std::optional<ChordSymbol> new_carry;
    std::size_t unparsed_chord_tokens = 0;
    std::size_t dropped_words = 0;
};

namespace detail {

struct PlacedChord {
    ChordSymbol chord;
    std::size_t column;
};

inline std::vector<PlacedChord> chords_on_line(std::string_view line, std::size_t& unparsed) {
    std::vector<PlacedChord> out;
    for (const auto& tok : text::tokenize_columns(line)) {
        auto parsed = parse_chord(tok.text);
        if (parsed.has_value())
            out.push_back({*parsed, tok.column});
        else
            ++unparsed;
    }
    return out;
}

struct PlacedWord {
    std::string cleaned;
    std::size_t begin;
    std::size_t end;  // exclusive, span of the raw token
};

inline std::vector<PlacedWord> words_on_line(std::string_view line) {
    std::vector<PlacedWord> out;
    for (const auto& tok : text::tokenize_columns(line)) {
        std::string cleaned = text::strip_edge_punct(text::to_lower(tok.text));
        if (cleaned.empty()) continue;  // pure punctuation
        out.push_back({std::move(cleaned), tok.column, tok.column + text::utf8_length(tok.text)});
    }
    return out;
}

}  // namespace detail

// Column-aligned association of one chord line with the lyric line below it.
// A word belongs to the chord whose column interval contains its start,
// except that a chord landing strictly inside a word claims the whole word.
// Words before the first chord go to the carry chord from the previous line,
// or drop when there is none.
inline AssocResult associate(std::string_view chord_line, std::string_view lyric_line,
                             const std::optional<ChordSymbol>& carry) {
    AssocResult res;
    auto chords = detail::chords_on_line(chord_line, res.unparsed_chord_tokens);
    res.events.reserve(chords.size());
    for (const auto& pc : chords) {
        ChordLyricEvent ev;
        ev.chord = pc.chord;
        ev.column = pc.column;
        res.events.push_back(std::move(ev));
    }

    for (const auto& w : detail::words_on_line(lyric_line)) {
        std::size_t target = chords.size();  // sentinel: unassigned
        for (std::size_t c = 0; c < chords.size(); ++c) {
            if (w.begin < chords[c].column && chords[c].column < w.end) {
                target = c;  // chord in the middle of the word wins the word
                break;
            }
        }
        if (target == chords.size()) {
            for (std::size_t c = chords.size(); c-- > 0;) {
                if (chords[c].column <= w.begin) {
                    target = c;
                    break;
                }
            }
        }
        if (target < chords.size()) {
            res.events[target].words.push_back(w.cleaned);
        } else if (carry.has_value()) {
            res.carry_words.push_back(w.cleaned);
        } else {
            ++res.dropped_words;
        }
    }

    if (!chords.empty())
        res.new_carry = chords.back().chord;
    else
        res.new_carry = carry;
    return res;
}

struct TabDiagnostics {
    std::size_t unparsed_chord_tokens = 0;
    std::size_t events_dropped_no_words = 0;
    std::size_t words_dropped_no_chord = 0;
};

struct ParseOutcome {
    std::vector<ChordLyricEvent> events;
    TabDiagnostics diag;
};

// Scans a tab body line by line. A chord line followed by a lyric line yields
// associations; a chord line followed by anything else yields bare chords,
// which drop for lack of words. Standalone lyric lines continue the carry
// chord; blank lines and section headers reset it.
inline ParseOutcome parse_tab(const TabDocument& doc) {
    ParseOutcome out;
    std::vector<std::string> lines;
    for (auto& l : text::split(doc.body, '\n')) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        lines.push_back(std::move(l));
    }

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t carry_idx = kNone;  // index into out.events of the carry chord
    std::optional<ChordSymbol> carry;

    std::size_t i = 0;
    while (i < lines.size()) {
        const std::string& line = lines[i];
        if (is_section_header(line)) {
            carry_idx = kNone;
            carry.reset();
            ++i;
            continue;
        }
        switch (classify_line(line)) {
            case LineKind::Blank:
                carry_idx = kNone;
                carry.reset();
                ++i;
                continue;
            case LineKind::TabStaff:
                ++i;
                continue;
            case LineKind::LyricLine: {
                // No chord line above; the whole line rides the carry chord.
                auto words = detail::words_on_line(line);
                if (carry_idx != kNone) {
                    for (auto& w : words) out.events[carry_idx].words.push_back(std::move(w.cleaned));
                } else {
                    out.diag.words_dropped_no_chord += words.size();
                }
                ++i;
                continue;
            }
            case LineKind::ChordLine:
                break;
        }

        bool paired = i + 1 < lines.size() && !is_section_header(lines[i + 1]) &&
                      classify_line(lines[i + 1]) == LineKind::LyricLine;
        AssocResult r = associate(line, paired ? std::string_view(lines[i + 1]) : std::string_view(),
                                  carry);
        out.diag.unparsed_chord_tokens += r.unparsed_chord_tokens;
        out.diag.words_dropped_no_chord += r.dropped_words;
        if (!r.carry_words.empty()) {
            if (carry_idx != kNone)
                for (auto& w : r.carry_words) out.events[carry_idx].words.push_back(std::move(w));
            else
                out.diag.words_dropped_no_chord += r.carry_words.size();
        }
        for (auto& ev : r.events) {
            ev.song_id = doc.song_id;
            ev.line_index = i;
            out.events.push_back(std::move(ev));
        }
        if (!r.events.empty()) carry_idx = out.events.size() - 1;
        carry = r.new_carry;
        i += paired ? 2 : 1;
    }

    std::vector<ChordLyricEvent> kept;
    kept.reserve(out.events.size());
    for (auto& ev : out.events) {
        if (ev.words.empty())
            ++out.diag.events_dropped_no_words;
        else
            kept.push_back(std::move(ev));
    }
    out.events = std::move(kept);
    return out;
}

// Majority-vote English test: at least half the words must appear in the
// word list. No words means no signal, which counts as non-English.
inline bool is_english(const std::vector<std::string>& words,
                       const std::unordered_set<std::string>& wordlist) {
    if (words.empty()) return false;
    std::size_t hits = 0;
    for (const auto& w : words)
        if (wordlist.count(text::to_lower(w))) ++hits;
    return hits * 2 >= words.size();
}

// One document per (artist, title), keeping the highest rating; rating ties
// go to the lexicographically smallest song_id. Output sorted by song_id.
inline std::vector<TabDocument> dedupe(const std::vector<TabDocument>& docs) {
    std::map<std::pair<std::string, std::string>, const TabDocument*> best;
    for (const auto& d : docs) {
        auto key = std::make_pair(text::normalize_key(d.artist), text::normalize_key(d.title));
        auto it = best.find(key);
        if (it == best.end() || d.rating > it->second->rating ||
            (d.rating == it->second->rating && d.song_id < it->second->song_id))
            best[key] = &d;
    }
    std::vector<TabDocument> out;
    out.reserve(best.size());
    for (auto& [key, doc] : best) out.push_back(*doc);
    std::sort(out.begin(), out.end(),
              [](const TabDocument& a, const TabDocument& b) { return a.song_id < b.song_id; });
    return out;
}

}  // namespace chordlift
