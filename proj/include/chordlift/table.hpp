#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chordlift/chord.hpp"
#include "chordlift/lexicon.hpp"
#include "chordlift/stats.hpp"
#include "chordlift/text.hpp"

namespace chordlift {

// the on-disk contract: these header lines are byte-exact
inline constexpr const char* kTableHeader = "song_id\tchord_raw\troot\tcategory\tword";
inline constexpr const char* kEnrichedTableHeader =
    "song_id\tchord_raw\troot\tcategory\tword\tgenre\tera\tregion";

class TableError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One (chord occurrence, lyric word) pair; the last three columns exist only
// after enrichment and hold "" when the song's metadata lacks the label.
struct TableRow {
    std::string song_id;
    std::string chord_raw;
    std::string root;
    std::string category;
    std::string word;
    std::string genre;
    std::string era;
    std::string region;
};

struct Table {
    std::vector<TableRow> rows;
    bool enriched = false;
};

inline void write_table(const Table& t, std::ostream& out) {
    out << (t.enriched ? kEnrichedTableHeader : kTableHeader) << '\n';
    for (const auto& r : t.rows) {
        out << r.song_id << '\t' << r.chord_raw << '\t' << r.root << '\t' << r.category << '\t'
            << r.word;
        if (t.enriched) out << '\t' << r.genre << '\t' << r.era << '\t' << r.region;
        out << '\n';
    }
}

inline void write_table_file(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TableError("cannot write table: " + path);
    write_table(t, out);
}

inline Table read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TableError("cannot open table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw TableError("missing header: " + path);

    Table t;
    if (line == kEnrichedTableHeader)
        t.enriched = true;
    else if (line != kTableHeader)
        throw TableError(path + ": unrecognized header: " + line);

    const std::size_t want = t.enriched ? 8 : 5;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = text::split(line, '\t');
        if (fields.size() != want)
            throw TableError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(want) + " columns, got " +
                             std::to_string(fields.size()));
        TableRow r;
        r.song_id = std::move(fields[0]);
        r.chord_raw = std::move(fields[1]);
        r.root = std::move(fields[2]);
        r.category = std::move(fields[3]);
        r.word = std::move(fields[4]);
        if (t.enriched) {
            r.genre = std::move(fields[5]);
            r.era = std::move(fields[6]);
            r.region = std::move(fields[7]);
        }
        if (!category_from_name(r.category))
            throw TableError(path + ":" + std::to_string(lineno) +
                             ": unknown category: " + r.category);
        t.rows.push_back(std::move(r));
    }
    return t;
}

// A chord occurrence reassembled from its table rows, scored against the
// lexicon. Instances are maximal runs of consecutive rows sharing
// (song_id, chord_raw); occurrences with no surviving sentiment word are
// dropped, matching the scoring rules upstream.
struct ScoredInstance {
    ChordValence chord;
    std::vector<std::pair<std::string, double>> words;  // the sentiment words kept
};

inline std::vector<ScoredInstance> score_instances(const Table& t, const Lexicon& lex) {
    std::vector<ScoredInstance> out;
    std::size_t i = 0;
    while (i < t.rows.size()) {
        std::size_t j = i;
        while (j + 1 < t.rows.size() && t.rows[j + 1].song_id == t.rows[i].song_id &&
               t.rows[j + 1].chord_raw == t.rows[i].chord_raw)
            ++j;

        std::vector<std::string> words;
        words.reserve(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) words.push_back(t.rows[k].word);
        auto kept = sentiment_words(words, lex);
        if (!kept.empty()) {
            ScoredInstance si;
            si.chord.song_id = t.rows[i].song_id;
            si.chord.category = *category_from_name(t.rows[i].category);
            if (!t.rows[i].genre.empty()) si.chord.genre = t.rows[i].genre;
            if (!t.rows[i].era.empty()) si.chord.era = t.rows[i].era;
            if (!t.rows[i].region.empty()) si.chord.region = t.rows[i].region;
            double sum = 0.0;
            for (const auto& [w, v] : kept) sum += v;
            si.chord.valence = sum / static_cast<double>(kept.size());
            si.words = std::move(kept);
            out.push_back(std::move(si));
        }
        i = j + 1;
    }
    return out;
}

}  // namespace chordlift
