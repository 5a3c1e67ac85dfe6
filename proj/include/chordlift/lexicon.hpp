#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chordlift/text.hpp"

namespace chordlift {

// Word -> valence map on the 0.0 (saddest) .. 9.0 (happiest) scale, with the
// neutral band that drops low-signal words. Words with a valence strictly
// inside (band_low, band_high) carry no sentiment; the boundaries themselves
// are kept.
struct Lexicon {
    std::unordered_map<std::string, double> entries;
    double band_low = 3.0;
    double band_high = 7.0;
    std::size_t duplicate_rows = 0;  // later rows overwrote earlier ones

    bool is_sentiment(double v) const { return v <= band_low || v >= band_high; }
};

struct ValenceScore {
    double mean = 0.0;
    std::size_t n_words = 0;  // contributing sentiment words, >= 1
};

enum class LexiconErrorKind { FileUnreadable, MissingColumn, UnparseableValence, OutOfRangeValence };

class LexiconError : public std::runtime_error {
public:
    LexiconError(LexiconErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    LexiconErrorKind kind() const { return kind_; }

private:
    LexiconErrorKind kind_;
};

// Loads a TSV lexicon with named columns `word` and `valence` (any column
// order, extra columns ignored). Duplicate words: last row wins, counted.
inline Lexicon load_lexicon(const std::string& path, double band_low = 3.0,
                            double band_high = 7.0) {
    if (!(band_low < band_high))
        throw LexiconError(LexiconErrorKind::OutOfRangeValence,
                           "neutral band is empty: band_low must be < band_high");
    std::ifstream in(path);
    if (!in)
        throw LexiconError(LexiconErrorKind::FileUnreadable, "cannot open lexicon: " + path);

    std::string header;
    if (!std::getline(in, header))
        throw LexiconError(LexiconErrorKind::MissingColumn, "empty lexicon file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    auto cols = text::split(header, '\t');
    std::size_t word_col = cols.size(), val_col = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "word") word_col = i;
        if (cols[i] == "valence") val_col = i;
    }
    if (word_col == cols.size() || val_col == cols.size())
        throw LexiconError(LexiconErrorKind::MissingColumn,
                           path + ": header must name `word` and `valence` columns");

    Lexicon lex;
    lex.band_low = band_low;
    lex.band_high = band_high;

    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = text::split(line, '\t');
        if (fields.size() <= std::max(word_col, val_col))
            throw LexiconError(LexiconErrorKind::UnparseableValence,
                               path + ":" + std::to_string(lineno) + ": short row");
        const std::string& word = fields[word_col];
        double v;
        try {
            std::size_t used = 0;
            v = std::stod(fields[val_col], &used);
            if (used != fields[val_col].size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw LexiconError(LexiconErrorKind::UnparseableValence,
                               path + ":" + std::to_string(lineno) + ": bad valence `" +
                                   fields[val_col] + "`");
        }
        if (v < 0.0 || v > 9.0)
            throw LexiconError(LexiconErrorKind::OutOfRangeValence,
                               path + ":" + std::to_string(lineno) + ": valence " +
                                   fields[val_col] + " outside [0, 9]");
        auto [it, inserted] = lex.entries.insert_or_assign(word, v);
        (void)it;
        if (!inserted) ++lex.duplicate_rows;
    }
    return lex;
}

// Keeps the words that carry sentiment: present in the lexicon and outside
// the open neutral band. Order and duplicates preserved.
inline std::vector<std::pair<std::string, double>> sentiment_words(
    const std::vector<std::string>& words, const Lexicon& lex) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& w : words) {
        auto it = lex.entries.find(w);
        if (it == lex.entries.end()) continue;
        if (lex.is_sentiment(it->second)) out.emplace_back(w, it->second);
    }
    return out;
}

// Mean valence over the surviving sentiment words; nullopt when none survive,
// in which case the caller drops the unit.
inline std::optional<ValenceScore> pooled_mean_valence(const std::vector<std::string>& words,
                                                       const Lexicon& lex) {
    auto kept = sentiment_words(words, lex);
    if (kept.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [w, v] : kept) sum += v;
    return ValenceScore{sum / static_cast<double>(kept.size()), kept.size()};
}

}  // namespace chordlift
