#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordlift/format.hpp"
#include "chordlift/lexicon.hpp"

namespace chordlift {

class EmptyBag : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Multiset of sentiment words for one corpus slice.
struct Bag {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;

    void add(const std::string& word, std::size_t n = 1) {
        counts[word] += n;
        total += n;
    }
};

inline std::map<std::string, double> normalized_freqs(const Bag& bag) {
    if (bag.total == 0) throw EmptyBag("normalized_freqs: empty bag");
    std::map<std::string, double> out;
    for (const auto& [word, n] : bag.counts)
        out[word] = static_cast<double>(n) / static_cast<double>(bag.total);
    return out;
}

struct WordShiftEntry {
    std::string word;
    double h_i = 0.0;
    double valence_term = 0.0;    // h_i - h_ref
    double prevalence_term = 0.0; // p_i - p_i_ref
    double contribution_pct = 0.0;
};

// zero counts as positive in both display conventions
inline const char* valence_sign(double valence_term) { return valence_term >= 0.0 ? "+" : "-"; }
inline const char* prevalence_sign(double prevalence_term) {
    return prevalence_term >= 0.0 ? "↑" : "↓";  // up / down arrow
}

struct WordShiftResult {
    std::vector<WordShiftEntry> entries;  // |contribution| descending, ties by word
    double h_ref = 0.0;
    double h_comp = 0.0;
    // equal corpus means: percentages are undefined, entries carry raw
    // (h_i - h_ref)(p_i - p_i_ref) products instead
    bool zero_denominator = false;
};

namespace detail {

inline double bag_valence_mean(const Bag& bag, const Lexicon& lex, const char* which) {
    if (bag.total == 0) throw EmptyBag(std::string("word_shift: empty ") + which + " bag");
    double sum = 0.0;
    for (const auto& [word, n] : bag.counts) {
        auto it = lex.entries.find(word);
        if (it == lex.entries.end())
            throw std::invalid_argument("word_shift: word not in lexicon: " + word);
        sum += it->second * static_cast<double>(n);
    }
    return sum / static_cast<double>(bag.total);
}

}  // namespace detail

// Per-word decomposition of the comparison-vs-reference valence difference.
// Every word from either bag participates; a word absent from one side has
// frequency zero there. Contributions sum to +100 or -100 (sign of
// h_comp - h_ref).
inline WordShiftResult word_shift(const Bag& comparison, const Bag& reference,
                                  const Lexicon& lex) {
    WordShiftResult out;
    out.h_comp = detail::bag_valence_mean(comparison, lex, "comparison");
    out.h_ref = detail::bag_valence_mean(reference, lex, "reference");
    auto p_comp = normalized_freqs(comparison);
    auto p_ref = normalized_freqs(reference);

    double denom = std::fabs(out.h_comp - out.h_ref);
    out.zero_denominator = denom == 0.0;

    std::set<std::string> words;
    for (const auto& [w, n] : comparison.counts) words.insert(w);
    for (const auto& [w, n] : reference.counts) words.insert(w);

    out.entries.reserve(words.size());
    for (const auto& w : words) {
        WordShiftEntry e;
        e.word = w;
        e.h_i = lex.entries.at(w);
        auto pc = p_comp.find(w);
        auto pr = p_ref.find(w);
        double p_i = pc != p_comp.end() ? pc->second : 0.0;
        double p_i_ref = pr != p_ref.end() ? pr->second : 0.0;
        e.valence_term = e.h_i - out.h_ref;
        e.prevalence_term = p_i - p_i_ref;
        double raw = e.valence_term * e.prevalence_term;
        e.contribution_pct = out.zero_denominator ? raw : 100.0 * raw / denom;
        out.entries.push_back(std::move(e));
    }

    std::sort(out.entries.begin(), out.entries.end(),
              [](const WordShiftEntry& x, const WordShiftEntry& y) {
                  double ax = std::fabs(x.contribution_pct), ay = std::fabs(y.contribution_pct);
                  if (ax != ay) return ax > ay;
                  return x.word < y.word;
              });
    return out;
}

inline std::string render_shift_tsv(const std::vector<WordShiftEntry>& entries, std::size_t n) {
    std::string out = "word\th_i\tvalence_sign\tprevalence_sign\tcontribution_pct\n";
    std::size_t count = std::min(n, entries.size());
    for (std::size_t i = 0; i < count; ++i) {
        const auto& e = entries[i];
        out += e.word;
        out += '\t';
        out += fixed6(e.h_i);
        out += '\t';
        out += valence_sign(e.valence_term);
        out += '\t';
        out += prevalence_sign(e.prevalence_term);
        out += '\t';
        out += fixed6(e.contribution_pct);
        out += '\n';
    }
    return out;
}

// Horizontal bar chart: bars grow from a center axis, right for positive
// contributions, left for negative; warm fill for above-reference valence,
// cool for below.
inline std::string render_shift_svg(const std::vector<WordShiftEntry>& entries, std::size_t n) {
    constexpr double kWidth = 640.0, kCenter = 320.0, kBarMax = 280.0;
    constexpr double kRowH = 22.0, kBarH = 14.0, kTop = 30.0;
    std::size_t count = std::min(n, entries.size());

    double max_abs = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        max_abs = std::max(max_abs, std::fabs(entries[i].contribution_pct));

    double height = kTop + kRowH * static_cast<double>(count) + 10.0;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"" +
                      fixed6(height) + "\" viewBox=\"0 0 " + fixed6(kWidth) + " " +
                      fixed6(height) + "\">\n";
    svg += "<line x1=\"" + fixed6(kCenter) + "\" y1=\"" + fixed6(kTop - 8.0) + "\" x2=\"" +
           fixed6(kCenter) + "\" y2=\"" + fixed6(height - 6.0) +
           "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    for (std::size_t i = 0; i < count; ++i) {
        const auto& e = entries[i];
        double y = kTop + kRowH * static_cast<double>(i);
        double len = max_abs == 0.0 ? 0.0 : std::fabs(e.contribution_pct) / max_abs * kBarMax;
        bool right = e.contribution_pct >= 0.0;
        double x = right ? kCenter : kCenter - len;
        const char* fill = e.valence_term >= 0.0 ? "#e08020" : "#4a78c2";
        svg += "<rect x=\"" + fixed6(x) + "\" y=\"" + fixed6(y) + "\" width=\"" + fixed6(len) +
               "\" height=\"" + fixed6(kBarH) + "\" fill=\"" + fill + "\"/>\n";
        std::string label = e.word;
        label += " (";
        label += valence_sign(e.valence_term);
        label += prevalence_sign(e.prevalence_term);
        label += ")";
        double tx = right ? kCenter - 6.0 : kCenter + 6.0;
        const char* anchor = right ? "end" : "start";
        svg += "<text x=\"" + fixed6(tx) + "\" y=\"" + fixed6(y + kBarH - 2.0) +
               "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"" + anchor + "\">" +
               label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace chordlift
