#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chordlift/chord.hpp"
#include "chordlift/factor.hpp"

namespace chordlift {

// critical value pinned so reruns agree to the last digit
inline constexpr double kZ95 = 1.9599639845;

// One scored chord instance: its category, the song's labels, and the mean
// valence of its sentiment words.
struct ChordValence {
    std::string song_id;
    ChordCategory category = ChordCategory::Other;
    std::optional<std::string> genre;
    std::optional<std::string> era;
    std::optional<std::string> region;
    double valence = 0.0;
};

inline std::optional<std::string> factor_label(const ChordValence& cv, Factor f) {
    switch (f) {
        case Factor::Category: return std::string(category_name(cv.category));
        case Factor::Genre: return cv.genre;
        case Factor::Era: return cv.era;
        case Factor::Region: return cv.region;
    }
    return std::nullopt;
}

class EmptyGroup : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GroupSummary {
    std::string label;
    std::size_t n = 0;
    double mean = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

inline double vec_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// n−1 denominator; a single observation has no spread
inline double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline GroupSummary group_summary(const std::vector<double>& values, const std::string& label) {
    if (values.empty()) throw EmptyGroup("group_summary: empty group '" + label + "'");
    GroupSummary g;
    g.label = label;
    g.n = values.size();
    g.mean = vec_mean(values);
    double half =
        kZ95 * sample_std(values, g.mean) / std::sqrt(static_cast<double>(values.size()));
    g.ci95_low = g.mean - half;
    g.ci95_high = g.mean + half;
    return g;
}

inline std::vector<GroupSummary> summarize_groups(
    const std::map<std::string, std::vector<double>>& groups) {
    std::vector<GroupSummary> out;
    out.reserve(groups.size());
    for (const auto& [label, values] : groups) out.push_back(group_summary(values, label));
    return out;
}

inline std::vector<GroupSummary> summarize_by(const std::vector<ChordValence>& chords, Factor f) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& cv : chords)
        if (auto label = factor_label(cv, f)) groups[*label].push_back(cv.valence);
    return summarize_groups(groups);
}

// --- Mann–Whitney -----------------------------------------------------------

// 1-based ranks with ties sharing their average rank, in input order
inline std::vector<double> midranks(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j) + 2.0) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace detail {

inline double mw_u(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = midranks(pooled);
    double ra = std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0);
    return ra - static_cast<double>(a.size()) * (static_cast<double>(a.size()) + 1.0) / 2.0;
}

}  // namespace detail

// Exact one-tailed P(U_a >= observed) conditioned on the observed rank
// multiset. Midranks are half-integers, so doubling them makes the rank
// sums integral and the distribution a small counting DP over the smaller
// sample; arrangement counts are held as doubles (they exceed 2^64 long
// before p loses meaningful precision).
inline double mann_whitney_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptyGroup("mann_whitney_exact_p: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size(), N = n1 + n2;
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = midranks(pooled);

    std::vector<std::int64_t> r2(N);
    std::int64_t s_total = 0;
    for (std::size_t i = 0; i < N; ++i) {
        r2[i] = std::llround(2.0 * ranks[i]);
        s_total += r2[i];
    }
    std::int64_t s_a_obs = 0;
    for (std::size_t i = 0; i < n1; ++i) s_a_obs += r2[i];

    const bool small_is_a = n1 <= n2;
    const std::size_t k = std::min(n1, n2);
    std::vector<std::int64_t> sorted_r2 = r2;
    std::sort(sorted_r2.rbegin(), sorted_r2.rend());
    std::int64_t smax = std::accumulate(sorted_r2.begin(), sorted_r2.begin() + k, std::int64_t{0});

    // ways[j][s] = number of j-subsets of the pooled ranks with doubled-rank sum s
    std::vector<std::vector<double>> ways(k + 1,
                                          std::vector<double>(static_cast<std::size_t>(smax) + 1));
    ways[0][0] = 1.0;
    for (std::int64_t r : r2)
        for (std::size_t j = k; j >= 1; --j)
            for (std::int64_t s = smax; s >= r; --s)
                ways[j][static_cast<std::size_t>(s)] +=
                    ways[j - 1][static_cast<std::size_t>(s - r)];

    double total = 0.0, hits = 0.0;
    for (std::int64_t s = 0; s <= smax; ++s) {
        double w = ways[k][static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        total += w;
        // U_a >= obs is monotone in the a-side rank sum; when the DP ran over
        // the b side, the same event is R_b <= observed R_b
        bool hit = small_is_a ? s >= s_a_obs : s <= s_total - s_a_obs;
        if (hit) hits += w;
    }
    return hits / total;
}

// Normal approximation for P(U_a >= observed): tie-corrected variance and a
// 0.5 continuity correction.
inline double mann_whitney_normal_p(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptyGroup("mann_whitney_normal_p: empty sample");
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
    const double N = n1 + n2;
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    double u = detail::mw_u(a, b);

    std::sort(pooled.begin(), pooled.end());
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }

    double var = (n1 * n2 / 12.0) * ((N + 1.0) - tie_sum / (N * (N - 1.0)));
    if (var <= 0.0) return 0.5;
    double z = (u - n1 * n2 / 2.0 - 0.5) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

enum class MWAlternative { AGreater, BGreater };

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the sample favored by the alternative
    double p = 0.5;
    bool exact = false;       // exact enumeration rather than normal approximation
    bool degenerate = false;  // every pooled value identical
};

// One-tailed test: exact enumeration when the smaller sample has at most 8
// observations, normal approximation otherwise. A fully constant pooled
// sample carries no ordering information, so p is reported as 0.5.
inline MannWhitneyResult mann_whitney_one_tailed(const std::vector<double>& a,
                                                 const std::vector<double>& b,
                                                 MWAlternative alternative) {
    if (a.empty() || b.empty()) throw EmptyGroup("mann_whitney_one_tailed: empty sample");
    if (alternative == MWAlternative::BGreater)
        return mann_whitney_one_tailed(b, a, MWAlternative::AGreater);

    MannWhitneyResult r;
    r.u = detail::mw_u(a, b);
    bool all_same = true;
    for (double x : a)
        if (x != a.front()) all_same = false;
    for (double x : b)
        if (x != a.front()) all_same = false;
    if (all_same) {
        r.degenerate = true;
        return r;
    }
    if (std::min(a.size(), b.size()) <= 8) {
        r.exact = true;
        r.p = mann_whitney_exact_p(a, b);
    } else {
        r.p = mann_whitney_normal_p(a, b);
    }
    return r;
}

// --- Major − Minor ----------------------------------------------------------

struct DiffSummary {
    std::string label;
    double diff = 0.0;  // positive means Major above Minor
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    std::size_t n_major = 0;
    std::size_t n_minor = 0;
};

// Per-label Major−Minor mean difference with a two-sample normal CI. Labels
// missing either side are skipped and reported through `skipped`.
inline std::map<std::string, DiffSummary> major_minor_diff(
    const std::vector<ChordValence>& chords, Factor group_by,
    std::vector<std::string>* skipped = nullptr) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& cv : chords) {
        if (cv.category != ChordCategory::Major && cv.category != ChordCategory::Minor) continue;
        auto label = factor_label(cv, group_by);
        if (!label) continue;
        auto& [majors, minors] = groups[*label];
        (cv.category == ChordCategory::Major ? majors : minors).push_back(cv.valence);
    }
    std::map<std::string, DiffSummary> out;
    for (const auto& [label, mm] : groups) {
        const auto& [majors, minors] = mm;
        if (majors.empty() || minors.empty()) {
            if (skipped) skipped->push_back(label);
            continue;
        }
        DiffSummary d;
        d.label = label;
        d.n_major = majors.size();
        d.n_minor = minors.size();
        double m1 = vec_mean(majors), m2 = vec_mean(minors);
        double s1 = sample_std(majors, m1), s2 = sample_std(minors, m2);
        d.diff = m1 - m2;
        double half = kZ95 * std::sqrt(s1 * s1 / static_cast<double>(majors.size()) +
                                       s2 * s2 / static_cast<double>(minors.size()));
        d.ci95_low = d.diff - half;
        d.ci95_high = d.diff + half;
        out.emplace(label, std::move(d));
    }
    return out;
}

// Within-group category proportions; only categories present appear, and
// each group's proportions sum to one. Without a factor everything falls in
// one group labeled "".
inline std::map<std::pair<std::string, ChordCategory>, double> category_prevalence(
    const std::vector<ChordValence>& chords, std::optional<Factor> group_by = std::nullopt) {
    std::map<std::string, std::map<ChordCategory, std::size_t>> counts;
    for (const auto& cv : chords) {
        std::string label;
        if (group_by) {
            auto l = factor_label(cv, *group_by);
            if (!l) continue;
            label = *l;
        }
        ++counts[label][cv.category];
    }
    std::map<std::pair<std::string, ChordCategory>, double> out;
    for (const auto& [label, per_cat] : counts) {
        std::size_t total = 0;
        for (const auto& [cat, n] : per_cat) total += n;
        for (const auto& [cat, n] : per_cat)
            out[{label, cat}] = static_cast<double>(n) / static_cast<double>(total);
    }
    return out;
}

}  // namespace chordlift
