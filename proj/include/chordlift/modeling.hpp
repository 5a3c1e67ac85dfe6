#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chordlift/factor.hpp"
#include "chordlift/stats.hpp"

namespace chordlift {

class NoRowsRemain : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class RankDeficient : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> column_labels;   // "intercept", then "genre=Punk", ...
    std::vector<std::string> pruned_columns;  // constant or duplicate dummies dropped
};

// factor -> allowed levels (from top_levels); factors absent here keep all levels
using LevelFilter = std::map<Factor, std::vector<std::string>>;

namespace detail {

inline bool level_allowed(const LevelFilter& filter, Factor f, const std::string& level) {
    auto it = filter.find(f);
    if (it == filter.end()) return true;
    return std::find(it->second.begin(), it->second.end(), level) != it->second.end();
}

// a row participates only if every included factor has an in-filter label
inline bool row_usable(const ChordValence& cv, const std::vector<Factor>& factors,
                       const LevelFilter& filter) {
    for (Factor f : factors) {
        auto label = factor_label(cv, f);
        if (!label || !level_allowed(filter, f, *label)) return false;
    }
    return true;
}

}  // namespace detail

// Dummy coding over the retained rows: the most frequent level of each
// factor (ties to the lexicographically smallest) is the omitted reference;
// the remaining levels get indicator columns in sorted order. Constant or
// duplicate columns are pruned and reported, never fitted.
inline DesignMatrix build_design(const std::vector<ChordValence>& chords,
                                 const std::vector<Factor>& factors,
                                 const LevelFilter& level_filter = {}) {
    std::vector<const ChordValence*> rows;
    for (const auto& cv : chords)
        if (detail::row_usable(cv, factors, level_filter)) rows.push_back(&cv);
    if (rows.empty()) throw NoRowsRemain("build_design: no rows remain after filtering");

    const auto n = static_cast<Eigen::Index>(rows.size());

    // per factor: levels present, their counts, and the reference choice
    struct DummyColumn {
        Factor factor;
        std::string level;
    };
    std::vector<DummyColumn> dummies;
    for (Factor f : factors) {
        std::map<std::string, std::size_t> counts;
        for (const auto* cv : rows) ++counts[*factor_label(*cv, f)];
        std::string reference;
        std::size_t best = 0;
        for (const auto& [level, count] : counts)
            if (count > best) {  // map order makes ties lexicographic
                best = count;
                reference = level;
            }
        for (const auto& [level, count] : counts)
            if (level != reference) dummies.push_back({f, level});
    }

    // materialize with pruning: intercept always kept
    std::vector<Eigen::VectorXd> kept;
    DesignMatrix out;
    kept.push_back(Eigen::VectorXd::Ones(n));
    out.column_labels.push_back("intercept");
    for (const auto& d : dummies) {
        Eigen::VectorXd col(n);
        for (Eigen::Index i = 0; i < n; ++i)
            col(i) = *factor_label(*rows[static_cast<std::size_t>(i)], d.factor) == d.level
                         ? 1.0
                         : 0.0;
        std::string label = std::string(factor_name(d.factor)) + "=" + d.level;
        bool constant = col.maxCoeff() == col.minCoeff();
        bool duplicate = false;
        for (const auto& k : kept)
            if ((k - col).cwiseAbs().maxCoeff() == 0.0) duplicate = true;
        if (constant || duplicate) {
            out.pruned_columns.push_back(std::move(label));
            continue;
        }
        kept.push_back(std::move(col));
        out.column_labels.push_back(std::move(label));
    }

    out.X.resize(n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) out.X.col(static_cast<Eigen::Index>(j)) = kept[j];
    out.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.y(i) = rows[static_cast<std::size_t>(i)]->valence;
    return out;
}

struct FitResult {
    Eigen::VectorXd coefficients;
    double rss = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;  // fitted parameters including the intercept
    double aic = 0.0;
};

// Gaussian-MLE AIC; the +1 counts the error variance alongside the k
// regression parameters. rss is floored so an exact fit stays finite.
inline double aic_from_rss(double rss, std::size_t n, std::size_t k) {
    double nn = static_cast<double>(n);
    return nn * std::log(std::max(rss, 1e-300) / nn) + 2.0 * (static_cast<double>(k) + 1.0);
}

inline FitResult ols_fit(const DesignMatrix& d) {
    FitResult fit;
    fit.n = static_cast<std::size_t>(d.X.rows());
    fit.k = static_cast<std::size_t>(d.X.cols());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
    if (qr.rank() < d.X.cols())
        throw RankDeficient("ols_fit: design has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(d.X.cols()) + " columns");
    fit.coefficients = qr.solve(d.y);
    fit.rss = (d.y - d.X * fit.coefficients).squaredNorm();
    fit.aic = aic_from_rss(fit.rss, fit.n, fit.k);
    return fit;
}

// Share of response variance a single factor explains. 1 - rss/tss equals
// 1 - var(residuals)/var(response) because both variances divide by the
// same n.
inline double variance_explained(const std::vector<ChordValence>& chords, Factor factor,
                                 const LevelFilter& level_filter = {}) {
    auto design = build_design(chords, {factor}, level_filter);
    auto fit = ols_fit(design);
    double mean = design.y.mean();
    double tss = (design.y.array() - mean).square().sum();
    if (tss == 0.0) return 0.0;
    double r2 = 1.0 - fit.rss / tss;
    return std::clamp(r2, 0.0, 1.0);
}

struct AicStep {
    std::size_t step = 0;              // 0 is the intercept-only model
    std::vector<Factor> factors;       // cumulative, in the order added
    double aic = 0.0;
    std::size_t n = 0;
};

// Forward selection: start at intercept-only, repeatedly add the candidate
// whose model has the lowest AIC, and keep going until every candidate is
// in (the caller inspects the trace). Ties keep the earlier candidate.
// With common_rows the corpus is first cut to rows labeled for every
// candidate, so all AICs share one n; otherwise deletion is per model.
inline std::vector<AicStep> greedy_aic(const std::vector<ChordValence>& chords,
                                       const std::vector<Factor>& candidates,
                                       const LevelFilter& level_filter = {},
                                       bool common_rows = false) {
    if (candidates.empty()) throw std::invalid_argument("greedy_aic: no candidate factors");

    std::vector<ChordValence> pool;
    if (common_rows) {
        for (const auto& cv : chords)
            if (detail::row_usable(cv, candidates, level_filter)) pool.push_back(cv);
    } else {
        pool = chords;
    }

    auto fit_for = [&](const std::vector<Factor>& fs) {
        auto design = build_design(pool, fs, level_filter);
        return ols_fit(design);
    };

    std::vector<AicStep> trace;
    std::vector<Factor> chosen;
    auto base = fit_for(chosen);
    trace.push_back({0, {}, base.aic, base.n});

    std::vector<Factor> remaining = candidates;
    while (!remaining.empty()) {
        std::optional<std::size_t> best_idx;
        FitResult best_fit;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            auto with = chosen;
            with.push_back(remaining[i]);
            auto fit = fit_for(with);
            if (!best_idx || fit.aic < best_fit.aic) {
                best_idx = i;
                best_fit = fit;
            }
        }
        chosen.push_back(remaining[*best_idx]);
        remaining.erase(remaining.begin() + static_cast<long>(*best_idx));
        trace.push_back({trace.size(), chosen, best_fit.aic, best_fit.n});
    }
    return trace;
}

}  // namespace chordlift
