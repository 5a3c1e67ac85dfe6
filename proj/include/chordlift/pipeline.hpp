#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chordlift/config.hpp"
#include "chordlift/format.hpp"
#include "chordlift/lexicon.hpp"
#include "chordlift/metadata.hpp"
#include "chordlift/modeling.hpp"
#include "chordlift/stats.hpp"
#include "chordlift/tab.hpp"
#include "chordlift/table.hpp"
#include "chordlift/wordshift.hpp"

namespace chordlift {

class PipelineError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexEntry {
    std::string song_id;
    std::string title;
    std::string artist;
    double rating = 0.0;
    std::string path;  // tab file, relative to the corpus directory
};

inline std::vector<IndexEntry> read_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot open index: " + path);
    std::vector<IndexEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::is_blank(line)) continue;
        std::string where = path + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw PipelineError(where + ": bad JSON: " + e.what());
        }
        if (!j.is_object()) throw PipelineError(where + ": not an object");
        IndexEntry e;
        try {
            e.song_id = j.at("song_id").get<std::string>();
            e.title = j.at("title").get<std::string>();
            e.artist = j.at("artist").get<std::string>();
            e.rating = j.at("rating").get<double>();
            e.path = j.at("path").get<std::string>();
        } catch (const std::exception& ex) {
            throw PipelineError(where + ": " + ex.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

namespace detail {

inline void ensure_parent_dir(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw PipelineError("cannot read file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::unordered_set<std::string> load_wordlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot open wordlist: " + path);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = text::trim(line);
        if (!w.empty()) out.insert(text::to_lower(w));
    }
    return out;
}

// run fn(i) for i in [0, count) across up to `parallelism` threads; results
// land in slot i, so the caller's view is order-independent of scheduling
template <typename Fn>
inline void parallel_for(std::size_t count, int parallelism, Fn&& fn) {
    if (count == 0) return;
    std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline std::string chord_root_text(const ChordSymbol& c) {
    std::string out(1, c.root);
    out += accidental_text(c.accidental);
    return out;
}

}  // namespace detail

struct IngestDiagnostics {
    std::size_t songs_in = 0;
    std::size_t duplicates_removed = 0;
    std::size_t non_english_songs_dropped = 0;
    std::size_t songs_kept = 0;
    std::size_t chords_dropped_unparseable = 0;
    std::size_t events_dropped_no_words = 0;
    std::size_t words_dropped_no_chord = 0;
    std::size_t final_events = 0;
    std::size_t final_rows = 0;
};

// corpus + index -> deduped, parsed, English-filtered chord-word table plus
// a JSON diagnostics sidecar
inline IngestDiagnostics run_ingest(const std::string& corpus_dir, const std::string& index_path,
                                    const Config& cfg, const std::string& table_path,
                                    const std::string& diagnostics_path) {
    auto index = read_index(index_path);
    detail::ensure_parent_dir(table_path);
    detail::ensure_parent_dir(diagnostics_path);
    IngestDiagnostics diag;
    diag.songs_in = index.size();

    std::vector<TabDocument> docs(index.size());
    {
        std::vector<std::exception_ptr> errs(index.size());
        detail::parallel_for(index.size(), cfg.parallelism, [&](std::size_t i) {
            try {
                std::filesystem::path p(index[i].path);
                if (p.is_relative()) p = std::filesystem::path(corpus_dir) / p;
                docs[i] = TabDocument{index[i].song_id, index[i].title, index[i].artist,
                                      index[i].rating, detail::read_file(p)};
            } catch (...) {
                errs[i] = std::current_exception();
            }
        });
        for (const auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    auto deduped = dedupe(docs);
    diag.duplicates_removed = docs.size() - deduped.size();

    std::vector<ParseOutcome> outcomes(deduped.size());
    detail::parallel_for(deduped.size(), cfg.parallelism,
                         [&](std::size_t i) { outcomes[i] = parse_tab(deduped[i]); });

    std::unordered_set<std::string> wordlist;
    bool filter_english = !cfg.wordlist_path.empty();
    if (filter_english) wordlist = detail::load_wordlist(cfg.wordlist_path);

    Table table;
    for (auto& outcome : outcomes) {
        diag.chords_dropped_unparseable += outcome.diag.unparsed_chord_tokens;
        diag.events_dropped_no_words += outcome.diag.events_dropped_no_words;
        diag.words_dropped_no_chord += outcome.diag.words_dropped_no_chord;

        if (filter_english) {
            std::vector<std::string> all_words;
            for (const auto& e : outcome.events)
                all_words.insert(all_words.end(), e.words.begin(), e.words.end());
            if (!is_english(all_words, wordlist)) {
                ++diag.non_english_songs_dropped;
                continue;
            }
        }
        ++diag.songs_kept;

        std::stable_sort(outcome.events.begin(), outcome.events.end(),
                         [](const ChordLyricEvent& a, const ChordLyricEvent& b) {
                             if (a.line_index != b.line_index) return a.line_index < b.line_index;
                             return a.column < b.column;
                         });
        for (const auto& e : outcome.events) {
            ++diag.final_events;
            for (const auto& w : e.words) {
                TableRow r;
                r.song_id = e.song_id;
                r.chord_raw = e.chord.raw;
                r.root = detail::chord_root_text(e.chord);
                r.category = std::string(category_name(e.chord.category));
                r.word = w;
                table.rows.push_back(std::move(r));
            }
        }
    }
    diag.final_rows = table.rows.size();

    write_table_file(table, table_path);

    nlohmann::json j;
    j["songs_in"] = diag.songs_in;
    j["duplicates_removed"] = diag.duplicates_removed;
    j["non_english_songs_dropped"] = diag.non_english_songs_dropped;
    j["songs_kept"] = diag.songs_kept;
    j["chords_dropped_unparseable"] = diag.chords_dropped_unparseable;
    j["events_dropped_no_words"] = diag.events_dropped_no_words;
    j["words_dropped_no_chord"] = diag.words_dropped_no_chord;
    j["final_events"] = diag.final_events;
    j["final_rows"] = diag.final_rows;
    std::ofstream out(diagnostics_path, std::ios::binary);
    if (!out) throw PipelineError("cannot write diagnostics: " + diagnostics_path);
    out << j.dump(2) << "\n";
    return diag;
}

struct EnrichStats {
    std::size_t songs_matched = 0;
    std::size_t songs_dropped = 0;  // no metadata record: song leaves the table
    std::size_t rows_out = 0;
};

namespace detail {

// metadata for the songs actually present, from the file or the endpoint
inline std::map<std::string, std::optional<SongRecord>> gather_metadata(
    const std::vector<std::string>& song_ids, const Config& cfg, const std::string& index_path) {
    std::map<std::string, std::optional<SongRecord>> found;
    if (!cfg.metadata_file.empty()) {
        auto loaded = load_metadata_file(cfg.metadata_file);
        for (const auto& id : song_ids) {
            auto it = loaded.records.find(id);
            found[id] = it != loaded.records.end() ? std::optional<SongRecord>(it->second)
                                                   : std::nullopt;
        }
        return found;
    }
    if (cfg.metadata_endpoint.empty())
        throw PipelineError("no metadata source: set metadata_file or metadata_endpoint");

    // endpoint lookups key on title/artist, which live in the index
    std::map<std::string, IndexEntry> by_id;
    for (auto& e : read_index(index_path)) by_id[e.song_id] = e;
    std::vector<std::optional<SongRecord>> results(song_ids.size());
    std::vector<std::exception_ptr> errs(song_ids.size());
    parallel_for(song_ids.size(), cfg.parallelism, [&](std::size_t i) {
        try {
            auto it = by_id.find(song_ids[i]);
            if (it == by_id.end())
                throw PipelineError("song not in index: " + song_ids[i]);
            auto rec =
                fetch_metadata(cfg.metadata_endpoint, it->second.title, it->second.artist);
            if (rec) rec->song_id = song_ids[i];
            results[i] = rec;
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    for (std::size_t i = 0; i < song_ids.size(); ++i) found[song_ids[i]] = results[i];
    return found;
}

inline EnrichStats enrich_rows(Table& t, const Config& cfg, const std::string& index_path) {
    std::vector<std::string> song_ids;
    for (const auto& r : t.rows)
        if (song_ids.empty() || song_ids.back() != r.song_id) song_ids.push_back(r.song_id);
    std::sort(song_ids.begin(), song_ids.end());
    song_ids.erase(std::unique(song_ids.begin(), song_ids.end()), song_ids.end());

    auto meta = gather_metadata(song_ids, cfg, index_path);

    EnrichStats stats;
    for (const auto& id : song_ids)
        if (meta.at(id))
            ++stats.songs_matched;
        else
            ++stats.songs_dropped;

    std::vector<TableRow> kept;
    kept.reserve(t.rows.size());
    for (auto& r : t.rows) {
        const auto& rec = meta.at(r.song_id);
        if (!rec) continue;  // unmatched songs drop out entirely
        if (rec->genre) r.genre = *rec->genre;
        if (auto era = resolve_era(*rec)) r.era = *era;
        if (rec->region) r.region = *rec->region;
        kept.push_back(std::move(r));
    }
    t.rows = std::move(kept);
    t.enriched = true;
    stats.rows_out = t.rows.size();
    return stats;
}

}  // namespace detail

inline EnrichStats run_enrich(const std::string& table_path, const Config& cfg,
                              const std::string& index_path, const std::string& out_path) {
    auto t = read_table(table_path);
    if (t.enriched) throw PipelineError(table_path + " is already enriched");
    auto stats = detail::enrich_rows(t, cfg, index_path);
    detail::ensure_parent_dir(out_path);
    write_table_file(t, out_path);
    return stats;
}

namespace detail {

// per-song labels reconstructed from an enriched table, for popularity counts
inline std::vector<SongRecord> song_records_from_table(const Table& t) {
    std::map<std::string, SongRecord> by_id;
    for (const auto& r : t.rows) {
        auto [it, inserted] = by_id.try_emplace(r.song_id);
        if (!inserted) continue;
        it->second.song_id = r.song_id;
        if (!r.genre.empty()) it->second.genre = r.genre;
        if (!r.era.empty()) it->second.era = r.era;
        if (!r.region.empty()) it->second.region = r.region;
    }
    std::vector<SongRecord> out;
    out.reserve(by_id.size());
    for (auto& [id, rec] : by_id) out.push_back(std::move(rec));
    return out;
}

inline bool in_allowlist(const std::vector<std::string>& allow, const std::string& label) {
    return allow.empty() || std::find(allow.begin(), allow.end(), label) != allow.end();
}

// analyze/wordshift/model share this: the table with labels attached plus
// the per-factor allowlists in force
struct AnalysisInput {
    Table table;
    Lexicon lexicon;
    std::vector<ScoredInstance> instances;
    std::map<Factor, std::vector<std::string>> allow;  // empty vector: no restriction
};

inline AnalysisInput prepare_analysis(const std::string& table_path, const Config& cfg,
                                      const std::string& index_path) {
    AnalysisInput in;
    in.table = read_table(table_path);
    if (!in.table.enriched && (!cfg.metadata_file.empty() || !cfg.metadata_endpoint.empty()))
        enrich_rows(in.table, cfg, index_path);
    if (cfg.lexicon_path.empty()) throw PipelineError("config is missing lexicon_path");
    in.lexicon = load_lexicon(cfg.lexicon_path, cfg.band_low, cfg.band_high);
    in.instances = score_instances(in.table, in.lexicon);

    auto songs = song_records_from_table(in.table);
    in.allow[Factor::Category] = {};
    in.allow[Factor::Genre] =
        top_levels(songs, Factor::Genre, static_cast<std::size_t>(cfg.top_genres));
    in.allow[Factor::Era] = cfg.eras;
    in.allow[Factor::Region] = cfg.regions;
    return in;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write: " + path.string());
    out << content;
}

}  // namespace detail

// All the summary tables, written under cfg.output_dir. Rows are sorted by
// label and every number is fixed6, so reruns are byte-identical.
inline void run_analyze(const std::string& table_path, const Config& cfg,
                        const std::string& index_path, std::ostream& warnings) {
    auto in = detail::prepare_analysis(table_path, cfg, index_path);
    std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);

    for (Factor f : kAllFactors) {
        const auto& allow = in.allow.at(f);
        std::map<std::string, std::vector<double>> chord_groups;
        std::map<std::string, std::vector<double>> word_groups;
        for (const auto& si : in.instances) {
            auto label = factor_label(si.chord, f);
            if (!label || !detail::in_allowlist(allow, *label)) continue;
            chord_groups[*label].push_back(si.chord.valence);
            for (const auto& [w, v] : si.words) word_groups[*label].push_back(v);
        }
        std::string doc = "label\tunit\tn\tmean\tci95_low\tci95_high\n";
        for (const auto& [label, values] : chord_groups) {
            for (const char* unit : {"chord_mean", "word_mean"}) {
                const auto& vals =
                    std::string(unit) == "chord_mean" ? values : word_groups.at(label);
                auto g = group_summary(vals, label);
                doc += label;
                doc += '\t';
                doc += unit;
                doc += '\t' + std::to_string(g.n) + '\t' + fixed6(g.mean) + '\t' +
                       fixed6(g.ci95_low) + '\t' + fixed6(g.ci95_high) + '\n';
            }
        }
        detail::write_text_file(
            out_dir / ("valence_by_" + std::string(factor_name(f)) + ".tsv"), doc);
    }

    std::vector<ChordValence> chords;
    chords.reserve(in.instances.size());
    for (const auto& si : in.instances) chords.push_back(si.chord);

    for (Factor f : {Factor::Genre, Factor::Era, Factor::Region}) {
        const auto& allow = in.allow.at(f);
        std::vector<ChordValence> eligible;
        for (const auto& cv : chords) {
            auto label = factor_label(cv, f);
            if (label && detail::in_allowlist(allow, *label)) eligible.push_back(cv);
        }
        std::vector<std::string> skipped;
        auto diffs = major_minor_diff(eligible, f, &skipped);
        for (const auto& s : skipped)
            warnings << "major_minor_by_" << factor_name(f) << ": skipping '" << s
                     << "' (needs both Major and Minor)\n";
        std::string doc = "label\tdiff\tci95_low\tci95_high\tn_major\tn_minor\n";
        for (const auto& [label, d] : diffs)
            doc += label + '\t' + fixed6(d.diff) + '\t' + fixed6(d.ci95_low) + '\t' +
                   fixed6(d.ci95_high) + '\t' + std::to_string(d.n_major) + '\t' +
                   std::to_string(d.n_minor) + '\n';
        detail::write_text_file(
            out_dir / ("major_minor_by_" + std::string(factor_name(f)) + ".tsv"), doc);
    }

    {
        std::vector<ChordValence> eligible;
        for (const auto& cv : chords) {
            auto label = factor_label(cv, Factor::Era);
            if (label && detail::in_allowlist(in.allow.at(Factor::Era), *label))
                eligible.push_back(cv);
        }
        auto prev = category_prevalence(eligible, Factor::Era);
        std::string doc = "era\tcategory\tproportion\n";
        for (const auto& [key, proportion] : prev)
            doc += key.first + '\t' + std::string(category_name(key.second)) + '\t' +
                   fixed6(proportion) + '\n';
        detail::write_text_file(out_dir / "prevalence_by_era.tsv", doc);
    }

    {
        std::map<ChordCategory, std::vector<double>> by_cat;
        for (const auto& cv : chords) by_cat[cv.category].push_back(cv.valence);
        std::string doc = "test\tn_a\tn_b\tu\tp\tmethod\n";
        const std::pair<ChordCategory, ChordCategory> pairs[] = {
            {ChordCategory::Major, ChordCategory::Minor},
            {ChordCategory::Major7, ChordCategory::Major},
            {ChordCategory::Minor7, ChordCategory::Major},
            {ChordCategory::Dominant7, ChordCategory::Major},
        };
        for (const auto& [hi, lo] : pairs) {
            auto a = by_cat.find(hi);
            auto b = by_cat.find(lo);
            if (a == by_cat.end() || b == by_cat.end()) continue;
            auto r = mann_whitney_one_tailed(a->second, b->second, MWAlternative::AGreater);
            const char* method = r.degenerate ? "degenerate" : (r.exact ? "exact" : "normal");
            doc += std::string(category_name(hi)) + "_gt_" + std::string(category_name(lo)) +
                   '\t' + std::to_string(a->second.size()) + '\t' +
                   std::to_string(b->second.size()) + '\t' + fixed6(r.u) + '\t' + fixed6(r.p) +
                   '\t' + method + '\n';
        }
        detail::write_text_file(out_dir / "mw_tests.tsv", doc);
    }
}

// Comparison slice vs reference (whole corpus unless told otherwise),
// rendered to wordshift_<factor>_<label>.<ext>. Returns the output path.
inline std::filesystem::path run_wordshift(
    const std::string& table_path, const Config& cfg, const std::string& index_path,
    Factor compare_factor, const std::string& compare_label,
    const std::optional<std::pair<Factor, std::string>>& reference, std::size_t top_n,
    const std::string& format) {
    if (format != "tsv" && format != "svg")
        throw PipelineError("unknown wordshift format: " + format);
    auto in = detail::prepare_analysis(table_path, cfg, index_path);

    auto bag_for = [&](std::optional<Factor> f, const std::string& label) {
        Bag bag;
        for (const auto& si : in.instances) {
            if (f) {
                auto l = factor_label(si.chord, *f);
                if (!l || *l != label) continue;
            }
            for (const auto& [w, v] : si.words) bag.add(w);
        }
        return bag;
    };

    Bag comparison = bag_for(compare_factor, compare_label);
    if (comparison.total == 0)
        throw PipelineError("no sentiment words for " +
                            std::string(factor_name(compare_factor)) + "=" + compare_label);
    Bag ref = reference ? bag_for(reference->first, reference->second)
                        : bag_for(std::nullopt, "");
    if (ref.total == 0) throw PipelineError("no sentiment words in the reference slice");

    auto shift = word_shift(comparison, ref, in.lexicon);

    std::string safe_label;
    for (char c : compare_label)
        safe_label += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
    std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);
    auto path = out_dir / ("wordshift_" + std::string(factor_name(compare_factor)) + "_" +
                           safe_label + "." + format);
    detail::write_text_file(path, format == "tsv" ? render_shift_tsv(shift.entries, top_n)
                                                  : render_shift_svg(shift.entries, top_n));
    return path;
}

// variance_explained.tsv + greedy AIC traces (per-model listwise n, plus a
// common-rows variant where every model shares one n)
inline void run_model(const std::string& table_path, const Config& cfg,
                      const std::string& index_path, const std::vector<Factor>& factors) {
    if (factors.empty()) throw PipelineError("model: no factors given");
    auto in = detail::prepare_analysis(table_path, cfg, index_path);
    std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);

    std::vector<ChordValence> chords;
    chords.reserve(in.instances.size());
    for (const auto& si : in.instances) chords.push_back(si.chord);

    LevelFilter filter;
    for (Factor f : factors) {
        const auto& allow = in.allow.at(f);
        if (!allow.empty()) filter[f] = allow;
    }

    {
        std::string doc = "factor\tr2\tn\n";
        for (Factor f : factors) {
            auto design = build_design(chords, {f}, filter);
            auto fit = ols_fit(design);
            double mean = design.y.mean();
            double tss = (design.y.array() - mean).square().sum();
            double r2 = tss == 0.0 ? 0.0 : std::clamp(1.0 - fit.rss / tss, 0.0, 1.0);
            doc += std::string(factor_name(f)) + '\t' + fixed6(r2) + '\t' +
                   std::to_string(fit.n) + '\n';
        }
        detail::write_text_file(out_dir / "variance_explained.tsv", doc);
    }

    auto render_trace = [](const std::vector<AicStep>& trace) {
        std::string doc = "step\tfactors\taic\tn\n";
        for (const auto& step : trace) {
            std::string names;
            if (step.factors.empty()) {
                names = "intercept";
            } else {
                for (std::size_t i = 0; i < step.factors.size(); ++i) {
                    if (i > 0) names += '+';
                    names += factor_name(step.factors[i]);
                }
            }
            doc += std::to_string(step.step) + '\t' + names + '\t' + fixed6(step.aic) + '\t' +
                   std::to_string(step.n) + '\n';
        }
        return doc;
    };
    detail::write_text_file(out_dir / "aic_trace.tsv",
                            render_trace(greedy_aic(chords, factors, filter, false)));
    detail::write_text_file(out_dir / "aic_trace_common.tsv",
                            render_trace(greedy_aic(chords, factors, filter, true)));
}

}  // namespace chordlift
