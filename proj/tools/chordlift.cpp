// chordlift — chord-lyric corpus pipeline.
//
//   ingest    corpus + index -> chord-word table (+ diagnostics.json)
//   enrich    join genre/era/region metadata onto a table
//   analyze   valence / Major-Minor / prevalence summary tables
//   wordshift per-word contributions for one slice vs. a reference
//   model     variance explained + greedy AIC factor selection
//
// Configuration comes from CHORDLIFT_CONFIG or --config (key=value file);
// command-line flags override the file. Exit codes: 0 success, 1 data
// error, 2 usage error.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "chordlift/pipeline.hpp"

namespace {

// bad command-line content noticed after CLI11 parsing (exit 2)
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// config keys a subcommand may override from the command line
struct Overrides {
    std::optional<std::string> lexicon, wordlist, metadata_file, metadata_endpoint, output_dir;
    std::optional<double> band_low, band_high;
    std::optional<int> top_genres, parallelism;
};

void add_metadata_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--metadata-file", o.metadata_file, "JSONL metadata file");
    cmd->add_option("--metadata-endpoint", o.metadata_endpoint, "metadata HTTP endpoint");
}

void add_analysis_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--lexicon", o.lexicon, "valence lexicon TSV");
    cmd->add_option("--band-low", o.band_low, "neutral band lower bound");
    cmd->add_option("--band-high", o.band_high, "neutral band upper bound");
    cmd->add_option("--top-genres", o.top_genres, "how many genres to keep, by song count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--output-dir", o.output_dir, "directory for output tables");
    add_metadata_flags(cmd, o);
}

chordlift::Config resolve_config(const std::string& config_path, const Overrides& o) {
    chordlift::Config cfg = config_path.empty() ? chordlift::Config{}
                                                : chordlift::load_config_file(config_path);
    if (o.lexicon) cfg.lexicon_path = *o.lexicon;
    if (o.wordlist) cfg.wordlist_path = *o.wordlist;
    if (o.metadata_file) cfg.metadata_file = *o.metadata_file;
    if (o.metadata_endpoint) cfg.metadata_endpoint = *o.metadata_endpoint;
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.band_low) cfg.band_low = *o.band_low;
    if (o.band_high) cfg.band_high = *o.band_high;
    if (o.top_genres) cfg.top_genres = *o.top_genres;
    if (o.parallelism) cfg.parallelism = *o.parallelism;
    if (!(cfg.band_low < cfg.band_high))
        throw chordlift::ConfigError("band_low must be below band_high");
    return cfg;
}

// under output_dir unless the user gave an explicit path
std::string default_out(const chordlift::Config& cfg, const std::string& given,
                        const std::string& name) {
    if (!given.empty()) return given;
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

// "genre=Punk" -> (Factor::Genre, "Punk")
std::pair<chordlift::Factor, std::string> parse_factor_label(const std::string& flag,
                                                             const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos)
        throw UsageError(flag + ": expected <factor>=<label>, got '" + text + "'");
    std::string name = text.substr(0, eq);
    auto f = chordlift::factor_from_name(name);
    if (!f) throw UsageError(flag + ": unknown factor '" + name + "'");
    return {*f, text.substr(eq + 1)};
}

std::vector<chordlift::Factor> parse_factors(const std::vector<std::string>& names) {
    std::vector<chordlift::Factor> out;
    for (const auto& name : names) {
        auto f = chordlift::factor_from_name(name);
        if (!f) throw UsageError("--factors: unknown factor '" + name + "'");
        out.push_back(*f);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chord-lyric corpus analysis"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file")
        ->envname("CHORDLIFT_CONFIG");

    Overrides ov;

    auto* ingest = app.add_subcommand("ingest", "parse a tab corpus into a chord-word table");
    std::string corpus_dir, index_path, table_out, diagnostics_out;
    ingest->add_option("corpus_dir", corpus_dir, "directory of tab .txt files")->required();
    ingest->add_option("index", index_path, "JSONL corpus index")->required();
    ingest->add_option("--output", table_out, "table path (default <output_dir>/chord_word_table.tsv)");
    ingest->add_option("--diagnostics", diagnostics_out,
                       "diagnostics path (default <output_dir>/diagnostics.json)");
    ingest->add_option("--wordlist", ov.wordlist, "English wordlist; empty skips the filter");
    ingest->add_option("--output-dir", ov.output_dir, "directory for outputs");
    ingest->add_option("--parallelism", ov.parallelism, "worker threads")
        ->check(CLI::PositiveNumber);

    auto* enrich = app.add_subcommand("enrich", "join metadata onto a chord-word table");
    std::string table_in, enrich_out, enrich_index;
    enrich->add_option("table", table_in, "chord-word table from ingest")->required();
    enrich->add_option("--output", enrich_out,
                       "enriched table path (default <output_dir>/chord_word_table_enriched.tsv)");
    enrich->add_option("--index", enrich_index, "JSONL corpus index (for endpoint lookups)");
    enrich->add_option("--output-dir", ov.output_dir, "directory for outputs");
    enrich->add_option("--parallelism", ov.parallelism, "worker threads")
        ->check(CLI::PositiveNumber);
    add_metadata_flags(enrich, ov);

    auto* analyze = app.add_subcommand("analyze", "write valence summary tables");
    std::string analyze_table, analyze_index;
    analyze->add_option("table", analyze_table, "chord-word table")->required();
    analyze->add_option("--index", analyze_index, "JSONL corpus index (for endpoint lookups)");
    add_analysis_flags(analyze, ov);

    auto* wordshift = app.add_subcommand("wordshift", "rank per-word valence contributions");
    std::string ws_table, ws_index, ws_compare, ws_reference, ws_format = "tsv";
    std::size_t ws_top = 20;
    wordshift->add_option("table", ws_table, "chord-word table")->required();
    wordshift->add_option("--index", ws_index, "JSONL corpus index (for endpoint lookups)");
    wordshift->add_option("--compare", ws_compare, "comparison slice, e.g. genre=Punk")
        ->required();
    wordshift->add_option("--reference", ws_reference,
                          "reference slice (default: whole corpus)");
    wordshift->add_option("--top", ws_top, "rows to emit")->check(CLI::PositiveNumber);
    wordshift->add_option("--format", ws_format, "tsv or svg")
        ->check(CLI::IsMember({"tsv", "svg"}));
    add_analysis_flags(wordshift, ov);

    auto* model = app.add_subcommand("model", "variance explained and greedy AIC selection");
    std::string model_table, model_index;
    std::vector<std::string> factor_names = {"category", "genre", "era", "region"};
    model->add_option("table", model_table, "chord-word table")->required();
    model->add_option("--index", model_index, "JSONL corpus index (for endpoint lookups)");
    model->add_option("--factors", factor_names, "comma-separated factors")
        ->delimiter(',');
    add_analysis_flags(model, ov);

    for (auto* sub : {ingest, enrich, analyze, wordshift, model}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        chordlift::Config cfg = resolve_config(config_path, ov);

        if (*ingest) {
            auto diag = chordlift::run_ingest(
                corpus_dir, index_path, cfg,
                default_out(cfg, table_out, "chord_word_table.tsv"),
                default_out(cfg, diagnostics_out, "diagnostics.json"));
            std::cout << "ingest: " << diag.songs_in << " songs in, "
                      << diag.duplicates_removed << " duplicates removed, "
                      << diag.non_english_songs_dropped << " non-English dropped, "
                      << diag.songs_kept << " kept\n";
            std::cout << "ingest: " << diag.final_events << " chord events, "
                      << diag.final_rows << " chord-word rows\n";
            if (diag.final_rows == 0)
                std::cerr << "chordlift: warning: no chord-word rows produced\n";
        } else if (*enrich) {
            auto stats = chordlift::run_enrich(
                table_in, cfg, enrich_index,
                default_out(cfg, enrich_out, "chord_word_table_enriched.tsv"));
            std::cout << "enrich: " << stats.songs_matched << " songs matched, "
                      << stats.songs_dropped << " without metadata dropped, "
                      << stats.rows_out << " rows out\n";
        } else if (*analyze) {
            chordlift::run_analyze(analyze_table, cfg, analyze_index, std::cerr);
            std::cout << "analyze: tables written to " << cfg.output_dir << "\n";
        } else if (*wordshift) {
            auto [cf, cl] = parse_factor_label("--compare", ws_compare);
            std::optional<std::pair<chordlift::Factor, std::string>> ref;
            if (!ws_reference.empty())
                ref = parse_factor_label("--reference", ws_reference);
            auto path = chordlift::run_wordshift(ws_table, cfg, ws_index, cf, cl, ref,
                                                 ws_top, ws_format);
            std::cout << "wordshift: wrote " << path.string() << "\n";
        } else if (*model) {
            chordlift::run_model(model_table, cfg, model_index, parse_factors(factor_names));
            std::cout << "model: tables written to " << cfg.output_dir << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "chordlift: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "chordlift: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
