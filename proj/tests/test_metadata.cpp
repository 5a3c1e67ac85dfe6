#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "chordlift/metadata.hpp"

using namespace chordlift;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

// Tiny localhost provider the client code talks to for real.
struct StubServer {
    httplib::Server svr;
    int port = 0;
    std::thread th;

    void start() {
        port = svr.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        th = std::thread([this] { svr.listen_after_bind(); });
        svr.wait_until_ready();
    }
    ~StubServer() {
        svr.stop();
        if (th.joinable()) th.join();
    }
    std::string endpoint(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port) + path;
    }
};

FetchOptions fast_opts(int retries) {
    FetchOptions o;
    o.max_retries = retries;
    o.base_delay = std::chrono::milliseconds(2);
    return o;
}

SongRecord rec(std::string id, std::optional<std::string> genre, std::optional<std::string> era,
               std::optional<std::string> region, std::optional<int> year) {
    SongRecord r;
    r.song_id = std::move(id);
    r.genre = std::move(genre);
    r.era = std::move(era);
    r.region = std::move(region);
    r.album_year = year;
    return r;
}

}  // namespace

TEST_CASE("metadata file: happy path, malformed lines, duplicates") {
    auto p = write_temp("chordlift_meta.jsonl",
                        R"({"song_id":"s1","genre":"Folk","era":null,"album_year":1973,"region":"North America"})"
                        "\n"
                        "this line is not json\n"
                        "\n"
                        R"({"song_id":"s2","genre":"Pop","era":"1980's","album_year":1991,"region":"Oceania"})"
                        "\n"
                        R"({"song_id":"s1","genre":"Rock"})"
                        "\n"
                        R"({"title":"no id here"})"
                        "\n");
    auto loaded = load_metadata_file(p.string());
    CHECK(loaded.records.size() == 2);
    CHECK(loaded.malformed_lines == 2);  // non-json line + object without song_id
    CHECK(loaded.duplicate_ids == 1);

    // last record for s1 wins wholesale
    const auto& s1 = loaded.records.at("s1");
    CHECK(s1.genre == "Rock");
    CHECK_FALSE(s1.album_year.has_value());
    CHECK_FALSE(s1.region.has_value());

    const auto& s2 = loaded.records.at("s2");
    CHECK(s2.era == "1980's");
    CHECK(s2.region == "Australia/Oceania");  // alias folded on load
    CHECK(s2.album_year == 1991);
    fs::remove(p);
}

TEST_CASE("metadata file: unreadable path throws") {
    try {
        load_metadata_file("/nonexistent/dir/meta.jsonl");
        FAIL("expected MetadataError");
    } catch (const MetadataError& e) {
        CHECK(e.kind() == MetadataErrorKind::FileUnreadable);
    }
}

TEST_CASE("metadata file: era outside the known decades is dropped") {
    auto p = write_temp("chordlift_meta_era.jsonl",
                        R"({"song_id":"s1","era":"1985","album_year":1985})"
                        "\n"
                        R"({"song_id":"s2","era":"sixties"})"
                        "\n");
    auto loaded = load_metadata_file(p.string());
    CHECK_FALSE(loaded.records.at("s1").era.has_value());
    CHECK(resolve_era(loaded.records.at("s1")) == "1980's");  // falls back to the year
    CHECK_FALSE(resolve_era(loaded.records.at("s2")).has_value());
    fs::remove(p);
}

TEST_CASE("resolve_era prefers the artist label over the album year") {
    CHECK(resolve_era(rec("a", {}, "1980's", {}, 1991)) == "1980's");
    CHECK(resolve_era(rec("b", {}, std::nullopt, {}, 1973)) == "1970's");
    CHECK_FALSE(resolve_era(rec("c", {}, std::nullopt, {}, std::nullopt)).has_value());
}

TEST_CASE("decade_label covers exactly the seven decades") {
    CHECK_FALSE(decade_label(1949).has_value());
    CHECK(decade_label(1950) == "1950's");
    CHECK(decade_label(1959) == "1950's");
    CHECK(decade_label(1999) == "1990's");
    CHECK(decade_label(2019) == "2010's");
    CHECK_FALSE(decade_label(2020).has_value());
}

TEST_CASE("normalize_region folds aliases and trims") {
    CHECK(normalize_region("Oceania") == "Australia/Oceania");
    CHECK(normalize_region("  North America ") == "North America");
    CHECK(normalize_region("Scandinavia") == "Scandinavia");
    CHECK(normalize_region("Atlantis") == "Atlantis");  // unknown passes through
}

TEST_CASE("top_levels ranks by count then name") {
    std::vector<SongRecord> records;
    auto add = [&](const std::string& genre, int n) {
        for (int i = 0; i < n; ++i) records.push_back(rec("x", genre, {}, {}, {}));
    };
    add("Rock", 5);
    add("Punk", 3);
    add("Jazz", 1);
    CHECK(top_levels(records, Factor::Genre, 2) == std::vector<std::string>{"Rock", "Punk"});
    CHECK(top_levels(records, Factor::Genre, 10) ==
          std::vector<std::string>{"Rock", "Punk", "Jazz"});

    add("Blues", 3);  // ties with Punk; Blues sorts first
    CHECK(top_levels(records, Factor::Genre, 3) ==
          std::vector<std::string>{"Rock", "Blues", "Punk"});

    SECTION("order of input rows does not matter") {
        auto expected = top_levels(records, Factor::Genre, 3);
        std::mt19937 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            std::shuffle(records.begin(), records.end(), rng);
            CHECK(top_levels(records, Factor::Genre, 3) == expected);
        }
    }
}

TEST_CASE("top_levels restricts region and era to their vocabularies") {
    std::vector<SongRecord> records;
    records.push_back(rec("a", {}, {}, "North America", {}));
    records.push_back(rec("b", {}, {}, "North America", {}));
    records.push_back(rec("c", {}, {}, "Narnia", {}));  // not a known region
    records.push_back(rec("d", {}, {}, "Scandinavia", {}));
    CHECK(top_levels(records, Factor::Region, 10) ==
          std::vector<std::string>{"North America", "Scandinavia"});

    std::vector<SongRecord> eras;
    eras.push_back(rec("a", {}, "1960's", {}, {}));
    eras.push_back(rec("b", {}, std::nullopt, {}, 1973));  // resolves to 1970's
    eras.push_back(rec("c", {}, std::nullopt, {}, 1873));  // resolves to nothing
    CHECK(top_levels(eras, Factor::Era, 10) == std::vector<std::string>{"1960's", "1970's"});

    SECTION("an explicit allowlist overrides the default") {
        CHECK(top_levels(records, Factor::Region, 10,
                         std::vector<std::string>{"Narnia", "North America"}) ==
              std::vector<std::string>{"North America", "Narnia"});
    }
}

TEST_CASE("fetch_metadata against a local provider") {
    StubServer server;
    std::atomic<int> flaky_hits{0};
    std::atomic<int> down_hits{0};

    server.svr.Get("/ok", [](const httplib::Request& req, httplib::Response& res) {
        // the lookup parameters must arrive as query params
        REQUIRE(req.get_param_value("title") == "Hallelujah");
        REQUIRE(req.get_param_value("artist") == "Leonard Cohen");
        res.set_content(
            R"({"genre":"Folk","era":null,"region":"Oceania","album_year":1973})",
            "application/json");
    });
    server.svr.Get("/missing", [](const httplib::Request&, httplib::Response& res) {
        res.status = 404;
    });
    server.svr.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (flaky_hits.fetch_add(1) == 0)
            res.status = 500;
        else
            res.set_content(R"({"genre":"Pop","era":"1980's"})", "application/json");
    });
    server.svr.Get("/down", [&](const httplib::Request&, httplib::Response& res) {
        down_hits.fetch_add(1);
        res.status = 503;
    });
    server.svr.Get("/bad", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("certainly not json", "application/json");
    });
    server.start();

    SECTION("200 with nullable fields") {
        auto r = fetch_metadata(server.endpoint("/ok"), "Hallelujah", "Leonard Cohen",
                                fast_opts(0));
        REQUIRE(r.has_value());
        CHECK(r->genre == "Folk");
        CHECK_FALSE(r->era.has_value());
        CHECK(r->region == "Australia/Oceania");  // normalized on receipt
        CHECK(r->album_year == 1973);
    }

    SECTION("404 means no record") {
        auto r = fetch_metadata(server.endpoint("/missing"), "t", "a", fast_opts(0));
        CHECK_FALSE(r.has_value());
    }

    SECTION("one 500 then success") {
        auto r = fetch_metadata(server.endpoint("/flaky"), "t", "a", fast_opts(3));
        REQUIRE(r.has_value());
        CHECK(r->genre == "Pop");
        CHECK(r->era == "1980's");
        CHECK(flaky_hits.load() == 2);
    }

    SECTION("persistent 5xx exhausts the retry budget") {
        try {
            fetch_metadata(server.endpoint("/down"), "t", "a", fast_opts(2));
            FAIL("expected MetadataError");
        } catch (const MetadataError& e) {
            CHECK(e.kind() == MetadataErrorKind::NetworkError);
        }
        CHECK(down_hits.load() == 3);  // initial try + 2 retries
    }

    SECTION("unparseable body") {
        try {
            fetch_metadata(server.endpoint("/bad"), "t", "a", fast_opts(0));
            FAIL("expected MetadataError");
        } catch (const MetadataError& e) {
            CHECK(e.kind() == MetadataErrorKind::MalformedResponse);
        }
    }
}

TEST_CASE("fetch_metadata surfaces transport failure as NetworkError") {
    // nothing listens here; connection is refused immediately
    try {
        fetch_metadata("http://127.0.0.1:1/meta", "t", "a", fast_opts(1));
        FAIL("expected MetadataError");
    } catch (const MetadataError& e) {
        CHECK(e.kind() == MetadataErrorKind::NetworkError);
    }
}
