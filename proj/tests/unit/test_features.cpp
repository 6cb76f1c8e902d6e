#include <array>
#include <filesystem>

#include "doctest.h"
#include "natid/features.hpp"
#include "natid/model.hpp"
#include "natid/textfeat.hpp"
#include "natid/util.hpp"

using namespace natid;
using namespace natid::features;
using model::Stance;
namespace fs = std::filesystem;

namespace {

// Two synthetic "languages" with disjoint syllables so identification is
// unambiguous in tests.
std::vector<textfeat::LanguageProfile> test_profiles() {
    const std::vector<std::string> ca = {
        "katuri moza lenbi orka", "moza katuri orka lenbi",
        "lenbi lenbi katuri moza", "orka moza katuri lenbi"};
    const std::vector<std::string> es = {
        "espa dote vice sonte", "dote espa sonte vice",
        "vice sonte espa dote", "sonte dote espa vice"};
    return {textfeat::build_language_profile(ca, "ca"),
            textfeat::build_language_profile(es, "es")};
}

textfeat::SentimentLexicon test_lexicon() {
    textfeat::SentimentLexicon lex;
    lex.polarity = {{"upbeat", 1.0}, {"awful", -1.0}};
    return lex;
}

model::Tweet tweet(const std::string& id, const std::string& author,
                   const std::string& text) {
    model::Tweet t;
    t.tweet_id = id;
    t.author_id = author;
    t.text = text;
    return t;
}

// pi1 exercises every behavioral feature; pi2/ai1 are mostly blank.
model::Dataset handcrafted() {
    model::Dataset ds;
    ds.territory = model::builtin_territory(model::TerritoryKind::Catalonia);
    const std::int64_t day = 86400;
    ds.reference_time = 1000 * day;

    model::UserRecord pi1;
    pi1.user_id = "pi1";
    pi1.label = Stance::PI;
    pi1.created_at = ds.reference_time - 100 * day;
    pi1.followers_count = 10;
    pi1.followees_count = 4;
    pi1.listed_count = 2;
    pi1.verified = true;
    pi1.geo_enabled = false;
    pi1.profile_url = "http://x.cat/";
    pi1.ui_language = "ca";
    {
        auto t1 = tweet("t1", "pi1", "katuri moza lenbi orka katuri");
        t1.urls = {"http://a.cat/x", "http://b.es/y", "http://c.com/z"};
        t1.retweet_count = 3;
        t1.favourite_count = 1;
        auto t2 = tweet("t2", "pi1", "espa dote vice sonte awful");
        t2.reply_to = "ai1";
        auto t3 = tweet("t3", "pi1", "espa dote vice sonte upbeat");
        t3.mentions = {"pi2"};
        auto t4 = tweet("t4", "pi1", "dote espa sonte vice espa");
        t4.retweet_of = "pi2";
        pi1.timeline = {t1, t2, t3, t4};
    }
    pi1.favourites = {tweet("f1", "ai1", "espa dote vice sonte"),
                      tweet("f2", "ai1", "dote espa sonte vice"),
                      tweet("f3", "pi2", "katuri moza lenbi orka")};
    pi1.followees = {"ai1", "pi2"};
    pi1.followers = {"pi2"};

    model::UserRecord pi2;
    pi2.user_id = "pi2";
    pi2.label = Stance::PI;
    pi2.created_at = ds.reference_time - 200 * day;
    pi2.ui_language = "es";
    pi2.followees = {"pi1"};
    pi2.followers = {"pi1"};

    model::UserRecord ai1;
    ai1.user_id = "ai1";
    ai1.label = Stance::AI;
    ai1.created_at = ds.reference_time - 50 * day;
    ai1.followers = {"pi1"};

    ds.users.emplace("pi1", std::move(pi1));
    ds.users.emplace("pi2", std::move(pi2));
    ds.users.emplace("ai1", std::move(ai1));
    return ds;
}

}  // namespace

TEST_CASE("behavioral features compute the documented 30 quantities") {
    const auto ds = handcrafted();
    const auto profiles = test_profiles();
    const auto lexicon = test_lexicon();
    BehavioralConfig cfg;
    cfg.profiles = &profiles;
    cfg.lexicon = &lexicon;
    std::array<std::int64_t, kBehavioralFeatureCount> missing{};
    const auto m = behavioral_features(ds, cfg, &missing);

    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 30);
    REQUIRE(m.row_ids == std::vector<std::string>{"ai1", "pi1", "pi2"});
    CHECK_FALSE(m.sparse);

    const std::size_t r = 1;  // pi1
    const std::array<double, 30> expected = {
        4, 3, 0.04, 100,          // tweets, favourites given, rate, age
        3, 1,                     // retweets/favourites received
        1, 1,                     // tweet URL TLD counts
        10, 4, 1, 0,              // followers, followees, verified, geo
        1, 0,                     // profile URL TLDs
        1, 0,                     // UI language
        0, 1,                     // replies within/across
        1, 2,                     // favouriting within/across
        1, 0,                     // mentions within/across
        1, 0,                     // retweets within/across
        2,                        // listed
        1, 1,                     // follows within/across
        1,                        // tweets in local language
        1, 1};                    // positive-within, negative-across
    for (std::size_t j = 0; j < 30; ++j) {
        CAPTURE(j);
        CAPTURE(kBehavioralFeatureNames[j]);
        CHECK(m.at(r, j) == doctest::Approx(expected[j]).epsilon(1e-12));
    }

    // ai1 has an empty ui_language: both UI-language features count a miss
    CHECK(missing[14] == 1);
    CHECK(missing[15] == 1);
    CHECK(m.at(0, 14) == 0.0);
}

TEST_CASE("behavioral features without profiles or lexicon zero-fill and count misses") {
    const auto ds = handcrafted();
    std::array<std::int64_t, kBehavioralFeatureCount> missing{};
    const auto m = behavioral_features(ds, {}, &missing);
    CHECK(m.at(1, 27) == 0.0);
    CHECK(m.at(1, 28) == 0.0);
    CHECK(m.at(1, 29) == 0.0);
    CHECK(missing[27] == 3);
    CHECK(missing[28] == 3);
    CHECK(missing[29] == 3);
}

TEST_CASE("interaction features count per-target and honor kind filters") {
    const auto ds = handcrafted();
    const auto m = interaction_features(ds, 0.5);
    REQUIRE(m.sparse);
    REQUIRE(m.columns == std::vector<std::string>{"ai1", "pi2"});
    REQUIRE(m.row_ids == std::vector<std::string>{"ai1", "pi1", "pi2"});
    CHECK(m.at(1, 0) == 3.0);  // reply + 2 favourites of ai1
    CHECK(m.at(1, 1) == 3.0);  // mention + retweet + favourite of pi2
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(2, 1) == 0.0);

    graph::InteractionKinds no_favs;
    no_favs.favourites = false;
    const auto m2 = interaction_features(ds, 0.5, no_favs);
    bool has_ai1 = false;
    for (std::size_t j = 0; j < m2.columns.size(); ++j)
        if (m2.columns[j] == "ai1") {
            has_ai1 = true;
            CHECK(m2.at(1, j) == 1.0);
        }
    CHECK(has_ai1);
}

TEST_CASE("network features are a binary union of both follow directions") {
    const auto ds = handcrafted();
    const auto m = network_features(ds, 0.3);
    REQUIRE(m.columns == std::vector<std::string>{"ai1", "pi1", "pi2"});
    // rows: ai1, pi1, pi2
    CHECK(m.at(0, 1) == 1.0);  // ai1 is followed by pi1
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(1, 2) == 1.0);
    CHECK(m.at(1, 1) == 0.0);  // no self edge
    CHECK(m.at(2, 1) == 1.0);
    CHECK(m.at(2, 0) == 0.0);
}

TEST_CASE("favourite features equal timeline features on mirrored content") {
    auto ds = handcrafted();
    for (auto& [id, u] : ds.users) u.favourites = u.timeline;
    textfeat::EmbeddingTable table;
    table.dimension = 2;
    table.vectors["katuri"] = {1.0, 0.0};
    table.vectors["espa"] = {0.0, 1.0};
    table.vectors["moza"] = {0.5, 0.5};
    const auto tl = timeline_features(ds, table);
    const auto fv = favourite_features(ds, table);
    CHECK(tl.family == Family::Timeline);
    CHECK(fv.family == Family::Favourites);
    CHECK(tl.dense == fv.dense);
    CHECK(tl.columns == fv.columns);
}

TEST_CASE("feature matrices save and load exactly, sparse and dense") {
    const auto ds = handcrafted();
    const auto profiles = test_profiles();
    BehavioralConfig cfg;
    cfg.profiles = &profiles;
    const auto dense = behavioral_features(ds, cfg);
    const auto sparse = interaction_features(ds, 0.5);

    for (const auto* m : {&dense, &sparse}) {
        const auto path = fs::temp_directory_path() /
                          (m->sparse ? "natid_feat_sparse.csv"
                                     : "natid_feat_dense.csv");
        save_feature_matrix(*m, path);
        const auto loaded = load_feature_matrix(path);
        CHECK(loaded.family == m->family);
        CHECK(loaded.sparse == m->sparse);
        CHECK(loaded.columns == m->columns);
        CHECK(loaded.row_ids == m->row_ids);
        CHECK(loaded.labels == m->labels);
        for (std::size_t r = 0; r < m->rows(); ++r)
            for (std::size_t c = 0; c < m->cols(); ++c)
                CHECK(loaded.at(r, c) == m->at(r, c));
        fs::remove(path);
        fs::remove(path.string() + ".meta.json");
    }
}

TEST_CASE("select_rows keeps labels aligned") {
    const auto ds = handcrafted();
    const auto m = behavioral_features(ds);
    const auto sel = select_rows(m, {2, 0});
    REQUIRE(sel.rows() == 2);
    CHECK(sel.row_ids == std::vector<std::string>{"pi2", "ai1"});
    CHECK(sel.labels ==
          std::vector<Stance>{Stance::PI, Stance::AI});
    for (std::size_t c = 0; c < m.cols(); ++c) {
        CHECK(sel.at(0, c) == m.at(2, c));
        CHECK(sel.at(1, c) == m.at(0, c));
    }
}

TEST_CASE("group comparison needs both classes and two rows per class") {
    auto ds = handcrafted();
    CHECK_THROWS_AS(group_comparison_report(behavioral_features(ds)),
                    InputError);  // only one AI user

    model::UserRecord ai2;
    ai2.user_id = "ai2";
    ai2.label = Stance::AI;
    ai2.created_at = ds.reference_time - 61 * 86400;
    ds.users.emplace("ai2", std::move(ai2));
    const auto rows = group_comparison_report(behavioral_features(ds));
    REQUIRE(rows.size() == 30);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        CHECK(rows[j].feature_id == static_cast<int>(j) + 1);
        CHECK(rows[j].name == kBehavioralFeatureNames[j]);
    }
    // feature 4 (account age): PI means (100+200)/2, AI (50+61)/2
    CHECK(rows[3].pi_mean == doctest::Approx(150.0));
    CHECK(rows[3].ai_mean == doctest::Approx(55.5));
    CHECK(rows[3].test.direction == stats::Direction::GroupA);
}

TEST_CASE("significance stars") {
    CHECK(significance_stars(0.005) == "**");
    CHECK(significance_stars(0.03) == "*");
    CHECK(significance_stars(0.2) == "");
}
