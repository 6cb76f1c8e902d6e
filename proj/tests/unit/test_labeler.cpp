#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "natid/labeler.hpp"
#include "natid/model.hpp"
#include "natid/util.hpp"

using namespace natid;
using nlohmann::json;

namespace {

model::Territory territory_by_name(const std::string& name) {
    if (name == "catalonia")
        return model::builtin_territory(model::TerritoryKind::Catalonia);
    if (name == "basque_country")
        return model::builtin_territory(model::TerritoryKind::BasqueCountry);
    if (name == "scotland")
        return model::builtin_territory(model::TerritoryKind::Scotland);
    throw InputError("fixture territory " + name);
}

bool same_rule(const labeler::MatchRule& a, const labeler::MatchRule& b) {
    return a.required_terms == b.required_terms &&
           a.forbidden_terms == b.forbidden_terms &&
           a.max_location_tokens == b.max_location_tokens;
}

bool same_rules(const std::vector<labeler::MatchRule>& a,
                const std::vector<labeler::MatchRule>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_rule(a[i], b[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("fixture strings label exactly as annotated") {
    std::ifstream in(NATID_SOURCE_DIR "/tests/fixtures/labeler_fixture.json");
    REQUIRE(in.good());
    json fixture;
    in >> fixture;
    REQUIRE(fixture.size() == 30);

    int index = 0;
    for (const auto& entry : fixture) {
        CAPTURE(index);
        const auto territory =
            territory_by_name(entry.at("territory").get<std::string>());
        const auto rules = labeler::builtin_rules(territory);

        model::Dataset ds;
        ds.territory = territory;
        model::UserRecord u;
        u.user_id = "u1";
        u.location = entry.at("location").get<std::string>();
        int tweet_no = 0;
        for (const auto& text : entry.at("timeline")) {
            model::Tweet t;
            t.tweet_id = "t" + std::to_string(tweet_no++);
            t.author_id = u.user_id;
            t.text = text.get<std::string>();
            u.timeline.push_back(std::move(t));
        }
        ds.users.emplace(u.user_id, std::move(u));

        labeler::label_dataset(ds, rules);
        const auto& labeled = ds.users.at("u1");
        const std::string expected = entry.at("expected").get<std::string>();
        const std::string got =
            labeled.label ? model::stance_name(*labeled.label) : "";
        CAPTURE(entry.at("location").get<std::string>());
        CHECK(got == expected);
        ++index;
    }
}

TEST_CASE("labeling is idempotent and never overwrites") {
    const auto territory =
        model::builtin_territory(model::TerritoryKind::Catalonia);
    const auto rules = labeler::builtin_rules(territory);
    model::Dataset ds;
    ds.territory = territory;
    model::UserRecord a;
    a.user_id = "a";
    a.location = "Barcelona, Espanya";
    a.label = model::Stance::PI;  // manual label contradicting the location
    model::UserRecord b;
    b.user_id = "b";
    b.location = "PPCC";
    ds.users.emplace("a", std::move(a));
    ds.users.emplace("b", std::move(b));

    const auto first = labeler::label_dataset(ds, rules);
    CHECK(ds.users.at("a").label == model::Stance::PI);
    CHECK(ds.users.at("b").label == model::Stance::PI);
    const auto second = labeler::label_dataset(ds, rules);
    CHECK(first.pi == second.pi);
    CHECK(first.ai == second.ai);
    CHECK(first.unlabeled == second.unlabeled);
}

TEST_CASE("rule files under data/rules match the built-in rules") {
    for (const auto kind :
         {model::TerritoryKind::Catalonia, model::TerritoryKind::BasqueCountry,
          model::TerritoryKind::Scotland}) {
        const auto territory = model::builtin_territory(kind);
        const std::string file =
            kind == model::TerritoryKind::Catalonia      ? "catalonia.json"
            : kind == model::TerritoryKind::BasqueCountry ? "basque_country.json"
                                                          : "scotland.json";
        const auto loaded = labeler::load_rules(
            std::string(NATID_SOURCE_DIR "/data/rules/") + file, territory);
        const auto builtin = labeler::builtin_rules(territory);
        CAPTURE(file);
        CHECK(same_rules(loaded.pi_location_patterns,
                         builtin.pi_location_patterns));
        CHECK(same_rules(loaded.ai_location_patterns,
                         builtin.ai_location_patterns));
        CHECK(loaded.yes_hashtags == builtin.yes_hashtags);
        CHECK(loaded.no_hashtags == builtin.no_hashtags);
    }
}

TEST_CASE("missing rule file reports its path") {
    const auto territory =
        model::builtin_territory(model::TerritoryKind::Catalonia);
    try {
        labeler::load_rules("/nonexistent/rules.json", territory);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/rules.json") !=
              std::string::npos);
    }
}

TEST_CASE("normalize_location folds case, space and edge punctuation") {
    CHECK(labeler::normalize_location("  Barcelona,   Espanya!  ") ==
          "barcelona, espanya");
    CHECK(labeler::normalize_location("¡ESPAÑA!") == "españa");
    CHECK(labeler::normalize_location("...") == "");
    CHECK(labeler::normalize_location("") == "");
}

TEST_CASE("hashtag vote requires a strict majority") {
    const auto rules = labeler::builtin_rules(
        model::builtin_territory(model::TerritoryKind::Scotland));
    auto timeline = [](std::vector<std::string> texts) {
        std::vector<model::Tweet> tl;
        int i = 0;
        for (auto& s : texts) {
            model::Tweet t;
            t.tweet_id = "t" + std::to_string(i++);
            t.author_id = "u";
            t.text = std::move(s);
            tl.push_back(std::move(t));
        }
        return tl;
    };
    CHECK(labeler::label_by_hashtags(timeline({"#VoteYes #VoteYes #VoteNo"}),
                                     rules) == model::Stance::PI);
    CHECK(labeler::label_by_hashtags(timeline({"#VoteYes #VoteNo"}), rules) ==
          std::nullopt);
    CHECK(labeler::label_by_hashtags(timeline({"no tags at all"}), rules) ==
          std::nullopt);
    const auto no_tag_rules = labeler::builtin_rules(
        model::builtin_territory(model::TerritoryKind::Catalonia));
    CHECK_THROWS_AS(labeler::label_by_hashtags(timeline({"x"}), no_tag_rules),
                    InputError);
}
