#include "doctest.h"
#include "natid/model.hpp"
#include "natid/util.hpp"

using namespace natid;

TEST_CASE("builtin territories carry the right TLDs and languages") {
    const auto cat = model::builtin_territory(model::TerritoryKind::Catalonia);
    CHECK(cat.local_tld == ".cat");
    CHECK(cat.state_tld == ".es");
    CHECK(cat.local_languages == std::vector<std::string>{"ca"});

    const auto eus =
        model::builtin_territory(model::TerritoryKind::BasqueCountry);
    CHECK(eus.local_tld == ".eus");
    CHECK(eus.state_tld == ".es");
    CHECK(eus.local_languages == std::vector<std::string>{"eu"});

    const auto sco = model::builtin_territory(model::TerritoryKind::Scotland);
    CHECK(sco.local_tld == ".scot");
    CHECK(sco.state_tld == ".uk");
}

TEST_CASE("stance names round-trip") {
    CHECK(model::stance_name(model::Stance::PI) == std::string("PI"));
    CHECK(model::stance_name(model::Stance::AI) == std::string("AI"));
    CHECK(model::parse_stance("PI") == model::Stance::PI);
    CHECK(model::parse_stance("AI") == model::Stance::AI);
    CHECK(model::parse_stance("XX") == std::nullopt);
}

TEST_CASE("canonicalize sorts and dedups follow lists") {
    model::UserRecord u;
    u.user_id = "u";
    u.followees = {"c", "a", "b", "a"};
    u.followers = {"z", "z", "y"};
    model::canonicalize(u);
    CHECK(u.followees == std::vector<std::string>{"a", "b", "c"});
    CHECK(u.followers == std::vector<std::string>{"y", "z"});
}

TEST_CASE("validate_dataset flags foreign tweets and oversized timelines") {
    model::Dataset ds;
    ds.territory = model::builtin_territory(model::TerritoryKind::Catalonia);
    model::UserRecord u;
    u.user_id = "u";
    model::Tweet t;
    t.tweet_id = "t1";
    t.author_id = "someone_else";
    u.timeline.push_back(t);
    ds.users.emplace("u", std::move(u));
    const auto problems = model::validate_dataset(ds);
    CHECK_FALSE(problems.empty());
}
