#include "natid/model.hpp"

#include <algorithm>

#include "natid/util.hpp"

namespace natid::model {

const char* stance_name(Stance s) { return s == Stance::PI ? "PI" : "AI"; }

std::optional<Stance> parse_stance(const std::string& s) {
    if (s == "PI") return Stance::PI;
    if (s == "AI") return Stance::AI;
    return std::nullopt;
}

Territory catalonia() {
    return {TerritoryKind::Catalonia, "Catalonia", ".cat", ".es", {"ca"}, {"es"}};
}

Territory basque_country() {
    return {TerritoryKind::BasqueCountry, "Basque Country", ".eus", ".es",
            {"eu"}, {"es"}};
}

Territory scotland() {
    // Twitter offers no Scottish Gaelic or Scots UI, so the profile-language
    // split is en ("independent") vs en-gb ("state"). The language codes used
    // for the tweet-language feature are configured separately in features.
    return {TerritoryKind::Scotland, "Scotland", ".scot", ".uk", {"en"},
            {"en-gb"}};
}

Territory builtin_territory(TerritoryKind kind) {
    switch (kind) {
        case TerritoryKind::Catalonia: return catalonia();
        case TerritoryKind::BasqueCountry: return basque_country();
        case TerritoryKind::Scotland: return scotland();
        case TerritoryKind::Custom: break;
    }
    throw InputError("no builtin territory for kind Custom");
}

void canonicalize(UserRecord& user) {
    auto canon = [](std::vector<std::string>& ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    };
    canon(user.followees);
    canon(user.followers);
}

namespace {

void validate_territory(const Territory& t, std::vector<std::string>& out) {
    auto add = [&](const std::string& msg) { out.push_back("territory: " + msg); };
    if (t.local_tld.empty() || t.local_tld[0] != '.')
        add("local_tld must begin with '.'");
    if (t.state_tld.empty() || t.state_tld[0] != '.')
        add("state_tld must begin with '.'");
    if (t.local_tld == t.state_tld) add("local_tld equals state_tld");
    if (t.local_languages.empty()) add("local_languages empty");
    if (t.state_languages.empty()) add("state_languages empty");
    for (const auto& l : t.local_languages)
        for (const auto& s : t.state_languages)
            if (l == s) add("language lists share code '" + l + "'");
}

void validate_tweet(const std::string& owner, const char* where, const Tweet& t,
                    std::vector<std::string>& out) {
    auto add = [&](const std::string& msg) {
        out.push_back("user " + owner + ": " + where + " tweet " + t.tweet_id +
                      ": " + msg);
    };
    if (t.author_id.empty()) add("author_id empty");
    if (t.retweet_count < 0) add("retweet_count negative");
    if (t.favourite_count < 0) add("favourite_count negative");
}

}  // namespace

std::vector<std::string> validate_dataset(const Dataset& dataset) {
    std::vector<std::string> out;
    validate_territory(dataset.territory, out);
    for (const auto& [id, user] : dataset.users) {
        auto add = [&](const std::string& field, const std::string& msg) {
            out.push_back("user " + id + ": " + field + ": " + msg);
        };
        if (user.user_id.empty()) add("user_id", "empty");
        if (user.user_id != id) add("user_id", "does not match map key");
        if (user.followers_count < 0) add("followers_count", "negative");
        if (user.followees_count < 0) add("followees_count", "negative");
        if (user.listed_count < 0) add("listed_count", "negative");
        if (user.timeline.size() > kMaxTimelineLength)
            add("timeline", "holds " + std::to_string(user.timeline.size()) +
                                " tweets, cap is 500");
        if (user.favourites.size() > kMaxTimelineLength)
            add("favourites", "holds " + std::to_string(user.favourites.size()) +
                                  " tweets, cap is 500");
        for (const auto& t : user.timeline) {
            validate_tweet(id, "timeline", t, out);
            if (!t.author_id.empty() && t.author_id != id)
                out.push_back("user " + id + ": timeline tweet " + t.tweet_id +
                              ": author_id '" + t.author_id +
                              "' differs from owner");
        }
        for (const auto& t : user.favourites)
            validate_tweet(id, "favourites", t, out);
    }
    return out;
}

}  // namespace natid::model
