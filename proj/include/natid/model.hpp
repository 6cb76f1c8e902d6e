#ifndef NATID_MODEL_HPP
#define NATID_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace natid::model {

// Stance of a user towards the independence movement of their territory:
// pro-independence or anti-independence.
enum class Stance { PI, AI };

const char* stance_name(Stance s);
std::optional<Stance> parse_stance(const std::string& s);

enum class TerritoryKind { Catalonia, BasqueCountry, Scotland, Custom };

// A territory with an active independence movement. The TLDs and language
// codes drive the URL and profile-language features; language codes are
// lowercase (ui_language values are matched case-insensitively against them).
struct Territory {
    TerritoryKind kind = TerritoryKind::Custom;
    std::string name;
    std::string local_tld;   // TLD of the aspirant nation, e.g. ".cat"
    std::string state_tld;   // TLD of the recognised state, e.g. ".es"
    std::vector<std::string> local_languages;
    std::vector<std::string> state_languages;

    bool operator==(const Territory&) const = default;
};

Territory catalonia();
Territory basque_country();
Territory scotland();
// Builtin territory by kind; throws InputError for Custom.
Territory builtin_territory(TerritoryKind kind);

struct Tweet {
    std::string tweet_id;
    std::string author_id;
    std::string text;
    std::int64_t created_at = 0;  // UTC epoch seconds
    std::optional<std::string> retweet_of;  // user retweeted
    std::optional<std::string> reply_to;    // user replied to
    std::vector<std::string> mentions;      // user ids mentioned
    std::vector<std::string> urls;
    std::int64_t retweet_count = 0;
    std::int64_t favourite_count = 0;

    bool operator==(const Tweet&) const = default;
};

// One account: profile metadata, timeline, favourites and follow lists.
// Follow lists may reference users outside the dataset; they are kept in
// canonical form (sorted, deduplicated) so datasets compare field-by-field.
struct UserRecord {
    std::string user_id;
    std::string location;
    std::int64_t created_at = 0;
    std::int64_t followers_count = 0;
    std::int64_t followees_count = 0;
    std::int64_t listed_count = 0;
    bool verified = false;
    bool geo_enabled = false;
    std::optional<std::string> profile_url;
    std::string ui_language;
    std::vector<Tweet> timeline;    // most recent first, at most 500
    std::vector<Tweet> favourites;  // at most 500
    std::vector<std::string> followees;
    std::vector<std::string> followers;
    std::optional<Stance> label;

    bool operator==(const UserRecord&) const = default;
};

// Sorts and deduplicates the follow lists.
void canonicalize(UserRecord& user);

struct Dataset {
    Territory territory;
    std::map<std::string, UserRecord> users;  // keyed by user_id
    // Timestamp all account ages are measured against, so tweet-rate and
    // account-age features stay reproducible after the fact.
    std::int64_t reference_time = 0;

    bool operator==(const Dataset&) const = default;
};

inline constexpr std::size_t kMaxTimelineLength = 500;

// Checks every dataset-level invariant and returns one human-readable entry
// per violation (empty means valid). Violations are data, not errors.
std::vector<std::string> validate_dataset(const Dataset& dataset);

}  // namespace natid::model

#endif
