#include "natid/ingest.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <utility>

#include "json.hpp"
#include "natid/util.hpp"

namespace natid::ingest {

using nlohmann::json;

namespace {

std::string kind_name(model::TerritoryKind kind) {
    switch (kind) {
        case model::TerritoryKind::Catalonia: return "catalonia";
        case model::TerritoryKind::BasqueCountry: return "basque_country";
        case model::TerritoryKind::Scotland: return "scotland";
        case model::TerritoryKind::Custom: return "custom";
    }
    throw InputError("unknown territory kind");
}

model::TerritoryKind parse_kind(const std::string& s) {
    if (s == "catalonia") return model::TerritoryKind::Catalonia;
    if (s == "basque_country") return model::TerritoryKind::BasqueCountry;
    if (s == "scotland") return model::TerritoryKind::Scotland;
    if (s == "custom") return model::TerritoryKind::Custom;
    throw InputError("unknown territory kind '" + s + "'");
}

json territory_to_json(const model::Territory& t) {
    json j;
    j["kind"] = kind_name(t.kind);
    j["name"] = t.name;
    j["local_tld"] = t.local_tld;
    j["state_tld"] = t.state_tld;
    j["local_languages"] = t.local_languages;
    j["state_languages"] = t.state_languages;
    return j;
}

model::Territory territory_from_json(const json& j) {
    model::Territory t;
    t.kind = parse_kind(j.at("kind").get<std::string>());
    t.name = j.at("name").get<std::string>();
    t.local_tld = j.at("local_tld").get<std::string>();
    t.state_tld = j.at("state_tld").get<std::string>();
    t.local_languages = j.at("local_languages").get<std::vector<std::string>>();
    t.state_languages = j.at("state_languages").get<std::vector<std::string>>();
    return t;
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing key '") + key + "'");
    return *it;
}

std::string opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return "";
    return it->get<std::string>();
}

std::optional<std::string> opt_nullable(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

std::vector<std::string> opt_list(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->get<std::vector<std::string>>();
}

json tweet_to_json(const model::Tweet& t, const char* author_key) {
    json j;
    j["tweet_id"] = t.tweet_id;
    j[author_key] = t.author_id;
    j["text"] = t.text;
    j["created_at"] = t.created_at;
    if (t.retweet_of) j["retweet_of"] = *t.retweet_of;
    if (t.reply_to) j["reply_to"] = *t.reply_to;
    if (!t.mentions.empty()) j["mentions"] = t.mentions;
    if (!t.urls.empty()) j["urls"] = t.urls;
    j["retweet_count"] = t.retweet_count;
    j["favourite_count"] = t.favourite_count;
    return j;
}

model::Tweet tweet_from_json(const json& j, const char* author_key) {
    model::Tweet t;
    t.tweet_id = require(j, "tweet_id").get<std::string>();
    t.author_id = require(j, author_key).get<std::string>();
    t.text = opt_string(j, "text");
    t.created_at = require(j, "created_at").get<std::int64_t>();
    t.retweet_of = opt_nullable(j, "retweet_of");
    t.reply_to = opt_nullable(j, "reply_to");
    t.mentions = opt_list(j, "mentions");
    t.urls = opt_list(j, "urls");
    t.retweet_count = require(j, "retweet_count").get<std::int64_t>();
    t.favourite_count = require(j, "favourite_count").get<std::int64_t>();
    return t;
}

json user_to_json(const model::UserRecord& u) {
    json j;
    j["user_id"] = u.user_id;
    j["location"] = u.location;
    j["created_at"] = u.created_at;
    j["followers_count"] = u.followers_count;
    j["followees_count"] = u.followees_count;
    j["listed_count"] = u.listed_count;
    j["verified"] = u.verified;
    j["geo_enabled"] = u.geo_enabled;
    if (u.profile_url) j["profile_url"] = *u.profile_url;
    j["ui_language"] = u.ui_language;
    if (u.label) j["label"] = model::stance_name(*u.label);
    return j;
}

model::UserRecord user_from_json(const json& j) {
    model::UserRecord u;
    u.user_id = require(j, "user_id").get<std::string>();
    u.location = opt_string(j, "location");
    u.created_at = require(j, "created_at").get<std::int64_t>();
    u.followers_count = require(j, "followers_count").get<std::int64_t>();
    u.followees_count = require(j, "followees_count").get<std::int64_t>();
    u.listed_count = require(j, "listed_count").get<std::int64_t>();
    u.verified = require(j, "verified").get<bool>();
    u.geo_enabled = require(j, "geo_enabled").get<bool>();
    u.profile_url = opt_nullable(j, "profile_url");
    u.ui_language = opt_string(j, "ui_language");
    if (auto lab = opt_nullable(j, "label"))
        u.label = model::parse_stance(*lab);
    return u;
}

// Runs fn once per non-empty line, rewriting any exception into an
// InputError that names the file and 1-based line number.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(const json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            fn(json::parse(line));
        } catch (const std::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": " + e.what());
        }
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

}  // namespace

LoadResult load_dataset(const Manifest& manifest) {
    LoadResult result;
    result.dataset.territory = manifest.territory;
    result.dataset.reference_time = manifest.reference_time;
    auto& users = result.dataset.users;
    auto& stats = result.stats;

    for_each_line(manifest.users_path, [&](const json& j) {
        model::UserRecord u = user_from_json(j);
        auto [it, inserted] = users.insert_or_assign(u.user_id, std::move(u));
        (void)it;
        if (!inserted) ++stats.duplicate_users;
    });

    for_each_line(manifest.tweets_path, [&](const json& j) {
        model::Tweet t = tweet_from_json(j, "author_id");
        auto it = users.find(t.author_id);
        if (it == users.end()) {
            ++stats.dropped_tweets;
            return;
        }
        it->second.timeline.push_back(std::move(t));
    });

    for_each_line(manifest.favourites_path, [&](const json& j) {
        // favourited_by is the owning user; author_id is who wrote the tweet.
        model::Tweet t = tweet_from_json(j, "author_id");
        std::string owner = require(j, "favourited_by").get<std::string>();
        auto it = users.find(owner);
        if (it == users.end()) {
            ++stats.dropped_favourites;
            return;
        }
        it->second.favourites.push_back(std::move(t));
    });

    for_each_line(manifest.edges_path, [&](const json& j) {
        std::string kind = opt_string(j, "kind");
        if (!kind.empty() && kind != "follows")
            throw InputError("unknown edge kind '" + kind + "'");
        std::string src = require(j, "src").get<std::string>();
        std::string dst = require(j, "dst").get<std::string>();
        auto src_it = users.find(src);
        auto dst_it = users.find(dst);
        if (src_it == users.end() && dst_it == users.end()) {
            ++stats.dropped_edges;
            return;
        }
        if (src_it != users.end()) src_it->second.followees.push_back(dst);
        if (dst_it != users.end()) dst_it->second.followers.push_back(src);
    });

    for (auto& [id, user] : users) model::canonicalize(user);
    return result;
}

Manifest save_dataset(const model::Dataset& dataset,
                      const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw InputError("cannot create " + directory.string());

    Manifest m;
    m.territory = dataset.territory;
    m.reference_time = dataset.reference_time;
    m.users_path = directory / "users.jsonl";
    m.tweets_path = directory / "tweets.jsonl";
    m.favourites_path = directory / "favourites.jsonl";
    m.edges_path = directory / "edges.jsonl";

    auto users_out = open_out(m.users_path);
    auto tweets_out = open_out(m.tweets_path);
    auto favs_out = open_out(m.favourites_path);
    auto edges_out = open_out(m.edges_path);

    // Edges deduplicated and sorted so output is a function of the dataset
    // alone. Both follow lists feed the same set; for in-dataset pairs the
    // two views describe the same edge.
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [id, user] : dataset.users) {
        users_out << user_to_json(user).dump() << '\n';
        for (const auto& t : user.timeline)
            tweets_out << tweet_to_json(t, "author_id").dump() << '\n';
        for (const auto& t : user.favourites) {
            json j = tweet_to_json(t, "author_id");
            j["favourited_by"] = id;
            favs_out << j.dump() << '\n';
        }
        for (const auto& v : user.followees) edges.emplace(id, v);
        for (const auto& v : user.followers) edges.emplace(v, id);
    }
    for (const auto& [src, dst] : edges) {
        json j;
        j["src"] = src;
        j["dst"] = dst;
        j["kind"] = "follows";
        edges_out << j.dump() << '\n';
    }

    write_manifest(m, directory / "manifest.json");
    return m;
}

Manifest read_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw InputError("cannot open " + manifest_path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(manifest_path.string() + ": " + e.what());
    }
    Manifest m;
    try {
        m.territory = territory_from_json(j.at("territory"));
        auto dir = manifest_path.parent_path();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : dir / fp;
        };
        m.users_path = resolve(j.at("users").get<std::string>());
        m.tweets_path = resolve(j.at("tweets").get<std::string>());
        m.favourites_path = resolve(j.at("favourites").get<std::string>());
        m.edges_path = resolve(j.at("edges").get<std::string>());
        m.reference_time = j.value("reference_time", std::int64_t{0});
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(manifest_path.string() + ": " + e.what());
    }
    std::set<std::filesystem::path> distinct{m.users_path, m.tweets_path,
                                             m.favourites_path, m.edges_path};
    if (distinct.size() != 4)
        throw InputError(manifest_path.string() + ": data paths must be distinct");
    return m;
}

void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& manifest_path) {
    json j;
    j["territory"] = territory_to_json(manifest.territory);
    j["users"] = manifest.users_path.filename().string();
    j["tweets"] = manifest.tweets_path.filename().string();
    j["favourites"] = manifest.favourites_path.filename().string();
    j["edges"] = manifest.edges_path.filename().string();
    j["reference_time"] = manifest.reference_time;
    auto out = open_out(manifest_path);
    out << j.dump(2) << '\n';
}

LoadResult load_directory(const std::filesystem::path& directory) {
    return load_dataset(read_manifest(directory / "manifest.json"));
}

}  // namespace natid::ingest
