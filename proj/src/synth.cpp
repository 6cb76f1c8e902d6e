#include "natid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include "json.hpp"
#include "natid/util.hpp"

namespace natid::synth {

using nlohmann::json;

void validate(const SynthConfig& config) {
    if (config.n_users < 2) throw InputError("n_users must be at least 2");
    if (!(config.pi_fraction > 0.0 && config.pi_fraction < 1.0))
        throw InputError("pi_fraction must lie in (0,1)");
    if (!(config.homophily >= 0.0 && config.homophily <= 1.0))
        throw InputError("homophily must lie in [0,1]");
    if (!(config.mean_degree > 0.0))
        throw InputError("mean_degree must be positive");
    if (config.mean_degree > static_cast<double>(config.n_users - 1))
        throw InputError("mean_degree exceeds n_users-1 (infeasible)");
    if (config.tweets_per_user < 0 || config.tweets_per_user > 300)
        throw InputError("tweets_per_user must lie in [0,300]");
    if (config.token_vocab_per_group < 1 || config.token_vocab_per_group > 4000)
        throw InputError("token_vocab_per_group must lie in [1,4000]");
    if (!(config.token_overlap >= 0.0 && config.token_overlap <= 1.0))
        throw InputError("token_overlap must lie in [0,1]");
    if (!(config.group_contrast >= 0.0 && config.group_contrast <= 1.0))
        throw InputError("group_contrast must lie in [0,1]");
    if (!(config.pi_degree_boost > 0.0))
        throw InputError("pi_degree_boost must be positive");
}

namespace {

constexpr std::int64_t kReferenceTime = 1400000000;

// distinct syllable inventories so the two token pools never share trigrams
constexpr std::array<const char*, 8> kLocalSyllables = {
    "ka", "tu", "ri", "mo", "za", "len", "bi", "or"};
constexpr std::array<const char*, 8> kStateSyllables = {
    "es", "pa", "do", "ce", "vi", "ral", "son", "te"};

const std::array<const char*, 2> kPositiveTokens = {"upbeat", "lovely"};
const std::array<const char*, 2> kNegativeTokens = {"awful", "grim"};

std::string pool_token(const std::array<const char*, 8>& syl, int k) {
    std::string t = syl[static_cast<std::size_t>(k % 8)];
    t += syl[static_cast<std::size_t>((k / 8) % 8)];
    t += syl[static_cast<std::size_t>((k / 64) % 8)];
    if (k >= 512) t += syl[static_cast<std::size_t>((k / 512) % 8)];
    return t;
}

struct Pools {
    std::vector<std::string> local;
    std::vector<std::string> state;
};

Pools make_pools(const SynthConfig& config) {
    Pools pools;
    pools.local.reserve(static_cast<std::size_t>(config.token_vocab_per_group));
    pools.state.reserve(static_cast<std::size_t>(config.token_vocab_per_group));
    for (int k = 0; k < config.token_vocab_per_group; ++k) {
        pools.local.push_back(pool_token(kLocalSyllables, k));
        pools.state.push_back(pool_token(kStateSyllables, k));
    }
    return pools;
}

// per-interaction-kind base Poisson rates (scaled by the group multipliers)
constexpr double kReplyRate = 0.7;
constexpr double kMentionRate = 0.65;
constexpr double kRetweetRate = 0.8;
constexpr double kFavouriteRate = 0.6;

// Everything group-conditional, as closed-form functions of group_contrast
// so planted_directions can reuse the same arithmetic.
struct GroupRates {
    double age_mu;          // days
    double followers_mu;
    double followees_mu;
    double listed_mu;
    double verified_p;
    double geo_p;
    double url_local_share;  // profile URL TLD split (rest .com)
    double url_state_share;
    double ui_local_p;       // UI language split (rest "fr")
    double ui_state_p;
    double tweet_lambda;     // base timeline tweets
    double retweet_count_lambda;
    double fav_count_lambda;
    double tweet_url_local_p;  // per base tweet
    double tweet_url_state_p;
    double p_local_language;   // per tweet
    double mult_same;          // interaction-rate multipliers
    double mult_cross;
    double p_pos;  // positive token on a within-group interaction tweet
    double p_neg;  // negative token on a cross-group interaction tweet
};

GroupRates rates_for(const SynthConfig& config, model::Stance g) {
    const double c = config.group_contrast;
    const double s = g == model::Stance::PI ? 1.0 : -1.0;
    GroupRates r;
    r.age_mu = 1250.0 - s * 350.0 * c;
    r.followers_mu = 600.0 + s * 200.0 * c;
    r.followees_mu = 450.0 - s * 150.0 * c;
    r.listed_mu = 21.0 + s * 9.0 * c;
    r.verified_p = 0.19 + s * 0.11 * c;
    r.geo_p = 0.45 + s * 0.15 * c;
    r.url_local_share = 0.325 + s * 0.275 * c;
    r.url_state_share = 0.325 - s * 0.225 * c;
    r.ui_local_p = 0.4 + s * 0.3 * c;
    r.ui_state_p = 0.525 - s * 0.275 * c;
    r.tweet_lambda =
        static_cast<double>(config.tweets_per_user) * (1.075 + s * 0.225 * c);
    r.retweet_count_lambda = 2.0 + s * 1.0 * c;
    r.fav_count_lambda = 1.65 + s * 0.85 * c;
    r.tweet_url_local_p = 0.145 + s * 0.105 * c;
    r.tweet_url_state_p = 0.175 - s * 0.125 * c;
    r.p_local_language = g == model::Stance::PI
                             ? 1.0 - config.token_overlap / 2.0
                             : config.token_overlap / 2.0;
    r.mult_same = g == model::Stance::PI ? 1.0 + c : 1.0 - 0.5 * c;
    r.mult_cross = g == model::Stance::PI ? 1.0 - 0.8 * c : 1.0 + 0.9 * c;
    r.p_pos = 0.45 + s * 0.25 * c;
    r.p_neg = 0.45 - s * 0.25 * c;
    return r;
}

std::string user_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%06d", i);
    return buf;
}

const std::vector<std::string>& location_variants(model::TerritoryKind kind,
                                                  model::Stance g) {
    static const std::vector<std::string> cat_pi = {
        "Països Catalans", "PPCC", "Girona, Països Catalans"};
    static const std::vector<std::string> cat_ai = {
        "Barcelona, España", "Girona, Espanya", "Catalunya, España"};
    static const std::vector<std::string> eus_pi = {"Euskal Herria", "EH",
                                                    "Bilbo, Euskal Herria"};
    static const std::vector<std::string> eus_ai = {
        "Bilbao, España", "Donostia, Espainia", "Vitoria-Gasteiz, España"};
    static const std::vector<std::string> sco_pi = {"Scotland",
                                                    "Glasgow, Scotland",
                                                    "Alba, Scotland"};
    static const std::vector<std::string> sco_ai = {
        "Glasgow, UK", "Edinburgh, United Kingdom", "Scotland, UK"};
    switch (kind) {
        case model::TerritoryKind::Catalonia:
            return g == model::Stance::PI ? cat_pi : cat_ai;
        case model::TerritoryKind::BasqueCountry:
            return g == model::Stance::PI ? eus_pi : eus_ai;
        case model::TerritoryKind::Scotland:
            return g == model::Stance::PI ? sco_pi : sco_ai;
        case model::TerritoryKind::Custom: break;
    }
    throw InputError("synthetic datasets need a builtin territory");
}

int planted_pi_count(const SynthConfig& config) {
    int n_pi = static_cast<int>(
        std::lround(config.pi_fraction * static_cast<double>(config.n_users)));
    n_pi = std::max(1, std::min(config.n_users - 1, n_pi));
    return n_pi;
}

std::string make_text(Rng& rng, const std::vector<std::string>& pool) {
    const int len = 8 + static_cast<int>(rng.below(8));
    std::string text;
    for (int i = 0; i < len; ++i) {
        if (i) text += ' ';
        text += pool[rng.below(pool.size())];
    }
    return text;
}

}  // namespace

model::Dataset generate(const SynthConfig& config) {
    validate(config);
    const int n = config.n_users;
    const int n_pi = planted_pi_count(config);
    const double boost = config.pi_degree_boost;
    const auto group = [&](int i) {
        return i < n_pi ? model::Stance::PI : model::Stance::AI;
    };
    const Pools pools = make_pools(config);
    const GroupRates pi_rates = rates_for(config, model::Stance::PI);
    const GroupRates ai_rates = rates_for(config, model::Stance::AI);
    const auto rates_of = [&](int i) -> const GroupRates& {
        return i < n_pi ? pi_rates : ai_rates;
    };

    model::Dataset ds;
    ds.territory = model::builtin_territory(config.territory);
    ds.reference_time = kReferenceTime;

    // follow edges: planted partition, undirected sampling realized as one
    // directed follow each
    const auto edge_target =
        static_cast<std::int64_t>(std::llround(
            static_cast<double>(n) * config.mean_degree / 2.0));
    std::vector<std::vector<int>> out_edges(static_cast<std::size_t>(n));
    {
        Rng rng(derive_seed(config.seed, 11));
        std::set<std::pair<int, int>> seen;
        const double weight_total =
            boost * static_cast<double>(n_pi) + static_cast<double>(n - n_pi);
        std::int64_t placed = 0, attempts = 0;
        const std::int64_t attempt_cap = 50 * std::max<std::int64_t>(edge_target, 1) + 1000;
        while (placed < edge_target) {
            if (++attempts > attempt_cap)
                throw InputError(
                    "could not place the requested edges; degree infeasible "
                    "for the group sizes");
            int u;
            if (boost == 1.0) {
                u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            } else {
                const double x = rng.uniform() * weight_total;
                const double pi_mass = boost * static_cast<double>(n_pi);
                if (x < pi_mass)
                    u = std::min(n_pi - 1, static_cast<int>(x / boost));
                else
                    u = std::min(n - 1, n_pi + static_cast<int>(x - pi_mass));
            }
            const bool within = rng.uniform() < config.homophily;
            const bool target_pi = within == (u < n_pi);
            const int lo = target_pi ? 0 : n_pi;
            const int size = target_pi ? n_pi : n - n_pi;
            const int v =
                lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
            if (v == u) continue;
            const auto key = std::minmax(u, v);
            if (!seen.insert(key).second) continue;
            out_edges[static_cast<std::size_t>(u)].push_back(v);
            ++placed;
        }
        for (auto& targets : out_edges)
            std::sort(targets.begin(), targets.end());
    }

    // profile fields and locations
    std::vector<double> age_days(static_cast<std::size_t>(n));
    {
        Rng rng(derive_seed(config.seed, 12));
        for (int i = 0; i < n; ++i) {
            const GroupRates& r = rates_of(i);
            model::UserRecord u;
            u.user_id = user_id(i);
            u.label = group(i);
            const double age = std::max(30.0, rng.normal(r.age_mu, 200.0));
            age_days[static_cast<std::size_t>(i)] = age;
            u.created_at =
                kReferenceTime - static_cast<std::int64_t>(std::llround(age * 86400.0));
            u.followers_count =
                std::max<std::int64_t>(0, std::llround(rng.normal(r.followers_mu, 180.0)));
            u.followees_count =
                std::max<std::int64_t>(0, std::llround(rng.normal(r.followees_mu, 130.0)));
            u.listed_count =
                std::max<std::int64_t>(0, std::llround(rng.normal(r.listed_mu, 8.0)));
            u.verified = rng.uniform() < r.verified_p;
            u.geo_enabled = rng.uniform() < r.geo_p;
            if (rng.uniform() < 0.8) {
                const double roll = rng.uniform();
                const std::string tld =
                    roll < r.url_local_share ? ds.territory.local_tld
                    : roll < r.url_local_share + r.url_state_share
                        ? ds.territory.state_tld
                        : ".com";
                u.profile_url = "http://site" + std::to_string(rng.below(100000)) +
                                tld + "/";
            }
            {
                const double roll = rng.uniform();
                if (roll < r.ui_local_p)
                    u.ui_language = ds.territory.local_languages.front();
                else if (roll < r.ui_local_p + r.ui_state_p)
                    u.ui_language = ds.territory.state_languages.front();
                else
                    u.ui_language = "fr";
            }
            if (rng.below(10) < 9) {
                const auto& variants =
                    location_variants(config.territory, group(i));
                u.location = variants[rng.below(variants.size())];
            }
            ds.users.emplace(u.user_id, std::move(u));
        }
    }

    // base timelines
    {
        Rng rng(derive_seed(config.seed, 13));
        for (int i = 0; i < n; ++i) {
            const GroupRates& r = rates_of(i);
            auto& u = ds.users.at(user_id(i));
            const auto count = rng.poisson(r.tweet_lambda);
            const auto span = static_cast<std::uint64_t>(
                std::min<double>(365.0, age_days[static_cast<std::size_t>(i)]) *
                86400.0);
            for (std::int64_t k = 0; k < count; ++k) {
                model::Tweet t;
                t.tweet_id = "t" + std::to_string(i) + "_" + std::to_string(k);
                t.author_id = u.user_id;
                t.created_at =
                    kReferenceTime -
                    static_cast<std::int64_t>(rng.below(std::max<std::uint64_t>(span, 1)));
                const bool local = rng.uniform() < r.p_local_language;
                t.text = make_text(rng, local ? pools.local : pools.state);
                if (rng.uniform() < r.tweet_url_local_p)
                    t.urls.push_back("http://news" + std::to_string(rng.below(100000)) +
                                     ds.territory.local_tld + "/a");
                if (rng.uniform() < r.tweet_url_state_p)
                    t.urls.push_back("http://diario" + std::to_string(rng.below(100000)) +
                                     ds.territory.state_tld + "/a");
                if (rng.uniform() < 0.1)
                    t.urls.push_back("http://example" + std::to_string(rng.below(100000)) +
                                     ".com/a");
                t.retweet_count = rng.poisson(r.retweet_count_lambda);
                t.favourite_count = rng.poisson(r.fav_count_lambda);
                u.timeline.push_back(std::move(t));
            }
        }
    }

    // interactions and favourites along follow edges
    {
        Rng rng(derive_seed(config.seed, 14));
        for (int i = 0; i < n; ++i) {
            const GroupRates& r = rates_of(i);
            auto& u = ds.users.at(user_id(i));
            const auto span = static_cast<std::uint64_t>(
                std::min<double>(365.0, age_days[static_cast<std::size_t>(i)]) *
                86400.0);
            std::int64_t seq = 0, fav_seq = 0;
            for (const int v : out_edges[static_cast<std::size_t>(i)]) {
                const bool same = group(v) == group(i);
                const double mult = same ? r.mult_same : r.mult_cross;
                const GroupRates& vr = rates_of(v);
                const std::string v_id = user_id(v);

                auto interaction_tweet = [&](int kind) {
                    model::Tweet t;
                    t.tweet_id = "t" + std::to_string(i) + "_x" +
                                 std::to_string(seq++);
                    t.author_id = u.user_id;
                    t.created_at =
                        kReferenceTime -
                        static_cast<std::int64_t>(rng.below(std::max<std::uint64_t>(span, 1)));
                    const bool local = rng.uniform() < r.p_local_language;
                    t.text = make_text(rng, local ? pools.local : pools.state);
                    if (kind == 0) t.reply_to = v_id;
                    else if (kind == 1) t.mentions.push_back(v_id);
                    else t.retweet_of = v_id;
                    if (same) {
                        if (rng.uniform() < r.p_pos)
                            t.text += std::string(" ") +
                                      kPositiveTokens[rng.below(2)];
                    } else {
                        if (rng.uniform() < r.p_neg)
                            t.text += std::string(" ") +
                                      kNegativeTokens[rng.below(2)];
                    }
                    t.retweet_count = rng.poisson(r.retweet_count_lambda);
                    t.favourite_count = rng.poisson(r.fav_count_lambda);
                    u.timeline.push_back(std::move(t));
                };

                const auto replies = rng.poisson(kReplyRate * mult);
                for (std::int64_t k = 0; k < replies; ++k) interaction_tweet(0);
                const auto mentions = rng.poisson(kMentionRate * mult);
                for (std::int64_t k = 0; k < mentions; ++k) interaction_tweet(1);
                const auto retweets = rng.poisson(kRetweetRate * mult);
                for (std::int64_t k = 0; k < retweets; ++k) interaction_tweet(2);

                const auto favs = rng.poisson(kFavouriteRate * mult);
                for (std::int64_t k = 0; k < favs; ++k) {
                    model::Tweet t;
                    t.tweet_id = "f" + std::to_string(i) + "_" +
                                 std::to_string(fav_seq++);
                    t.author_id = v_id;
                    t.created_at =
                        kReferenceTime -
                        static_cast<std::int64_t>(rng.below(365ull * 86400ull));
                    const bool local = rng.uniform() < vr.p_local_language;
                    t.text = make_text(rng, local ? pools.local : pools.state);
                    t.retweet_count = rng.poisson(vr.retweet_count_lambda);
                    t.favourite_count = rng.poisson(vr.fav_count_lambda);
                    u.favourites.push_back(std::move(t));
                }
            }
        }
    }

    // newest-first order, capped like a real crawl
    for (auto& [id, u] : ds.users) {
        auto newest_first = [](const model::Tweet& a, const model::Tweet& b) {
            if (a.created_at != b.created_at) return a.created_at > b.created_at;
            return a.tweet_id < b.tweet_id;
        };
        std::sort(u.timeline.begin(), u.timeline.end(), newest_first);
        if (u.timeline.size() > model::kMaxTimelineLength)
            u.timeline.resize(model::kMaxTimelineLength);
        std::sort(u.favourites.begin(), u.favourites.end(), newest_first);
        if (u.favourites.size() > model::kMaxTimelineLength)
            u.favourites.resize(model::kMaxTimelineLength);
    }

    // follow lists (symmetric in-dataset representation)
    for (int i = 0; i < n; ++i) {
        const std::string src = user_id(i);
        for (const int v : out_edges[static_cast<std::size_t>(i)]) {
            const std::string dst = user_id(v);
            ds.users.at(src).followees.push_back(dst);
            ds.users.at(dst).followers.push_back(src);
        }
    }
    for (auto& [id, u] : ds.users) model::canonicalize(u);
    return ds;
}

std::vector<textfeat::LanguageProfile> language_profiles(
    const SynthConfig& config) {
    validate(config);
    const Pools pools = make_pools(config);
    const model::Territory territory = model::builtin_territory(config.territory);
    Rng rng(derive_seed(config.seed, 201));
    auto build = [&](const std::vector<std::string>& pool,
                     const std::string& language) {
        std::vector<std::string> texts;
        texts.reserve(200);
        for (int i = 0; i < 200; ++i) {
            std::string text;
            for (int k = 0; k < 30; ++k) {
                if (k) text += ' ';
                text += pool[rng.below(pool.size())];
            }
            texts.push_back(std::move(text));
        }
        return textfeat::build_language_profile(texts, language);
    };
    std::vector<textfeat::LanguageProfile> profiles;
    profiles.push_back(build(pools.local, territory.local_languages.front()));
    profiles.push_back(build(pools.state, territory.state_languages.front()));
    return profiles;
}

textfeat::SentimentLexicon sentiment_lexicon(const SynthConfig& config) {
    validate(config);
    textfeat::SentimentLexicon lex;
    lex.language = "shared";
    for (const char* t : kPositiveTokens) lex.polarity[t] = 1.0;
    for (const char* t : kNegativeTokens) lex.polarity[t] = -1.0;
    return lex;
}

std::array<std::optional<model::Stance>, features::kBehavioralFeatureCount>
planted_directions(const SynthConfig& config) {
    validate(config);
    const int n = config.n_users;
    const int n_pi = planted_pi_count(config);
    const int n_ai = n - n_pi;
    const double h = config.homophily;
    const double boost = config.pi_degree_boost;
    const double m_edges = static_cast<double>(n) * config.mean_degree / 2.0;
    const double weight_total =
        boost * static_cast<double>(n_pi) + static_cast<double>(n_ai);
    constexpr double kKindSum = kReplyRate + kMentionRate + kRetweetRate;

    struct Means {
        std::array<double, features::kBehavioralFeatureCount> f{};
    };
    auto means_for = [&](model::Stance g) {
        const GroupRates r = rates_for(config, g);
        const double out_deg =
            m_edges * (g == model::Stance::PI ? boost : 1.0) / weight_total;
        const double edge_mix = h * r.mult_same + (1.0 - h) * r.mult_cross;
        Means m;
        const double interaction_tweets = out_deg * kKindSum * edge_mix;
        m.f[0] = r.tweet_lambda + interaction_tweets;
        m.f[1] = out_deg * kFavouriteRate * edge_mix;
        m.f[3] = r.age_mu;
        m.f[2] = m.f[0] / m.f[3];
        m.f[4] = m.f[0] * r.retweet_count_lambda;
        m.f[5] = m.f[0] * r.fav_count_lambda;
        m.f[6] = r.tweet_lambda * r.tweet_url_local_p;
        m.f[7] = r.tweet_lambda * r.tweet_url_state_p;
        m.f[8] = r.followers_mu;
        m.f[9] = r.followees_mu;
        m.f[10] = r.verified_p;
        m.f[11] = r.geo_p;
        m.f[12] = 0.8 * r.url_local_share;
        m.f[13] = 0.8 * r.url_state_share;
        m.f[14] = r.ui_local_p;
        m.f[15] = r.ui_state_p;
        m.f[16] = out_deg * h * kReplyRate * r.mult_same;
        m.f[17] = out_deg * (1.0 - h) * kReplyRate * r.mult_cross;
        m.f[18] = out_deg * h * kFavouriteRate * r.mult_same;
        m.f[19] = out_deg * (1.0 - h) * kFavouriteRate * r.mult_cross;
        m.f[20] = out_deg * h * kMentionRate * r.mult_same;
        m.f[21] = out_deg * (1.0 - h) * kMentionRate * r.mult_cross;
        m.f[22] = out_deg * h * kRetweetRate * r.mult_same;
        m.f[23] = out_deg * (1.0 - h) * kRetweetRate * r.mult_cross;
        m.f[24] = r.listed_mu;
        // every within-group edge contributes a neighbor at each labeled
        // endpoint; every cross edge contributes one to each group
        m.f[25] = 2.0 * m_edges * h *
                  (g == model::Stance::PI ? boost : 1.0) / weight_total;
        m.f[26] = m_edges * (1.0 - h) /
                  static_cast<double>(g == model::Stance::PI ? n_pi : n_ai);
        m.f[27] = m.f[0] * r.p_local_language;
        m.f[28] = out_deg * h * kKindSum * r.mult_same * r.p_pos;
        m.f[29] = out_deg * (1.0 - h) * kKindSum * r.mult_cross * r.p_neg;
        return m;
    };

    const Means pi = means_for(model::Stance::PI);
    const Means ai = means_for(model::Stance::AI);
    std::array<std::optional<model::Stance>, features::kBehavioralFeatureCount>
        out;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double tol =
            1e-9 * (std::fabs(pi.f[j]) + std::fabs(ai.f[j])) + 1e-12;
        if (pi.f[j] > ai.f[j] + tol) out[j] = model::Stance::PI;
        else if (ai.f[j] > pi.f[j] + tol) out[j] = model::Stance::AI;
    }
    return out;
}

ingest::Manifest emit(const SynthConfig& config,
                      const std::filesystem::path& out_dir) {
    const model::Dataset ds = generate(config);
    const auto manifest = ingest::save_dataset(ds, out_dir);
    textfeat::save_language_profiles(language_profiles(config),
                                     out_dir / "profiles.tsv");
    textfeat::save_lexicon(sentiment_lexicon(config), out_dir / "lexicon.tsv");

    json j;
    j["schema"] = "natid/synth-provenance/v1";
    j["territory"] = ds.territory.name;
    j["n_users"] = config.n_users;
    j["pi_fraction"] = config.pi_fraction;
    j["homophily"] = config.homophily;
    j["mean_degree"] = config.mean_degree;
    j["tweets_per_user"] = config.tweets_per_user;
    j["token_vocab_per_group"] = config.token_vocab_per_group;
    j["token_overlap"] = config.token_overlap;
    j["seed"] = config.seed;
    j["group_contrast"] = config.group_contrast;
    j["pi_degree_boost"] = config.pi_degree_boost;
    std::ofstream out(out_dir / "provenance.json", std::ios::binary);
    if (!out)
        throw InputError("cannot write " + (out_dir / "provenance.json").string());
    out << j.dump(2) << "\n";
    return manifest;
}

}  // namespace natid::synth
