#include "natid/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "natid/util.hpp"

namespace natid::features {

using nlohmann::json;

std::string family_name(Family f) {
    switch (f) {
        case Family::Timeline: return "timeline";
        case Family::Interactions: return "interactions";
        case Family::Favourites: return "favourites";
        case Family::Network: return "network";
        case Family::Behavioral: return "behavioral";
    }
    throw InputError("unknown feature family");
}

Family parse_family(const std::string& name) {
    if (name == "timeline") return Family::Timeline;
    if (name == "interactions") return Family::Interactions;
    if (name == "favourites") return Family::Favourites;
    if (name == "network") return Family::Network;
    if (name == "behavioral") return Family::Behavioral;
    throw InputError("unknown feature family '" + name + "'");
}

double FeatureMatrix::at(std::size_t r, std::size_t c) const {
    if (!sparse) return dense[r * cols() + c];
    for (std::size_t k = indptr[r]; k < indptr[r + 1]; ++k)
        if (static_cast<std::size_t>(col_index[k]) == c) return values[k];
    return 0.0;
}

void FeatureMatrix::row_dense(std::size_t r, std::vector<double>& buf) const {
    buf.assign(cols(), 0.0);
    if (!sparse) {
        std::copy(dense.begin() + static_cast<std::ptrdiff_t>(r * cols()),
                  dense.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols()),
                  buf.begin());
        return;
    }
    for (std::size_t k = indptr[r]; k < indptr[r + 1]; ++k)
        buf[static_cast<std::size_t>(col_index[k])] = values[k];
}

namespace {

std::vector<const model::UserRecord*> labeled_users(
    const model::Dataset& dataset) {
    std::vector<const model::UserRecord*> out;
    for (const auto& [id, user] : dataset.users)
        if (user.label) out.push_back(&user);
    if (out.empty()) throw InputError("dataset has no labeled users");
    return out;
}

FeatureMatrix embedding_family(const model::Dataset& dataset,
                               const textfeat::EmbeddingTable& table,
                               Family family, bool favourites) {
    if (table.dimension <= 0)
        throw InputError("embedding table has no dimension");
    FeatureMatrix m;
    m.family = family;
    m.columns.reserve(static_cast<std::size_t>(table.dimension));
    for (int d = 0; d < table.dimension; ++d)
        m.columns.push_back("e" + std::to_string(d));
    const auto users = labeled_users(dataset);
    m.dense.reserve(users.size() * m.columns.size());
    for (const auto* user : users) {
        m.row_ids.push_back(user->user_id);
        m.labels.push_back(*user->label);
        const auto& tweets = favourites ? user->favourites : user->timeline;
        std::vector<double> row(static_cast<std::size_t>(table.dimension), 0.0);
        if (!tweets.empty()) {
            for (const auto& t : tweets) {
                const auto v = textfeat::embed_text(textfeat::tokenize(t.text),
                                                    table);
                for (std::size_t d = 0; d < row.size(); ++d) row[d] += v[d];
            }
            for (auto& x : row) x /= static_cast<double>(tweets.size());
        }
        m.dense.insert(m.dense.end(), row.begin(), row.end());
    }
    return m;
}

// target user ids of one user's interactions, in occurrence order
void for_each_interaction_target(
    const model::UserRecord& user, const graph::InteractionKinds& kinds,
    const std::function<void(const std::string&)>& fn) {
    for (const auto& t : user.timeline) {
        if (kinds.retweets && t.retweet_of && *t.retweet_of != user.user_id)
            fn(*t.retweet_of);
        if (kinds.replies && t.reply_to && *t.reply_to != user.user_id)
            fn(*t.reply_to);
        if (kinds.mentions)
            for (const auto& mid : t.mentions)
                if (mid != user.user_id) fn(mid);
    }
    if (kinds.favourites)
        for (const auto& t : user.favourites)
            if (!t.author_id.empty() && t.author_id != user.user_id)
                fn(t.author_id);
}

FeatureMatrix sparse_from_rows(
    Family family, std::vector<std::string> columns,
    const std::vector<const model::UserRecord*>& users,
    const std::function<void(const model::UserRecord&,
                             std::map<int, double>&)>& fill_row) {
    FeatureMatrix m;
    m.family = family;
    m.sparse = true;
    m.columns = std::move(columns);
    m.indptr.push_back(0);
    for (const auto* user : users) {
        m.row_ids.push_back(user->user_id);
        m.labels.push_back(*user->label);
        std::map<int, double> row;
        fill_row(*user, row);
        for (const auto& [c, v] : row) {
            m.col_index.push_back(c);
            m.values.push_back(v);
        }
        m.indptr.push_back(m.values.size());
    }
    return m;
}

}  // namespace

FeatureMatrix timeline_features(const model::Dataset& dataset,
                                const textfeat::EmbeddingTable& table) {
    return embedding_family(dataset, table, Family::Timeline, false);
}

FeatureMatrix favourite_features(const model::Dataset& dataset,
                                 const textfeat::EmbeddingTable& table) {
    return embedding_family(dataset, table, Family::Favourites, true);
}

FeatureMatrix interaction_features(const model::Dataset& dataset, double q,
                                   const graph::InteractionKinds& kinds,
                                   const std::vector<std::string>* vocab_users) {
    std::unordered_map<std::string, std::int64_t> counts;
    auto count_user = [&](const model::UserRecord& u) {
        for_each_interaction_target(
            u, kinds, [&](const std::string& target) { ++counts[target]; });
    };
    if (vocab_users) {
        for (const auto& id : *vocab_users) {
            auto it = dataset.users.find(id);
            if (it == dataset.users.end())
                throw InputError("vocabulary user '" + id +
                                 "' not in dataset");
            count_user(it->second);
        }
    } else {
        for (const auto& [id, u] : dataset.users) count_user(u);
    }
    if (counts.empty())
        throw InputError("dataset has no interactions to build a vocabulary");
    auto vocab = stats::percentile_cutoff(counts, q);

    std::unordered_map<std::string, int> col_of;
    col_of.reserve(vocab.size());
    for (std::size_t c = 0; c < vocab.size(); ++c)
        col_of.emplace(vocab[c], static_cast<int>(c));
    return sparse_from_rows(
        Family::Interactions, std::move(vocab), labeled_users(dataset),
        [&](const model::UserRecord& u, std::map<int, double>& row) {
            for_each_interaction_target(u, kinds,
                                        [&](const std::string& target) {
                                            auto it = col_of.find(target);
                                            if (it != col_of.end())
                                                row[it->second] += 1.0;
                                        });
        });
}

FeatureMatrix network_features(const model::Dataset& dataset, double q,
                               const std::vector<std::string>* vocab_users) {
    std::unordered_map<std::string, std::int64_t> counts;
    auto count_user = [&](const model::UserRecord& u) {
        for (const auto& v : u.followees)
            if (v != u.user_id) ++counts[v];
        for (const auto& v : u.followers)
            if (v != u.user_id) ++counts[v];
    };
    if (vocab_users) {
        for (const auto& id : *vocab_users) {
            auto it = dataset.users.find(id);
            if (it == dataset.users.end())
                throw InputError("vocabulary user '" + id +
                                 "' not in dataset");
            count_user(it->second);
        }
    } else {
        for (const auto& [id, u] : dataset.users) count_user(u);
    }
    if (counts.empty())
        throw InputError("dataset has no follow relations to build a vocabulary");
    auto vocab = stats::percentile_cutoff(counts, q);

    std::unordered_map<std::string, int> col_of;
    col_of.reserve(vocab.size());
    for (std::size_t c = 0; c < vocab.size(); ++c)
        col_of.emplace(vocab[c], static_cast<int>(c));
    return sparse_from_rows(
        Family::Network, std::move(vocab), labeled_users(dataset),
        [&](const model::UserRecord& u, std::map<int, double>& row) {
            auto mark = [&](const std::string& v) {
                if (v == u.user_id) return;
                auto it = col_of.find(v);
                if (it != col_of.end()) row[it->second] = 1.0;
            };
            for (const auto& v : u.followees) mark(v);
            for (const auto& v : u.followers) mark(v);
        });
}

const std::array<const char*, kBehavioralFeatureCount>
    kBehavioralFeatureNames = {
        "tweets",                 // f1
        "favourites_given",       // f2
        "tweets_per_day",         // f3
        "account_age_days",       // f4
        "retweets_received",      // f5
        "favourites_received",    // f6
        "urls_local_tld",         // f7
        "urls_state_tld",         // f8
        "followers",              // f9
        "followees",              // f10
        "verified",               // f11
        "geo_enabled",            // f12
        "profile_url_local_tld",  // f13
        "profile_url_state_tld",  // f14
        "ui_language_local",      // f15
        "ui_language_state",      // f16
        "interactions_within",    // f17
        "interactions_across",    // f18
        "favouriting_within",     // f19
        "favouriting_across",     // f20
        "mentions_within",        // f21
        "mentions_across",        // f22
        "retweets_within",        // f23
        "retweets_across",        // f24
        "listed_count",           // f25
        "follows_within",         // f26
        "follows_across",         // f27
        "tweets_local_language",  // f28
        "positive_within",        // f29
        "negative_across",        // f30
};

namespace {

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Hostname of a URL: text after "://" (or the start), cut at the first
// '/', '?' or '#', userinfo and port stripped.
std::string url_host(const std::string& url) {
    std::size_t start = 0;
    const auto scheme = url.find("://");
    if (scheme != std::string::npos) start = scheme + 3;
    std::size_t end = url.find_first_of("/?#", start);
    if (end == std::string::npos) end = url.size();
    std::string host = url.substr(start, end - start);
    const auto at = host.rfind('@');
    if (at != std::string::npos) host = host.substr(at + 1);
    const auto colon = host.find(':');
    if (colon != std::string::npos) host = host.substr(0, colon);
    while (!host.empty() && host.back() == '.') host.pop_back();
    return ascii_lower(host);
}

// Last dot-suffix of the hostname, dot included ("example.cat" -> ".cat");
// empty when the host has no dot, so shortened or bare hosts match neither
// territory TLD.
std::string host_tld(const std::string& host) {
    const auto dot = host.rfind('.');
    if (dot == std::string::npos || dot + 1 == host.size()) return "";
    return host.substr(dot);
}

bool in_list(const std::vector<std::string>& list, const std::string& value) {
    return std::find(list.begin(), list.end(), value) != list.end();
}

}  // namespace

FeatureMatrix behavioral_features(
    const model::Dataset& dataset, const BehavioralConfig& config,
    std::array<std::int64_t, kBehavioralFeatureCount>* missing) {
    const auto users = labeled_users(dataset);
    const auto& territory = dataset.territory;
    const std::vector<std::string>& local_langs =
        config.local_tweet_languages.empty() ? territory.local_languages
                                             : config.local_tweet_languages;

    std::int64_t reference_time = dataset.reference_time;
    if (reference_time == 0) {
        // No recorded reference: fall back to the newest timestamp observed.
        for (const auto& [id, u] : dataset.users) {
            reference_time = std::max(reference_time, u.created_at);
            for (const auto& t : u.timeline)
                reference_time = std::max(reference_time, t.created_at);
            for (const auto& t : u.favourites)
                reference_time = std::max(reference_time, t.created_at);
        }
    }

    std::unordered_map<std::string, model::Stance> label_of;
    for (const auto& [id, u] : dataset.users)
        if (u.label) label_of.emplace(id, *u.label);

    std::array<std::int64_t, kBehavioralFeatureCount> miss{};

    FeatureMatrix m;
    m.family = Family::Behavioral;
    m.columns.assign(kBehavioralFeatureNames.begin(),
                     kBehavioralFeatureNames.end());
    m.dense.reserve(users.size() * kBehavioralFeatureCount);

    for (const auto* user : users) {
        m.row_ids.push_back(user->user_id);
        m.labels.push_back(*user->label);
        std::array<double, kBehavioralFeatureCount> f{};
        const model::Stance own = *user->label;
        auto same = [&](const std::string& target) -> std::optional<bool> {
            if (target.empty() || target == user->user_id) return std::nullopt;
            auto it = label_of.find(target);
            if (it == label_of.end()) return std::nullopt;
            return it->second == own;
        };

        f[0] = static_cast<double>(user->timeline.size());
        f[1] = static_cast<double>(user->favourites.size());

        const double age_days =
            static_cast<double>(reference_time - user->created_at) / 86400.0;
        if (age_days > 0.0) {
            f[3] = age_days;
            f[2] = f[0] / age_days;
        } else {
            ++miss[3];
            ++miss[2];
        }

        for (const auto& t : user->timeline) {
            f[4] += static_cast<double>(t.retweet_count);
            f[5] += static_cast<double>(t.favourite_count);
            for (const auto& url : t.urls) {
                const std::string tld = host_tld(url_host(url));
                if (tld.empty()) continue;
                if (tld == territory.local_tld) f[6] += 1.0;
                else if (tld == territory.state_tld) f[7] += 1.0;
            }
        }

        f[8] = static_cast<double>(user->followers_count);
        f[9] = static_cast<double>(user->followees_count);
        f[10] = user->verified ? 1.0 : 0.0;
        f[11] = user->geo_enabled ? 1.0 : 0.0;

        if (user->profile_url) {
            const std::string tld = host_tld(url_host(*user->profile_url));
            if (tld == territory.local_tld) f[12] = 1.0;
            else if (tld == territory.state_tld) f[13] = 1.0;
        }

        const std::string ui = ascii_lower(user->ui_language);
        if (ui.empty()) {
            ++miss[14];
            ++miss[15];
        } else {
            if (in_list(territory.local_languages, ui)) f[14] = 1.0;
            if (in_list(territory.state_languages, ui)) f[15] = 1.0;
        }

        for_each_interaction_target(
            *user, config.general_interaction_kinds,
            [&](const std::string& target) {
                if (auto s = same(target)) f[*s ? 16 : 17] += 1.0;
            });

        for (const auto& t : user->favourites)
            if (auto s = same(t.author_id)) f[*s ? 18 : 19] += 1.0;

        for (const auto& t : user->timeline) {
            for (const auto& mid : t.mentions)
                if (auto s = same(mid)) f[*s ? 20 : 21] += 1.0;
            if (t.retweet_of)
                if (auto s = same(*t.retweet_of)) f[*s ? 22 : 23] += 1.0;
        }

        f[24] = static_cast<double>(user->listed_count);

        {
            std::set<std::string> neighbors(user->followees.begin(),
                                            user->followees.end());
            neighbors.insert(user->followers.begin(), user->followers.end());
            for (const auto& v : neighbors)
                if (auto s = same(v)) f[*s ? 25 : 26] += 1.0;
        }

        if (config.profiles && !config.profiles->empty()) {
            for (const auto& t : user->timeline)
                if (in_list(local_langs,
                            textfeat::identify_language(t.text,
                                                        *config.profiles)))
                    f[27] += 1.0;
        } else {
            ++miss[27];
        }

        if (config.lexicon && !config.lexicon->polarity.empty()) {
            for (const auto& t : user->timeline) {
                std::set<std::string> targets;
                if (t.retweet_of) targets.insert(*t.retweet_of);
                if (t.reply_to) targets.insert(*t.reply_to);
                targets.insert(t.mentions.begin(), t.mentions.end());
                if (targets.empty()) continue;
                std::optional<textfeat::SentimentClass> cls;
                for (const auto& target : targets) {
                    auto s = same(target);
                    if (!s) continue;
                    if (!cls)
                        cls = textfeat::sentiment_score(
                                  textfeat::tokenize(t.text), *config.lexicon)
                                  .cls;
                    if (*s && *cls == textfeat::SentimentClass::Pos)
                        f[28] += 1.0;
                    if (!*s && *cls == textfeat::SentimentClass::Neg)
                        f[29] += 1.0;
                }
            }
        } else {
            ++miss[28];
            ++miss[29];
        }

        m.dense.insert(m.dense.end(), f.begin(), f.end());
    }

    if (missing) *missing = miss;
    return m;
}

std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

std::vector<FeatureComparison> group_comparison_report(
    const FeatureMatrix& behavioral) {
    if (behavioral.family != Family::Behavioral)
        throw InputError("group comparison expects the behavioral family");
    if (behavioral.labels.size() != behavioral.rows())
        throw InputError("group comparison needs a labeled matrix");
    std::vector<std::size_t> pi_rows, ai_rows;
    for (std::size_t r = 0; r < behavioral.rows(); ++r)
        (behavioral.labels[r] == model::Stance::PI ? pi_rows : ai_rows)
            .push_back(r);
    if (pi_rows.size() < 2 || ai_rows.size() < 2)
        throw InputError("group comparison needs at least 2 users per stance");

    std::vector<FeatureComparison> out;
    out.reserve(behavioral.cols());
    std::vector<double> a(pi_rows.size()), b(ai_rows.size());
    for (std::size_t c = 0; c < behavioral.cols(); ++c) {
        for (std::size_t i = 0; i < pi_rows.size(); ++i)
            a[i] = behavioral.at(pi_rows[i], c);
        for (std::size_t i = 0; i < ai_rows.size(); ++i)
            b[i] = behavioral.at(ai_rows[i], c);
        FeatureComparison fc;
        fc.feature_id = static_cast<int>(c) + 1;
        fc.name = behavioral.columns[c];
        for (double x : a) fc.pi_mean += x;
        fc.pi_mean /= static_cast<double>(a.size());
        for (double x : b) fc.ai_mean += x;
        fc.ai_mean /= static_cast<double>(b.size());
        fc.test = stats::welch_t_test(a, b);
        out.push_back(std::move(fc));
    }
    return out;
}

namespace {

const char* stance_tag(model::Stance s) { return model::stance_name(s); }

}  // namespace

void save_feature_matrix(const FeatureMatrix& m,
                         const std::filesystem::path& csv_path) {
    json meta;
    meta["schema"] = "natid/features/v1";
    meta["family"] = family_name(m.family);
    meta["sparse"] = m.sparse;
    meta["columns"] = m.columns;
    meta["row_ids"] = m.row_ids;
    if (m.labels.empty()) {
        meta["labels"] = nullptr;
    } else {
        std::vector<std::string> labels;
        labels.reserve(m.labels.size());
        for (auto s : m.labels) labels.emplace_back(stance_tag(s));
        meta["labels"] = labels;
    }
    std::filesystem::path meta_path = csv_path;
    meta_path += ".meta.json";
    {
        std::ofstream out(meta_path, std::ios::binary);
        if (!out) throw InputError("cannot write " + meta_path.string());
        out << meta.dump(2) << "\n";
    }
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + csv_path.string());
    if (m.sparse) {
        out << "row,col,value\n";
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t k = m.indptr[r]; k < m.indptr[r + 1]; ++k)
                out << r << ',' << m.col_index[k] << ','
                    << format_double(m.values[k]) << '\n';
    } else {
        out << "row_id";
        for (const auto& c : m.columns) out << ',' << csv_escape(c);
        out << '\n';
        for (std::size_t r = 0; r < m.rows(); ++r) {
            out << csv_escape(m.row_ids[r]);
            for (std::size_t c = 0; c < m.cols(); ++c)
                out << ',' << format_double(m.dense[r * m.cols() + c]);
            out << '\n';
        }
    }
    if (!out) throw InputError("failed writing " + csv_path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    // Fields produced by save_feature_matrix: quotes only when needed.
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw InputError(where + ": bad number '" + s + "'");
    return v;
}

}  // namespace

FeatureMatrix load_feature_matrix(const std::filesystem::path& csv_path) {
    std::filesystem::path meta_path = csv_path;
    meta_path += ".meta.json";
    std::ifstream meta_in(meta_path, std::ios::binary);
    if (!meta_in) throw InputError("cannot open " + meta_path.string());
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::exception& e) {
        throw InputError(meta_path.string() + ": " + e.what());
    }
    if (!meta.is_object() || meta.value("schema", "") != "natid/features/v1")
        throw InputError(meta_path.string() + ": not a natid/features/v1 file");

    FeatureMatrix m;
    try {
        m.family = parse_family(meta.at("family").get<std::string>());
        m.sparse = meta.at("sparse").get<bool>();
        m.columns = meta.at("columns").get<std::vector<std::string>>();
        m.row_ids = meta.at("row_ids").get<std::vector<std::string>>();
        if (!meta.at("labels").is_null()) {
            for (const auto& tag :
                 meta.at("labels").get<std::vector<std::string>>()) {
                auto s = model::parse_stance(tag);
                if (!s) throw InputError("bad stance label '" + tag + "'");
                m.labels.push_back(*s);
            }
        }
    } catch (const json::exception& e) {
        throw InputError(meta_path.string() + ": " + e.what());
    }
    if (!m.labels.empty() && m.labels.size() != m.row_ids.size())
        throw InputError(meta_path.string() + ": labels do not align with rows");

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw InputError("cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line))
        throw InputError(csv_path.string() + ": empty file");

    if (m.sparse) {
        if (line != "row,col,value")
            throw InputError(csv_path.string() + ": bad sparse header");
        std::vector<std::map<int, double>> rows(m.row_ids.size());
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto where = csv_path.string() + " line " +
                               std::to_string(lineno);
            const auto fields = split_csv_line(line);
            if (fields.size() != 3)
                throw InputError(where + ": expected 3 fields");
            const auto r = static_cast<std::size_t>(
                parse_number(fields[0], where));
            const int c = static_cast<int>(parse_number(fields[1], where));
            if (r >= m.row_ids.size() || c < 0 ||
                static_cast<std::size_t>(c) >= m.columns.size())
                throw InputError(where + ": index out of range");
            rows[r][c] = parse_number(fields[2], where);
        }
        m.indptr.push_back(0);
        for (const auto& row : rows) {
            for (const auto& [c, v] : row) {
                m.col_index.push_back(c);
                m.values.push_back(v);
            }
            m.indptr.push_back(m.values.size());
        }
    } else {
        std::size_t lineno = 1;
        std::size_t r = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto where = csv_path.string() + " line " +
                               std::to_string(lineno);
            const auto fields = split_csv_line(line);
            if (fields.size() != m.columns.size() + 1)
                throw InputError(where + ": expected " +
                                 std::to_string(m.columns.size() + 1) +
                                 " fields");
            if (r >= m.row_ids.size())
                throw InputError(where + ": more rows than the sidecar lists");
            if (fields[0] != m.row_ids[r])
                throw InputError(where + ": row id '" + fields[0] +
                                 "' does not match sidecar order");
            for (std::size_t c = 0; c < m.columns.size(); ++c)
                m.dense.push_back(parse_number(fields[c + 1], where));
            ++r;
        }
        if (r != m.row_ids.size())
            throw InputError(csv_path.string() + ": fewer rows than the sidecar lists");
    }
    return m;
}

FeatureMatrix select_rows(const FeatureMatrix& m,
                          const std::vector<int>& row_indices) {
    FeatureMatrix out;
    out.family = m.family;
    out.columns = m.columns;
    out.sparse = m.sparse;
    if (out.sparse) out.indptr.push_back(0);
    for (int r : row_indices) {
        if (r < 0 || static_cast<std::size_t>(r) >= m.rows())
            throw InputError("row index out of range");
        const auto ur = static_cast<std::size_t>(r);
        out.row_ids.push_back(m.row_ids[ur]);
        if (!m.labels.empty()) out.labels.push_back(m.labels[ur]);
        if (m.sparse) {
            for (std::size_t k = m.indptr[ur]; k < m.indptr[ur + 1]; ++k) {
                out.col_index.push_back(m.col_index[k]);
                out.values.push_back(m.values[k]);
            }
            out.indptr.push_back(out.values.size());
        } else {
            out.dense.insert(
                out.dense.end(),
                m.dense.begin() + static_cast<std::ptrdiff_t>(ur * m.cols()),
                m.dense.begin() +
                    static_cast<std::ptrdiff_t>((ur + 1) * m.cols()));
        }
    }
    return out;
}

}  // namespace natid::features
