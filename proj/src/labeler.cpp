#include "natid/labeler.hpp"

#include <fstream>
#include <unordered_map>

#include "json.hpp"
#include "natid/textfeat.hpp"
#include "natid/util.hpp"

namespace natid::labeler {

namespace {

// Word characters for boundary checks: ASCII alphanumerics plus everything
// from U+00C0 up (accented letters and beyond). U+00A0..U+00BF are symbols
// and punctuation («, », ¿, ...).
bool is_word_cp(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z') || cp == '_';
    return cp >= 0xC0;
}

std::vector<char32_t> decode_all(const std::string& s) {
    std::vector<char32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) cps.push_back(utf8_decode(s, i));
    return cps;
}

int count_tokens(const std::string& normalized) {
    auto cps = decode_all(normalized);
    int tokens = 0;
    bool in_word = false;
    for (char32_t cp : cps) {
        bool w = is_word_cp(cp);
        if (w && !in_word) ++tokens;
        in_word = w;
    }
    return tokens;
}

// Whole-token substring match: `term` occurs in `hay` with non-word (or
// string edge) on both sides. Both are expected pre-normalized.
bool contains_term(const std::string& hay, const std::string& term) {
    if (term.empty()) return false;
    std::size_t pos = 0;
    while ((pos = hay.find(term, pos)) != std::string::npos) {
        bool left_ok = true, right_ok = true;
        if (pos > 0) {
            // Walk back to the start of the previous code point.
            std::size_t p = pos;
            do {
                --p;
            } while (p > 0 && (static_cast<unsigned char>(hay[p]) & 0xC0) == 0x80);
            std::size_t tmp = p;
            left_ok = !is_word_cp(utf8_decode(hay, tmp));
        }
        std::size_t end = pos + term.size();
        if (end < hay.size()) {
            std::size_t tmp = end;
            right_ok = !is_word_cp(utf8_decode(hay, tmp));
        }
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool rule_matches(const MatchRule& rule, const std::string& loc, int n_tokens) {
    if (rule.max_location_tokens > 0 && n_tokens > rule.max_location_tokens)
        return false;
    for (const auto& t : rule.required_terms)
        if (!contains_term(loc, t)) return false;
    for (const auto& t : rule.forbidden_terms)
        if (contains_term(loc, t)) return false;
    return !rule.required_terms.empty();
}

MatchRule normalized_rule(MatchRule r) {
    for (auto& t : r.required_terms) t = normalize_location(t);
    for (auto& t : r.forbidden_terms) t = normalize_location(t);
    return r;
}

std::vector<MatchRule> conjunction_product(
    const std::vector<std::string>& cities,
    const std::vector<std::string>& state_terms) {
    std::vector<MatchRule> out;
    for (const auto& c : cities)
        for (const auto& s : state_terms)
            out.push_back(normalized_rule({{c, s}, {}, 0}));
    return out;
}

}  // namespace

RuleSet builtin_rules(const model::Territory& territory) {
    RuleSet r;
    r.territory = territory;
    switch (territory.kind) {
        case model::TerritoryKind::Catalonia:
            r.pi_location_patterns = {normalized_rule({{"països catalans"}, {}, 0}),
                                      normalized_rule({{"ppcc"}, {}, 0})};
            r.ai_location_patterns = conjunction_product(
                {"barcelona", "girona", "catalunya", "cataluña"},
                {"espanya", "españa"});
            break;
        case model::TerritoryKind::BasqueCountry:
            r.pi_location_patterns = {normalized_rule({{"euskal herria"}, {}, 0}),
                                      normalized_rule({{"eh"}, {}, 3})};
            r.ai_location_patterns = conjunction_product(
                {"bilbao", "donostia", "san sebastián", "vitoria-gasteiz",
                 "euskadi"},
                {"espainia", "españa"});
            break;
        case model::TerritoryKind::Scotland:
            r.pi_location_patterns = {normalized_rule(
                {{"scotland"}, {"uk", "united kingdom", "gb", "great britain"}, 0})};
            r.ai_location_patterns = conjunction_product(
                {"glasgow", "edinburgh", "scotland"},
                {"uk", "united kingdom", "gb", "great britain"});
            r.yes_hashtags = {"#yesbecause", "#yesscotland", "#yesscot",
                              "#voteyes"};
            r.no_hashtags = {"#nobecause", "#bettertogether", "#voteno",
                             "#nothanks"};
            break;
        case model::TerritoryKind::Custom:
            throw InputError("no built-in rules for custom territory '" +
                             territory.name + "'; load a rule file");
    }
    return r;
}

namespace {

MatchRule pattern_from_json(const nlohmann::json& j) {
    MatchRule r;
    if (j.is_string()) {
        r.required_terms = {j.get<std::string>()};
    } else {
        r.required_terms = j.value("required", std::vector<std::string>{});
        r.forbidden_terms = j.value("forbidden", std::vector<std::string>{});
        r.max_location_tokens = j.value("max_location_tokens", 0);
    }
    return normalized_rule(r);
}

}  // namespace

RuleSet load_rules(const std::filesystem::path& path,
                   const model::Territory& territory) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open rule file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    RuleSet r;
    r.territory = territory;
    try {
        for (const auto& p : j.value("pi_patterns", nlohmann::json::array()))
            r.pi_location_patterns.push_back(pattern_from_json(p));
        for (const auto& p : j.value("ai_patterns", nlohmann::json::array()))
            r.ai_location_patterns.push_back(pattern_from_json(p));
        r.ai_requires_conjunction = j.value("ai_requires_conjunction", true);
        auto cities = j.value("cities", std::vector<std::string>{});
        auto states = j.value("state_terms", std::vector<std::string>{});
        if (r.ai_requires_conjunction) {
            auto product = conjunction_product(cities, states);
            r.ai_location_patterns.insert(r.ai_location_patterns.end(),
                                          product.begin(), product.end());
        } else {
            for (const auto& c : cities)
                r.ai_location_patterns.push_back(normalized_rule({{c}, {}, 0}));
        }
        for (auto t : j.value("yes_hashtags", std::vector<std::string>{}))
            r.yes_hashtags.push_back(unicode_fold(t));
        for (auto t : j.value("no_hashtags", std::vector<std::string>{}))
            r.no_hashtags.push_back(unicode_fold(t));
    } catch (const std::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    auto problems = validate_ruleset(r);
    if (!problems.empty())
        throw InputError(path.string() + ": " + problems.front());
    return r;
}

std::vector<std::string> validate_ruleset(const RuleSet& rules) {
    std::vector<std::string> out;
    if (rules.pi_location_patterns.empty() &&
        rules.ai_location_patterns.empty() && rules.yes_hashtags.empty() &&
        rules.no_hashtags.empty())
        out.push_back("rule set has no patterns and no hashtags");
    for (const auto* list : {&rules.pi_location_patterns,
                             &rules.ai_location_patterns})
        for (const auto& p : *list)
            if (p.required_terms.empty())
                out.push_back("pattern with empty required_terms");
    for (const auto& y : rules.yes_hashtags)
        for (const auto& n : rules.no_hashtags)
            if (y == n) out.push_back("hashtag '" + y + "' in both lists");
    return out;
}

std::string normalize_location(const std::string& raw) {
    auto cps = decode_all(unicode_fold(raw));
    std::string out;
    bool pending_space = false;
    bool seen_word = false;
    for (char32_t cp : cps) {
        bool ws = cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' ||
                  cp == 0xA0;
        if (ws) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        utf8_encode(cp, out);
        if (is_word_cp(cp)) seen_word = true;
    }
    if (!seen_word) return "";
    // Strip surrounding punctuation: trim non-word code points at both ends.
    auto out_cps = decode_all(out);
    std::size_t first = 0, last = out_cps.size();
    while (first < last && !is_word_cp(out_cps[first])) ++first;
    while (last > first && !is_word_cp(out_cps[last - 1])) --last;
    std::string trimmed;
    for (std::size_t i = first; i < last; ++i) utf8_encode(out_cps[i], trimmed);
    return trimmed;
}

std::optional<model::Stance> label_by_location(const model::UserRecord& user,
                                               const RuleSet& rules) {
    std::string loc = normalize_location(user.location);
    if (loc.empty()) return std::nullopt;
    int n_tokens = count_tokens(loc);
    bool pi = false, ai = false;
    for (const auto& r : rules.pi_location_patterns)
        if (rule_matches(r, loc, n_tokens)) {
            pi = true;
            break;
        }
    for (const auto& r : rules.ai_location_patterns)
        if (rule_matches(r, loc, n_tokens)) {
            ai = true;
            break;
        }
    if (pi == ai) return std::nullopt;
    return pi ? model::Stance::PI : model::Stance::AI;
}

std::optional<model::Stance> label_by_hashtags(
    const std::vector<model::Tweet>& timeline, const RuleSet& rules) {
    if (rules.yes_hashtags.empty() && rules.no_hashtags.empty())
        throw InputError("rule set has no hashtag lists");
    std::int64_t yes = 0, no = 0;
    for (const auto& tweet : timeline) {
        for (const auto& tok : textfeat::tokenize(tweet.text)) {
            if (tok.empty() || tok[0] != '#') continue;
            for (const auto& y : rules.yes_hashtags)
                if (tok == y) ++yes;
            for (const auto& n : rules.no_hashtags)
                if (tok == n) ++no;
        }
    }
    if (yes > no) return model::Stance::PI;
    if (no > yes) return model::Stance::AI;
    return std::nullopt;
}

LabelReport label_dataset(model::Dataset& dataset, const RuleSet& rules) {
    LabelReport report;
    const bool use_hashtags =
        !rules.yes_hashtags.empty() || !rules.no_hashtags.empty();
    for (auto& [id, user] : dataset.users) {
        if (!user.label) {
            auto loc = label_by_location(user, rules);
            if (use_hashtags) {
                auto tags = label_by_hashtags(user.timeline, rules);
                if (loc && tags && *loc == *tags) user.label = loc;
            } else {
                user.label = loc;
            }
        }
        if (!user.label)
            ++report.unlabeled;
        else if (*user.label == model::Stance::PI)
            ++report.pi;
        else
            ++report.ai;
    }
    return report;
}

std::int64_t export_for_review(const model::Dataset& dataset,
                               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << "user_id,location,label\n";
    std::int64_t rows = 0;
    for (const auto& [id, user] : dataset.users) {
        out << csv_escape(id) << ',' << csv_escape(user.location) << ','
            << (user.label ? model::stance_name(*user.label) : "") << '\n';
        ++rows;
    }
    if (!out) throw InputError("write failed for " + path.string());
    return rows;
}

}  // namespace natid::labeler
