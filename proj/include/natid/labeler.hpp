#ifndef NATID_LABELER_HPP
#define NATID_LABELER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "natid/model.hpp"

namespace natid::labeler {

// One location pattern. Terms are matched against the normalized location as
// whole-token substrings: "eh" matches "bilbo, eh" but not "ehem".
struct MatchRule {
    std::vector<std::string> required_terms;   // all must appear
    std::vector<std::string> forbidden_terms;  // none may appear
    // Rule only applies when the location has at most this many word tokens
    // (0 = no limit). Used to keep the bare acronym rules from firing inside
    // long location strings.
    int max_location_tokens = 0;
};

struct RuleSet {
    model::Territory territory;
    std::vector<MatchRule> pi_location_patterns;
    std::vector<MatchRule> ai_location_patterns;
    // True when the AI side was built as city/region × state-term
    // conjunctions (all built-ins).
    bool ai_requires_conjunction = true;
    std::vector<std::string> yes_hashtags;  // lowercase, "#" included
    std::vector<std::string> no_hashtags;
};

struct LabelReport {
    std::int64_t pi = 0;
    std::int64_t ai = 0;
    std::int64_t unlabeled = 0;
};

// Compiled-in rule sets for the three built-in territories. The same rules
// ship as editable JSON under data/rules/ for use with load_rules.
// Custom territories have no built-in rules and raise InputError.
RuleSet builtin_rules(const model::Territory& territory);

// Rule file: JSON object with keys pi_patterns, ai_patterns, cities,
// state_terms, yes_hashtags, no_hashtags (and optional
// ai_requires_conjunction, default true). Patterns are either a plain string
// (one required term) or {"required": [...], "forbidden": [...],
// "max_location_tokens": n}. The AI side becomes ai_patterns plus the
// cities × state_terms conjunction product.
RuleSet load_rules(const std::filesystem::path& path,
                   const model::Territory& territory);

// Empty list iff the rule set is usable: some evidence source non-empty,
// every pattern has required terms, hashtag sets disjoint.
std::vector<std::string> validate_ruleset(const RuleSet& rules);

// Lowercase, canonically composed, whitespace collapsed, surrounding
// punctuation stripped. Diacritics are preserved: "España" and "Espanya"
// are different evidence.
std::string normalize_location(const std::string& raw);

std::optional<model::Stance> label_by_location(const model::UserRecord& user,
                                               const RuleSet& rules);

// Strict majority of yes vs no hashtag occurrences across the timeline;
// tie or zero gives no label. Requires at least one non-empty hashtag list.
std::optional<model::Stance> label_by_hashtags(
    const std::vector<model::Tweet>& timeline, const RuleSet& rules);

// Labels every unlabeled user in place. With hashtag rules present the
// location and hashtag verdicts must agree (disagreement or missing evidence
// abstains); manual labels are never overwritten. Idempotent.
LabelReport label_dataset(model::Dataset& dataset, const RuleSet& rules);

// CSV "user_id,location,label" over all users sorted by user_id, label blank
// for abstentions so they can be audited too. Returns rows written.
std::int64_t export_for_review(const model::Dataset& dataset,
                               const std::filesystem::path& path);

}  // namespace natid::labeler

#endif
