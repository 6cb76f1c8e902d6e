#ifndef NATID_FEATURES_HPP
#define NATID_FEATURES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "natid/graph.hpp"
#include "natid/model.hpp"
#include "natid/stats.hpp"
#include "natid/textfeat.hpp"

namespace natid::features {

enum class Family { Timeline, Interactions, Favourites, Network, Behavioral };

std::string family_name(Family f);
Family parse_family(const std::string& name);

// Row-per-user feature store. Embedding and behavioral families are dense;
// interaction and network families are CSR. Rows are the labeled users in
// sorted user_id order for every family, so families align fold-by-fold.
struct FeatureMatrix {
    Family family = Family::Behavioral;
    std::vector<std::string> row_ids;
    std::vector<std::string> columns;
    std::vector<model::Stance> labels;  // empty, or one per row

    bool sparse = false;
    std::vector<double> dense;  // row-major rows() x cols()

    std::vector<std::size_t> indptr;  // rows()+1
    std::vector<int> col_index;
    std::vector<double> values;

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return columns.size(); }
    double at(std::size_t r, std::size_t c) const;
    // Writes row r into buf (resized to cols(), zero-filled for CSR gaps).
    void row_dense(std::size_t r, std::vector<double>& buf) const;
};

// Mean over timeline tweets of the mean token embedding; empty timeline
// gives a zero row.
FeatureMatrix timeline_features(const model::Dataset& dataset,
                                const textfeat::EmbeddingTable& table);

// Same, over the favourites list.
FeatureMatrix favourite_features(const model::Dataset& dataset,
                                 const textfeat::EmbeddingTable& table);

// Count of the row user's interactions with each vocabulary target. The
// vocabulary is the q-percentile cutoff of global interaction-target counts,
// computed over the whole dataset by default (unlabeled users included); pass
// vocab_users to restrict the counting pass to those source users (strict
// per-fold mode for cross-validation).
FeatureMatrix interaction_features(
    const model::Dataset& dataset, double q,
    const graph::InteractionKinds& kinds = {},
    const std::vector<std::string>* vocab_users = nullptr);

// Binary: 1 iff the column user appears in the row user's followees or
// followers. Vocabulary percentile as above, over follow-list appearance
// counts; vocab_users restricts whose lists feed the counts.
FeatureMatrix network_features(
    const model::Dataset& dataset, double q,
    const std::vector<std::string>* vocab_users = nullptr);

constexpr int kBehavioralFeatureCount = 30;

extern const std::array<const char*, kBehavioralFeatureCount>
    kBehavioralFeatureNames;

struct BehavioralConfig {
    // Tweet-language codes counted by f28; empty means the territory's
    // local_languages.
    std::vector<std::string> local_tweet_languages;
    // What f17/f18 ("interactions within/across") count. Replies only by
    // default: retweets, mentions and favourites already have their own
    // within/across rows.
    graph::InteractionKinds general_interaction_kinds{false, true, false,
                                                      false};
    // Resources for f28 (language) and f29/f30 (sentiment); leaving either
    // null zeroes those features and bumps their missing counters.
    const std::vector<textfeat::LanguageProfile>* profiles = nullptr;
    const textfeat::SentimentLexicon* lexicon = nullptr;
};

// The 30-column behavioral matrix, one row per labeled user. missing, if
// given, receives per-feature counts of rows whose inputs were unavailable
// (those cells are 0).
FeatureMatrix behavioral_features(
    const model::Dataset& dataset, const BehavioralConfig& config = {},
    std::array<std::int64_t, kBehavioralFeatureCount>* missing = nullptr);

struct FeatureComparison {
    int feature_id = 0;  // 1-based, row order of the behavioral matrix
    std::string name;
    double pi_mean = 0.0;
    double ai_mean = 0.0;
    stats::TestResult test;  // Welch's t; direction GroupA means PI
};

// Welch's t-test per behavioral feature, PI sample vs AI sample; exactly one
// entry per feature in order.
std::vector<FeatureComparison> group_comparison_report(
    const FeatureMatrix& behavioral);

// "**" below 0.01, "*" below 0.05, "" otherwise.
std::string significance_stars(double p_value);

// Dense matrices persist as CSV (row_id + one column per descriptor), sparse
// ones as "row,col,value" triplets; both get a JSON sidecar
// (<path>.meta.json) carrying family, columns, row ids and labels.
void save_feature_matrix(const FeatureMatrix& m,
                         const std::filesystem::path& csv_path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& csv_path);

FeatureMatrix select_rows(const FeatureMatrix& m,
                          const std::vector<int>& row_indices);

}  // namespace natid::features

#endif
