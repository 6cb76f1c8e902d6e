#ifndef NATID_TEXTFEAT_HPP
#define NATID_TEXTFEAT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace natid::textfeat {

// Lowercased word tokens; URLs collapse to "<url>", @-mentions to
// "<mention>", hashtags keep their "#". Everything else splits on non-word
// characters ("don't" -> "don", "t").
std::vector<std::string> tokenize(const std::string& text);

struct EmbeddingTable {
    int dimension = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
    // One free-form line recorded in the file header ("#% ..."); training
    // writes its hyperparameters here.
    std::string meta;
};

struct SkipgramParams {
    int dimension = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    int min_count = 2;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;
};

// Skip-gram with negative sampling (unigram^0.75 noise, linear learning-rate
// decay), single-threaded so a seed fully determines the result.
EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                              const SkipgramParams& params);

// Text format: optional "#% ..." header line, then "token v1 ... vd" per
// line. Duplicate tokens keep the last occurrence (counted if a counter is
// passed); inconsistent dimensions raise InputError citing the line.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::int64_t* duplicate_tokens = nullptr);
void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path);

// Mean of the vectors of in-vocabulary tokens; empty or all-OOV gives a zero
// vector. Tokens are summed in sorted order, making the result bit-exact
// under permutation.
std::vector<double> embed_text(const std::vector<std::string>& tokens,
                               const EmbeddingTable& table);

struct LanguageProfile {
    std::string language;
    std::vector<std::string> trigrams;  // ranked, most frequent first
};

// Character-trigram profile (space-padded tokens) of a corpus, rank-ordered,
// truncated to max_trigrams.
LanguageProfile build_language_profile(const std::vector<std::string>& texts,
                                       const std::string& language,
                                       std::size_t max_trigrams = 300);

// Rank-order (out-of-place) distance to each profile, nearest wins; ties go
// to the earlier profile. Texts under 10 code points return "und".
std::string identify_language(const std::string& text,
                              const std::vector<LanguageProfile>& profiles);

// "lang<TAB>trigram<TAB>rank" lines.
std::vector<LanguageProfile> load_language_profiles(
    const std::filesystem::path& path);
void save_language_profiles(const std::vector<LanguageProfile>& profiles,
                            const std::filesystem::path& path);

struct SentimentLexicon {
    std::string language;
    std::unordered_map<std::string, double> polarity;  // values in [-1,1]
};

enum class SentimentClass { Neg, Neu, Pos };

struct SentimentResult {
    double score = 0.0;
    SentimentClass cls = SentimentClass::Neu;
};

// Sum of polarities over matched tokens (every occurrence counts); class by
// the sign of the sum.
SentimentResult sentiment_score(const std::vector<std::string>& tokens,
                                const SentimentLexicon& lexicon);

// "token<TAB>polarity" lines.
SentimentLexicon load_lexicon(const std::filesystem::path& path,
                              const std::string& language = "");
void save_lexicon(const SentimentLexicon& lexicon,
                  const std::filesystem::path& path);

}  // namespace natid::textfeat

#endif
