#ifndef NATID_SYNTH_HPP
#define NATID_SYNTH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "natid/features.hpp"
#include "natid/ingest.hpp"
#include "natid/model.hpp"
#include "natid/textfeat.hpp"

namespace natid::synth {

// Planted-partition generator. homophily is the probability a follow edge
// stays within-group; token_overlap is the shared mass between the two
// groups' token distributions (1 = identical text); group_contrast scales
// every group-conditional gap in profile fields, interaction rates and
// sentiment (0 = groups behave identically apart from the graph and text);
// pi_degree_boost multiplies the rate at which PI users source follow edges.
struct SynthConfig {
    model::TerritoryKind territory = model::TerritoryKind::Catalonia;
    int n_users = 1000;
    double pi_fraction = 0.5;
    double homophily = 0.8;
    double mean_degree = 10.0;
    int tweets_per_user = 20;
    int token_vocab_per_group = 200;
    double token_overlap = 0.5;
    std::uint64_t seed = 1;
    double group_contrast = 1.0;
    double pi_degree_boost = 1.0;
};

void validate(const SynthConfig& config);

// Deterministic given config (byte-identical datasets). Labels come from the
// partition; locations are decorative strings that the territory's location
// rules would label the same way for ~90% of users.
model::Dataset generate(const SynthConfig& config);

// Trigram profiles for the territory's local and state language, trained on
// the same token pools generate() writes tweets from.
std::vector<textfeat::LanguageProfile> language_profiles(
    const SynthConfig& config);

// The four sentiment tokens generate() laces interaction tweets with.
textfeat::SentimentLexicon sentiment_lexicon(const SynthConfig& config);

// Expected Welch direction per behavioral feature (index 0 = f1). nullopt
// where the config plants no difference: f26 needs pi_degree_boost != 1,
// f27 needs pi_fraction != 0.5, and the interaction/sentiment features need
// group_contrast > 0.
std::array<std::optional<model::Stance>, features::kBehavioralFeatureCount>
planted_directions(const SynthConfig& config);

// generate() + save_dataset into out_dir, plus profiles.tsv, lexicon.tsv and
// provenance.json recording the config.
ingest::Manifest emit(const SynthConfig& config,
                      const std::filesystem::path& out_dir);

}  // namespace natid::synth

#endif
