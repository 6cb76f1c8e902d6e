#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "natid/graph.hpp"
#include "natid/ingest.hpp"
#include "natid/synth.hpp"
#include "natid/util.hpp"

using namespace natid;
using model::Stance;
namespace fs = std::filesystem;

TEST_CASE("generation is deterministic") {
    synth::SynthConfig cfg;
    cfg.n_users = 60;
    cfg.mean_degree = 6.0;
    cfg.tweets_per_user = 5;
    cfg.token_vocab_per_group = 40;
    cfg.seed = 11;
    const auto a = synth::generate(cfg);
    const auto b = synth::generate(cfg);
    CHECK(a == b);
    cfg.seed = 12;
    CHECK_FALSE(synth::generate(cfg) == a);
}

TEST_CASE("label proportions match pi_fraction within one user") {
    synth::SynthConfig cfg;
    cfg.n_users = 1000;
    cfg.pi_fraction = 0.72;
    cfg.tweets_per_user = 0;
    cfg.mean_degree = 2.0;
    const auto ds = synth::generate(cfg);
    std::int64_t pi = 0;
    for (const auto& [id, u] : ds.users)
        if (u.label == Stance::PI) ++pi;
    CHECK(std::abs(static_cast<double>(pi) - 720.0) <= 1.0);
}

TEST_CASE("h=1 yields perfectly assortative follow graphs") {
    synth::SynthConfig cfg;
    cfg.n_users = 200;
    cfg.homophily = 1.0;
    cfg.mean_degree = 8.0;
    cfg.tweets_per_user = 0;
    const auto ds = synth::generate(cfg);
    const auto g = graph::build_follow_graph(ds);
    CHECK(graph::nominal_assortativity(g) == 1.0);
}

TEST_CASE("assortativity is monotone in h and near zero at h=0.5") {
    double previous = -2.0;
    for (const double h : {0.2, 0.5, 0.8}) {
        double mean_r = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            synth::SynthConfig cfg;
            cfg.n_users = 600;
            cfg.homophily = h;
            cfg.mean_degree = 10.0;
            cfg.tweets_per_user = 0;
            cfg.seed = seed;
            const auto g = graph::build_follow_graph(synth::generate(cfg));
            mean_r += graph::nominal_assortativity(g) / 5.0;
        }
        if (h == 0.5) CHECK(std::fabs(mean_r) < 0.05);
        CHECK(mean_r > previous);
        previous = mean_r;
    }
}

TEST_CASE("edge count and degree match the requested mean") {
    synth::SynthConfig cfg;
    cfg.n_users = 400;
    cfg.mean_degree = 9.0;
    cfg.tweets_per_user = 0;
    const auto ds = synth::generate(cfg);
    std::int64_t directed_edges = 0;
    for (const auto& [id, u] : ds.users)
        directed_edges += static_cast<std::int64_t>(u.followees.size());
    CHECK(directed_edges == 1800);  // n * mean_degree / 2
}

TEST_CASE("planted locations agree with the labels when rules fire") {
    synth::SynthConfig cfg;
    cfg.n_users = 120;
    cfg.tweets_per_user = 0;
    cfg.mean_degree = 2.0;
    const auto ds = synth::generate(cfg);
    int with_location = 0;
    for (const auto& [id, u] : ds.users)
        if (!u.location.empty()) ++with_location;
    // ~90% get a stance-consistent location string
    CHECK(with_location > 80);
    CHECK(with_location < 120);
}

TEST_CASE("infeasible or invalid configs are rejected") {
    synth::SynthConfig cfg;
    cfg.n_users = 10;
    cfg.mean_degree = 20.0;
    CHECK_THROWS_AS(synth::generate(cfg), InputError);
    cfg.mean_degree = 2.0;
    cfg.pi_fraction = 0.0;
    CHECK_THROWS_AS(synth::generate(cfg), InputError);
    cfg.pi_fraction = 0.5;
    cfg.token_overlap = 1.5;
    CHECK_THROWS_AS(synth::generate(cfg), InputError);
    cfg.token_overlap = 0.5;
    cfg.group_contrast = -0.1;
    CHECK_THROWS_AS(synth::generate(cfg), InputError);
}

TEST_CASE("emitted dataset carries profiles, lexicon and provenance") {
    synth::SynthConfig cfg;
    cfg.n_users = 30;
    cfg.mean_degree = 3.0;
    cfg.tweets_per_user = 3;
    cfg.token_vocab_per_group = 30;
    const auto dir = fs::temp_directory_path() / "natid_synth_emit";
    fs::remove_all(dir);
    fs::create_directories(dir);
    synth::emit(cfg, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "profiles.tsv"));
    CHECK(fs::exists(dir / "lexicon.tsv"));
    CHECK(fs::exists(dir / "provenance.json"));
    const auto loaded = ingest::load_directory(dir);
    CHECK(loaded.dataset.users.size() == 30);
    fs::remove_all(dir);
}

TEST_CASE("planted directions cover all 30 features at full contrast") {
    synth::SynthConfig cfg;
    cfg.n_users = 2000;
    cfg.pi_fraction = 0.4;
    cfg.homophily = 0.7;
    cfg.mean_degree = 12.0;
    cfg.group_contrast = 1.0;
    cfg.pi_degree_boost = 1.4;
    const auto dirs = synth::planted_directions(cfg);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        CAPTURE(j);
        CHECK(dirs[j].has_value());
    }
    // tweet volume, verified share and local-language share lean PI
    CHECK(dirs[0] == Stance::PI);
    CHECK(dirs[10] == Stance::PI);
    CHECK(dirs[27] == Stance::PI);
    // account age, state-TLD profile URLs and cross-negativity lean AI
    CHECK(dirs[3] == Stance::AI);
    CHECK(dirs[13] == Stance::AI);
    CHECK(dirs[29] == Stance::AI);

    // zero contrast with a symmetric graph plants nothing in the profile rows
    synth::SynthConfig flat;
    flat.group_contrast = 0.0;
    flat.pi_degree_boost = 1.0;
    const auto none = synth::planted_directions(flat);
    CHECK_FALSE(none[3].has_value());
    CHECK_FALSE(none[10].has_value());
    CHECK_FALSE(none[28].has_value());
}
