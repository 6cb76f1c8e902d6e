#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "natid/textfeat.hpp"
#include "natid/util.hpp"

using namespace natid;
using namespace natid::textfeat;
namespace fs = std::filesystem;

TEST_CASE("tokenize lowercases and collapses urls, mentions, hashtags") {
    CHECK(tokenize("Hello WORLD http://x.cat @bob") ==
          std::vector<std::string>{"hello", "world", "<url>", "<mention>"});
    CHECK(tokenize("#VoteYes!") == std::vector<std::string>{"#voteyes"});
    CHECK(tokenize("don't stop") ==
          std::vector<std::string>{"don", "t", "stop"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("visca Catalunya «lliure»") ==
          std::vector<std::string>{"visca", "catalunya", "lliure"});
}

TEST_CASE("embed_text is permutation invariant and zero on OOV") {
    EmbeddingTable table;
    table.dimension = 3;
    table.vectors["a"] = {1.0, 0.5, -0.25};
    table.vectors["b"] = {0.125, 2.0, 4.0};
    table.vectors["c"] = {-3.0, 0.0625, 0.75};
    const auto v1 = embed_text({"a", "b", "c"}, table);
    const auto v2 = embed_text({"c", "a", "b"}, table);
    CHECK(v1 == v2);  // bit-exact
    const auto zero = embed_text({"missing"}, table);
    CHECK(zero == std::vector<double>{0.0, 0.0, 0.0});
    const auto mixed = embed_text({"a", "missing"}, table);
    CHECK(mixed == std::vector<double>{1.0, 0.5, -0.25});
}

TEST_CASE("skipgram separates two never-cooccurring token groups") {
    std::vector<std::vector<std::string>> corpus;
    const std::vector<std::string> left = {"alpha", "beta", "gamma", "delta"};
    const std::vector<std::string> right = {"uno", "dos", "tres", "cuatro"};
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        const auto& pool = i % 2 ? left : right;
        std::vector<std::string> sentence;
        for (int k = 0; k < 8; ++k)
            sentence.push_back(pool[rng.below(pool.size())]);
        corpus.push_back(std::move(sentence));
    }
    SkipgramParams params;
    params.dimension = 16;
    params.window = 3;
    params.epochs = 3;
    params.min_count = 1;
    params.seed = 5;
    const auto table = train_skipgram(corpus, params);
    REQUIRE(table.vectors.size() == 8);

    const auto cosine = [&](const std::string& a, const std::string& b) {
        const auto& va = table.vectors.at(a);
        const auto& vb = table.vectors.at(b);
        double dot = 0, na = 0, nb = 0;
        for (int d = 0; d < table.dimension; ++d) {
            dot += va[d] * vb[d];
            na += va[d] * va[d];
            nb += vb[d] * vb[d];
        }
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };
    double within = 0, cross = 0;
    int nw = 0, nc = 0;
    for (const auto& group : {left, right})
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                within += cosine(group[i], group[j]);
                ++nw;
            }
    for (const auto& a : left)
        for (const auto& b : right) {
            cross += cosine(a, b);
            ++nc;
        }
    CHECK(within / nw > cross / nc);
}

TEST_CASE("skipgram is deterministic for a fixed seed") {
    std::vector<std::vector<std::string>> corpus = {
        {"a", "b", "c", "a", "b"}, {"c", "a", "b", "c", "a"},
        {"b", "c", "a", "b", "c"}};
    SkipgramParams params;
    params.dimension = 8;
    params.epochs = 2;
    params.min_count = 1;
    const auto t1 = train_skipgram(corpus, params);
    const auto t2 = train_skipgram(corpus, params);
    REQUIRE(t1.vectors.size() == t2.vectors.size());
    for (const auto& [token, vec] : t1.vectors)
        CHECK(t2.vectors.at(token) == vec);
}

TEST_CASE("embeddings save and load round-trip") {
    EmbeddingTable table;
    table.dimension = 2;
    table.meta = "test table";
    table.vectors["x"] = {0.5, -1.25};
    table.vectors["y"] = {3.0, 0.0078125};
    const auto path = fs::temp_directory_path() / "natid_emb_test.txt";
    save_embeddings(table, path);
    const auto loaded = load_embeddings(path);
    CHECK(loaded.dimension == 2);
    CHECK(loaded.vectors.at("x") == table.vectors.at("x"));
    CHECK(loaded.vectors.at("y") == table.vectors.at("y"));
    fs::remove(path);
}

TEST_CASE("language identification picks the nearer trigram profile") {
    const std::vector<std::string> cat_texts = {
        "els carrers de la ciutat", "la gent camina pels carrers",
        "una ciutat oberta i clara", "els dies passen lentament"};
    const std::vector<std::string> es_texts = {
        "las calles de la ciudad", "la gente camina por las calles",
        "una ciudad abierta y clara", "los dias pasan lentamente"};
    const std::vector<LanguageProfile> profiles = {
        build_language_profile(cat_texts, "ca"),
        build_language_profile(es_texts, "es")};
    CHECK(identify_language("els dies a la ciutat oberta", profiles) == "ca");
    CHECK(identify_language("los dias en la ciudad abierta", profiles) == "es");
    CHECK(identify_language("x", profiles) == "und");
}

TEST_CASE("language profiles save and load round-trip") {
    const std::vector<LanguageProfile> profiles = {
        {"aa", {"_ab", "ba_", "abc"}}, {"bb", {"_xy", "yz_"}}};
    const auto path = fs::temp_directory_path() / "natid_profiles_test.tsv";
    save_language_profiles(profiles, path);
    const auto loaded = load_language_profiles(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].language == "aa");
    CHECK(loaded[0].trigrams == profiles[0].trigrams);
    CHECK(loaded[1].trigrams == profiles[1].trigrams);
    fs::remove(path);
}

TEST_CASE("sentiment score sums matched polarities") {
    SentimentLexicon lex;
    lex.polarity = {{"good", 1.0}, {"bad", -1.0}, {"fine", 0.5}};
    const auto pos = sentiment_score({"good", "good", "bad"}, lex);
    CHECK(pos.score == doctest::Approx(1.0));
    CHECK(pos.cls == SentimentClass::Pos);
    const auto neg = sentiment_score({"bad"}, lex);
    CHECK(neg.cls == SentimentClass::Neg);
    const auto neu = sentiment_score({"good", "bad"}, lex);
    CHECK(neu.cls == SentimentClass::Neu);
    const auto none = sentiment_score({"unknown"}, lex);
    CHECK(none.cls == SentimentClass::Neu);
}
