#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "natid/classify.hpp"
#include "natid/features.hpp"
#include "natid/util.hpp"

using namespace natid;
using namespace natid::classify;
using features::FeatureMatrix;
using model::Stance;
namespace fs = std::filesystem;

namespace {

FeatureMatrix dense_matrix(std::vector<std::vector<double>> rows,
                           std::vector<Stance> labels,
                           features::Family family = features::Family::Behavioral) {
    FeatureMatrix m;
    m.family = family;
    m.sparse = false;
    m.labels = std::move(labels);
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols; ++c)
        m.columns.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        m.row_ids.push_back("r" + std::to_string(r));
        for (double v : rows[r]) m.dense.push_back(v);
    }
    return m;
}

double accuracy(const std::vector<Stance>& pred,
                const std::vector<Stance>& truth) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("stratified folds are exact when classes divide evenly") {
    std::vector<Stance> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(Stance::PI);
    for (int i = 0; i < 40; ++i) labels.push_back(Stance::AI);
    const auto folds = stratified_kfold(labels, 10, 1);
    REQUIRE(folds.size() == 10);
    std::set<int> seen;
    for (const auto& fold : folds) {
        CHECK(fold.size() == 10);
        int pi = 0;
        for (int idx : fold) {
            seen.insert(idx);
            if (labels[static_cast<std::size_t>(idx)] == Stance::PI) ++pi;
        }
        CHECK(pi == 6);
        CHECK(std::is_sorted(fold.begin(), fold.end()));
    }
    CHECK(seen.size() == 100);
}

TEST_CASE("stratified folds stay within one of proportionality") {
    std::vector<Stance> labels;
    for (int i = 0; i < 13; ++i) labels.push_back(Stance::PI);
    for (int i = 0; i < 7; ++i) labels.push_back(Stance::AI);
    const auto folds = stratified_kfold(labels, 5, 9);
    std::set<int> seen;
    for (const auto& fold : folds) {
        int pi = 0, ai = 0;
        for (int idx : fold) {
            seen.insert(idx);
            (labels[static_cast<std::size_t>(idx)] == Stance::PI ? pi : ai)++;
        }
        CHECK(pi >= 2);
        CHECK(pi <= 3);
        CHECK(ai >= 1);
        CHECK(ai <= 2);
    }
    CHECK(seen.size() == 20);

    CHECK_THROWS_AS(stratified_kfold(labels, 8, 1), InputError);  // AI has 7
    CHECK_THROWS_AS(stratified_kfold(labels, 1, 1), InputError);
}

TEST_CASE("gaussian naive bayes is invariant under row duplication") {
    const std::vector<std::vector<double>> train_rows = {
        {1.0, 5.0}, {1.2, 4.5}, {0.9, 5.2}, {3.0, 1.0}, {3.2, 0.8}, {2.8, 1.1}};
    const std::vector<Stance> train_labels = {Stance::PI, Stance::PI, Stance::PI,
                                              Stance::AI, Stance::AI, Stance::AI};
    auto doubled_rows = train_rows;
    doubled_rows.insert(doubled_rows.end(), train_rows.begin(), train_rows.end());
    auto doubled_labels = train_labels;
    doubled_labels.insert(doubled_labels.end(), train_labels.begin(),
                          train_labels.end());

    Hyperparams hp;
    hp.nb_variant = NbVariant::Gaussian;
    const auto m1 = train(ClassifierKind::NaiveBayes,
                          dense_matrix(train_rows, train_labels), hp, 1);
    const auto m2 = train(ClassifierKind::NaiveBayes,
                          dense_matrix(doubled_rows, doubled_labels), hp, 1);

    const auto test = dense_matrix(
        {{1.1, 4.9}, {3.1, 0.9}, {2.0, 2.0}, {0.5, 6.0}, {4.0, 0.2}},
        {Stance::PI, Stance::AI, Stance::PI, Stance::PI, Stance::AI});
    CHECK(predict(m1, test) == predict(m2, test));
    // sufficient statistics agree up to summation-order rounding
    for (int c = 0; c < 2; ++c) {
        for (std::size_t j = 0; j < m1.nb_mean[c].size(); ++j) {
            CHECK(m1.nb_mean[c][j] ==
                  doctest::Approx(m2.nb_mean[c][j]).epsilon(1e-12));
            CHECK(m1.nb_var[c][j] ==
                  doctest::Approx(m2.nb_var[c][j]).epsilon(1e-9));
        }
    }
}

TEST_CASE("bernoulli naive bayes matches the hand-computed posterior") {
    // P(f0=1|PI) = 3/4, P(f0=1|AI) = 1/4, P(f1=1|either) = 1/2, priors equal
    const auto train_m = dense_matrix(
        {{1, 0}, {1, 1}, {0, 0}, {0, 1}},
        {Stance::PI, Stance::PI, Stance::AI, Stance::AI});
    Hyperparams hp;
    hp.nb_variant = NbVariant::Bernoulli;
    const auto model = train(ClassifierKind::NaiveBayes, train_m, hp, 1);

    const auto test =
        dense_matrix({{1, 0}, {0, 1}, {1, 1}, {0, 0}},
                     {Stance::PI, Stance::AI, Stance::PI, Stance::AI});
    const auto pred = predict(model, test);
    CHECK(pred == std::vector<Stance>{Stance::PI, Stance::AI, Stance::PI,
                                      Stance::AI});
    CHECK(model.nb_log_p1[0][0] == doctest::Approx(std::log(0.75)));
    CHECK(model.nb_log_p1[1][0] == doctest::Approx(std::log(0.25)));
    CHECK(model.nb_log_p1[0][1] == doctest::Approx(std::log(0.5)));
}

TEST_CASE("auto naive bayes picks bernoulli only for the network family") {
    const std::vector<std::vector<double>> rows = {{1, 0}, {0, 1}, {1, 1}, {0, 0}};
    const std::vector<Stance> labels = {Stance::PI, Stance::PI, Stance::AI,
                                        Stance::AI};
    const auto net = train(ClassifierKind::NaiveBayes,
                           dense_matrix(rows, labels, features::Family::Network),
                           {}, 1);
    CHECK(net.nb_bernoulli);
    const auto beh = train(ClassifierKind::NaiveBayes,
                           dense_matrix(rows, labels), {}, 1);
    CHECK_FALSE(beh.nb_bernoulli);
}

TEST_CASE("single tree without bootstrap reproduces training labels") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        rows.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        labels.push_back(rng.below(2) ? Stance::AI : Stance::PI);
    }
    const auto m = dense_matrix(rows, labels);
    Hyperparams hp;
    hp.rf_trees = 1;
    hp.rf_max_depth = 0;  // unlimited
    hp.rf_bootstrap = false;
    hp.rf_features_per_split = 3;
    const auto model = train(ClassifierKind::RandomForest, m, hp, 5);
    CHECK(predict(model, m) == labels);
}

TEST_CASE("random forest separates an easy problem") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(23);
    for (int i = 0; i < 60; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.uniform() + (pi ? 1.5 : 0.0), rng.uniform()});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    Hyperparams hp;
    hp.rf_trees = 25;
    const auto model = train(ClassifierKind::RandomForest, m, hp, 5);
    CHECK(accuracy(predict(model, m), m.labels) > 0.95);
}

TEST_CASE("linear svm separates linearly separable data") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(31);
    for (int i = 0; i < 80; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.normal(pi ? 2.0 : -2.0, 0.3), rng.normal(0.0, 1.0)});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    const auto model = train(ClassifierKind::LinearSVM, m, {}, 2);
    CHECK(accuracy(predict(model, m), m.labels) > 0.95);
    CHECK(model.weights[0] > 0.0);  // PI side is positive on feature 0
}

TEST_CASE("maxent cannot fit xor but fits a linear rule") {
    const auto xor_m = dense_matrix(
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
        {Stance::PI, Stance::AI, Stance::AI, Stance::PI});
    const auto xor_model = train(ClassifierKind::MaxEnt, xor_m, {}, 1);
    CHECK(accuracy(predict(xor_model, xor_m), xor_m.labels) <= 0.75);

    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(41);
    for (int i = 0; i < 60; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.normal(pi ? 1.0 : -1.0, 0.4)});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    const auto model = train(ClassifierKind::MaxEnt, m, {}, 1);
    CHECK(accuracy(predict(model, m), m.labels) > 0.95);
}

TEST_CASE("all four classifiers survive a save/load round-trip") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(53);
    for (int i = 0; i < 30; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.normal(pi ? 1.0 : -1.0, 0.5),
                        rng.normal(pi ? -0.5 : 0.5, 0.5), rng.uniform()});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    for (const auto kind :
         {ClassifierKind::NaiveBayes, ClassifierKind::LinearSVM,
          ClassifierKind::RandomForest, ClassifierKind::MaxEnt}) {
        const auto model = train(kind, m, {}, 7);
        const auto path = fs::temp_directory_path() / "natid_model_test.json";
        save_model(model, path);
        const auto loaded = load_model(path);
        CHECK(loaded.kind == model.kind);
        CHECK(loaded.column_count == model.column_count);
        CHECK(predict(loaded, m) == predict(model, m));
        fs::remove(path);
    }
}

TEST_CASE("predict rejects width mismatches and training needs both classes") {
    const auto m = dense_matrix({{1, 2}, {3, 4}}, {Stance::PI, Stance::AI});
    const auto model = train(ClassifierKind::MaxEnt, m, {}, 1);
    const auto narrow = dense_matrix({{1.0}}, {Stance::PI});
    CHECK_THROWS_AS(predict(model, narrow), InputError);

    const auto one_class = dense_matrix({{1, 2}, {3, 4}},
                                        {Stance::PI, Stance::PI});
    CHECK_THROWS_AS(train(ClassifierKind::MaxEnt, one_class, {}, 1), InputError);
}

TEST_CASE("cross-validation micro accuracy pools fold counts") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(61);
    for (int i = 0; i < 50; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.normal(pi ? 1.2 : -1.2, 0.6)});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    const auto report = cross_validate(m, ClassifierKind::MaxEnt, 5, 3);
    REQUIRE(report.fold_counts.size() == 5);
    std::int64_t correct = 0, total = 0;
    for (const auto& [c, t] : report.fold_counts) {
        correct += c;
        total += t;
    }
    CHECK(total == 50);
    CHECK(report.micro_accuracy ==
          static_cast<double>(correct) / static_cast<double>(total));
    CHECK(report.micro_accuracy > 0.9);
    CHECK(report.k == 5);
}

TEST_CASE("builder-based cross-validation matches the plain harness") {
    std::vector<std::vector<double>> rows;
    std::vector<Stance> labels;
    Rng rng(71);
    for (int i = 0; i < 40; ++i) {
        const bool pi = i % 2 == 0;
        rows.push_back({rng.normal(pi ? 1.0 : -1.0, 0.5)});
        labels.push_back(pi ? Stance::PI : Stance::AI);
    }
    const auto m = dense_matrix(rows, labels);
    const auto plain = cross_validate(m, ClassifierKind::MaxEnt, 4, 9);
    const auto built = cross_validate_with_builder(
        labels, [&](const std::vector<int>&) { return m; },
        ClassifierKind::MaxEnt, 4, 9);
    CHECK(plain.micro_accuracy == built.micro_accuracy);
    CHECK(plain.fold_counts == built.fold_counts);
}
