#ifndef NATID_CLASSIFY_HPP
#define NATID_CLASSIFY_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "natid/features.hpp"
#include "natid/model.hpp"

namespace natid::classify {

enum class ClassifierKind { NaiveBayes, LinearSVM, RandomForest, MaxEnt };

// Report abbreviations: NB, SV, RF, ME.
std::string kind_name(ClassifierKind kind);
ClassifierKind parse_kind(const std::string& name);

enum class NbVariant {
    Auto,  // Bernoulli on the binary Network family, Gaussian elsewhere
    Gaussian,
    Bernoulli,
};

struct Hyperparams {
    NbVariant nb_variant = NbVariant::Auto;
    double nb_alpha = 1.0;  // Laplace smoothing (Bernoulli)
    double svm_lambda = 1e-4;
    int svm_epochs = 20;
    int rf_trees = 100;
    int rf_max_depth = 16;  // <= 0 means unlimited
    int rf_features_per_split = 0;  // 0 means round(sqrt(d))
    bool rf_bootstrap = true;
    double maxent_l2 = 1.0;
    int maxent_max_iters = 500;
    double maxent_tol = 1e-6;  // gradient-norm stop
};

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf = -1;  // -1 internal, else 0 = PI, 1 = AI
};

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::NaiveBayes;
    int column_count = 0;
    std::uint64_t training_seed = 0;
    Hyperparams hyper;

    // Naive Bayes (index 0 = PI, 1 = AI)
    bool nb_bernoulli = false;
    double log_prior[2] = {0.0, 0.0};
    std::vector<double> nb_mean[2];
    std::vector<double> nb_var[2];
    std::vector<double> nb_log_p1[2];   // log P(x_j = 1 | class)
    std::vector<double> nb_log_p0[2];   // log P(x_j = 0 | class)
    double nb_log_p0_sum[2] = {0.0, 0.0};

    // Linear models (SVM, MaxEnt): PI scores positive
    std::vector<double> weights;
    double bias = 0.0;

    // Random forest
    std::vector<std::vector<TreeNode>> trees;
};

// Deterministic given (matrix, hyperparams, seed). Requires both classes in
// the training labels.
TrainedModel train(ClassifierKind kind, const features::FeatureMatrix& m,
                   const Hyperparams& hp, std::uint64_t seed);

// One stance per row; matrix width must equal model.column_count.
std::vector<model::Stance> predict(const TrainedModel& model,
                                   const features::FeatureMatrix& m);

// JSON payload, schema natid/model/v1.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// k disjoint folds covering all indices; per-fold class counts within one of
// perfect proportionality. Errors if any class has fewer than k members.
std::vector<std::vector<int>> stratified_kfold(
    const std::vector<model::Stance>& labels, int k, std::uint64_t seed);

struct CvReport {
    std::string territory;
    features::Family family = features::Family::Behavioral;
    ClassifierKind kind = ClassifierKind::NaiveBayes;
    int k = 0;
    std::uint64_t seed = 0;
    Hyperparams hyper;
    std::vector<std::pair<std::int64_t, std::int64_t>> fold_counts;
    double micro_accuracy = 0.0;  // sum(correct) / sum(total), pooled
};

CvReport cross_validate(const features::FeatureMatrix& m, ClassifierKind kind,
                        int k = 10, std::uint64_t seed = 1,
                        const Hyperparams& hp = {});

// Same harness, but each fold's matrix comes from the callback given that
// fold's training rows (for strict per-fold feature vocabularies). The
// callback must return a matrix over the same full row universe as labels.
CvReport cross_validate_with_builder(
    const std::vector<model::Stance>& labels,
    const std::function<features::FeatureMatrix(const std::vector<int>&)>&
        build,
    ClassifierKind kind, int k = 10, std::uint64_t seed = 1,
    const Hyperparams& hp = {});

}  // namespace natid::classify

#endif
