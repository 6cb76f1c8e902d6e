#include "natid/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "natid/util.hpp"

namespace natid::classify {

using nlohmann::json;

std::string kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::NaiveBayes: return "NB";
        case ClassifierKind::LinearSVM: return "SV";
        case ClassifierKind::RandomForest: return "RF";
        case ClassifierKind::MaxEnt: return "ME";
    }
    throw InputError("unknown classifier kind");
}

ClassifierKind parse_kind(const std::string& name) {
    std::string s;
    for (char c : name)
        s += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    if (s == "nb" || s == "naive_bayes" || s == "naivebayes")
        return ClassifierKind::NaiveBayes;
    if (s == "sv" || s == "svm" || s == "linear_svm" || s == "linearsvm")
        return ClassifierKind::LinearSVM;
    if (s == "rf" || s == "random_forest" || s == "randomforest")
        return ClassifierKind::RandomForest;
    if (s == "me" || s == "maxent" || s == "logistic")
        return ClassifierKind::MaxEnt;
    throw InputError("unknown classifier '" + name + "'");
}

namespace {

constexpr int kPi = 0, kAi = 1;

int class_index(model::Stance s) { return s == model::Stance::PI ? kPi : kAi; }

double label_sign(model::Stance s) {
    return s == model::Stance::PI ? 1.0 : -1.0;
}

void check_trainable(const features::FeatureMatrix& m) {
    if (m.labels.size() != m.rows())
        throw InputError("training matrix must be labeled");
    if (m.rows() < 2) throw InputError("training needs at least 2 rows");
    if (m.cols() == 0) throw InputError("training matrix has no columns");
    bool pi = false, ai = false;
    for (auto s : m.labels) (s == model::Stance::PI ? pi : ai) = true;
    if (!pi || !ai)
        throw InputError("training needs both stances present");
}

// w.x over the row's nonzeros (dense rows iterate fully)
double row_dot(const features::FeatureMatrix& m, std::size_t r,
               const std::vector<double>& w) {
    double z = 0.0;
    if (m.sparse) {
        for (std::size_t k = m.indptr[r]; k < m.indptr[r + 1]; ++k)
            z += w[static_cast<std::size_t>(m.col_index[k])] * m.values[k];
    } else {
        const std::size_t base = r * m.cols();
        for (std::size_t c = 0; c < m.cols(); ++c)
            z += w[c] * m.dense[base + c];
    }
    return z;
}

template <class Fn>
void for_each_nonzero(const features::FeatureMatrix& m, std::size_t r, Fn fn) {
    if (m.sparse) {
        for (std::size_t k = m.indptr[r]; k < m.indptr[r + 1]; ++k)
            fn(static_cast<std::size_t>(m.col_index[k]), m.values[k]);
    } else {
        const std::size_t base = r * m.cols();
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.dense[base + c] != 0.0) fn(c, m.dense[base + c]);
    }
}

void train_naive_bayes(TrainedModel& model, const features::FeatureMatrix& m,
                       const Hyperparams& hp) {
    const std::size_t d = m.cols();
    std::size_t n_class[2] = {0, 0};
    for (auto s : m.labels) ++n_class[class_index(s)];
    const double n = static_cast<double>(m.rows());
    for (int c = 0; c < 2; ++c)
        model.log_prior[c] = std::log(static_cast<double>(n_class[c]) / n);

    bool bernoulli = hp.nb_variant == NbVariant::Bernoulli;
    if (hp.nb_variant == NbVariant::Auto)
        bernoulli = m.family == features::Family::Network;
    model.nb_bernoulli = bernoulli;

    if (bernoulli) {
        std::vector<double> ones[2]{std::vector<double>(d, 0.0),
                                    std::vector<double>(d, 0.0)};
        for (std::size_t r = 0; r < m.rows(); ++r) {
            auto& dst = ones[class_index(m.labels[r])];
            for_each_nonzero(m, r, [&](std::size_t c, double v) {
                if (v != 0.0) dst[c] += 1.0;
            });
        }
        const double alpha = hp.nb_alpha;
        for (int c = 0; c < 2; ++c) {
            model.nb_log_p1[c].resize(d);
            model.nb_log_p0[c].resize(d);
            const double denom = static_cast<double>(n_class[c]) + 2.0 * alpha;
            double zero_sum = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double p = (ones[c][j] + alpha) / denom;
                model.nb_log_p1[c][j] = std::log(p);
                model.nb_log_p0[c][j] = std::log1p(-p);
                zero_sum += model.nb_log_p0[c][j];
            }
            model.nb_log_p0_sum[c] = zero_sum;
        }
        return;
    }

    std::vector<double> sum[2]{std::vector<double>(d, 0.0),
                               std::vector<double>(d, 0.0)};
    std::vector<double> sum2[2]{std::vector<double>(d, 0.0),
                                std::vector<double>(d, 0.0)};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const int c = class_index(m.labels[r]);
        for_each_nonzero(m, r, [&](std::size_t j, double v) {
            sum[c][j] += v;
            sum2[c][j] += v * v;
        });
    }
    for (int c = 0; c < 2; ++c) {
        model.nb_mean[c].resize(d);
        model.nb_var[c].resize(d);
        const double nc = static_cast<double>(n_class[c]);
        for (std::size_t j = 0; j < d; ++j) {
            const double mu = sum[c][j] / nc;
            double var = sum2[c][j] / nc - mu * mu;
            if (var < 1e-9) var = 1e-9;
            model.nb_mean[c][j] = mu;
            model.nb_var[c][j] = var;
        }
    }
}

void train_svm(TrainedModel& model, const features::FeatureMatrix& m,
               const Hyperparams& hp, std::uint64_t seed) {
    const std::size_t d = m.cols();
    const double lambda = hp.svm_lambda;
    if (!(lambda > 0.0)) throw InputError("svm_lambda must be positive");
    std::vector<double> v(d, 0.0);
    double scale = 1.0, bias = 0.0;
    auto materialize = [&] {
        for (auto& x : v) x *= scale;
        scale = 1.0;
    };
    std::vector<std::size_t> order(m.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::int64_t t = 0;
    for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch) + 1));
        rng.shuffle(order);
        for (const std::size_t r : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = label_sign(m.labels[r]);
            const double margin = y * (scale * row_dot(m, r, v) + bias);
            // the bias behaves as a constant-one feature sharing the L2
            // term; leaving it unregularized makes the 1/(lambda t) steps
            // diverge for small lambda
            const double shrink = 1.0 - 1.0 / static_cast<double>(t);
            scale *= shrink;
            bias *= shrink;
            if (scale < 1e-9) materialize();
            if (margin < 1.0) {
                const double step = eta * y / (scale == 0.0 ? 1.0 : scale);
                for_each_nonzero(m, r, [&](std::size_t c, double x) {
                    v[c] += step * x;
                });
                bias += eta * y;
            }
        }
    }
    materialize();
    model.weights = std::move(v);
    model.bias = bias;
}

struct TreeBuilder {
    const std::vector<double>& X;  // row-major n x d
    const std::vector<int>& y;     // 0 = PI, 1 = AI
    std::size_t d;
    int mtry;
    int max_depth;  // <= 0 unlimited
    Rng& rng;
    std::vector<TreeNode> nodes;
    std::vector<int> feature_pool;

    int build(std::vector<int>& samples, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        std::int64_t counts[2] = {0, 0};
        for (int s : samples) ++counts[y[static_cast<std::size_t>(s)]];
        const int majority = counts[kAi] > counts[kPi] ? kAi : kPi;
        const bool pure = counts[kPi] == 0 || counts[kAi] == 0;
        if (pure || samples.size() < 2 ||
            (max_depth > 0 && depth >= max_depth)) {
            nodes[static_cast<std::size_t>(node_id)].leaf = majority;
            return node_id;
        }

        // sample mtry distinct features, then scan them in ascending order
        for (std::size_t i = 0; i < d; ++i)
            feature_pool[i] = static_cast<int>(i);
        const int take = std::min<int>(mtry, static_cast<int>(d));
        for (int i = 0; i < take; ++i) {
            const auto j =
                static_cast<std::size_t>(i) +
                rng.below(d - static_cast<std::size_t>(i));
            std::swap(feature_pool[static_cast<std::size_t>(i)],
                      feature_pool[j]);
        }
        std::vector<int> feats(feature_pool.begin(),
                               feature_pool.begin() + take);
        std::sort(feats.begin(), feats.end());

        const double total = static_cast<double>(samples.size());
        double best_impurity = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, int>> vals;
        vals.reserve(samples.size());
        for (const int f : feats) {
            vals.clear();
            for (int s : samples)
                vals.emplace_back(
                    X[static_cast<std::size_t>(s) * d +
                      static_cast<std::size_t>(f)],
                    y[static_cast<std::size_t>(s)]);
            std::sort(vals.begin(), vals.end());
            std::int64_t left[2] = {0, 0};
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left[vals[i].second];
                if (vals[i + 1].first <= vals[i].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = total - nl;
                const double lp = static_cast<double>(left[kPi]);
                const double la = static_cast<double>(left[kAi]);
                const double rp = static_cast<double>(counts[kPi]) - lp;
                const double ra = static_cast<double>(counts[kAi]) - la;
                const double gini_l = 1.0 - (lp * lp + la * la) / (nl * nl);
                const double gini_r = 1.0 - (rp * rp + ra * ra) / (nr * nr);
                const double impurity = (nl * gini_l + nr * gini_r) / total;
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold =
                        (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) {
            nodes[static_cast<std::size_t>(node_id)].leaf = majority;
            return node_id;
        }

        std::vector<int> left_samples, right_samples;
        for (int s : samples) {
            const double x = X[static_cast<std::size_t>(s) * d +
                               static_cast<std::size_t>(best_feature)];
            (x <= best_threshold ? left_samples : right_samples).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();
        const int left_id = build(left_samples, depth + 1);
        const int right_id = build(right_samples, depth + 1);
        auto& node = nodes[static_cast<std::size_t>(node_id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }
};

void train_forest(TrainedModel& model, const features::FeatureMatrix& m,
                  const Hyperparams& hp, std::uint64_t seed) {
    if (hp.rf_trees < 1) throw InputError("rf_trees must be at least 1");
    const std::size_t n = m.rows(), d = m.cols();
    std::vector<double> X(n * d, 0.0);
    std::vector<double> buf;
    for (std::size_t r = 0; r < n; ++r) {
        m.row_dense(r, buf);
        std::copy(buf.begin(), buf.end(),
                  X.begin() + static_cast<std::ptrdiff_t>(r * d));
    }
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) y[r] = class_index(m.labels[r]);

    int mtry = hp.rf_features_per_split;
    if (mtry <= 0)
        mtry = std::max(1, static_cast<int>(
                               std::lround(std::sqrt(static_cast<double>(d)))));

    model.trees.reserve(static_cast<std::size_t>(hp.rf_trees));
    for (int t = 0; t < hp.rf_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t) + 1));
        std::vector<int> samples(n);
        if (hp.rf_bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                samples[i] = static_cast<int>(rng.below(n));
            std::sort(samples.begin(), samples.end());
        } else {
            for (std::size_t i = 0; i < n; ++i)
                samples[i] = static_cast<int>(i);
        }
        TreeBuilder builder{X, y, d, mtry, hp.rf_max_depth, rng, {}, {}};
        builder.feature_pool.resize(d);
        builder.build(samples, 0);
        model.trees.push_back(std::move(builder.nodes));
    }
}

void train_maxent(TrainedModel& model, const features::FeatureMatrix& m,
                  const Hyperparams& hp) {
    const std::size_t n = m.rows(), d = m.cols();
    const double lambda = hp.maxent_l2;
    std::vector<double> w(d, 0.0);
    double b = 0.0;

    auto softplus = [](double u) {
        if (u > 35.0) return u;
        if (u < -35.0) return std::exp(u);
        return std::log1p(std::exp(u));
    };
    auto sigmoid = [](double u) {
        if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
        const double e = std::exp(u);
        return e / (1.0 + e);
    };

    auto objective = [&](const std::vector<double>& wv, double bv) {
        double loss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double z = row_dot(m, r, wv) + bv;
            loss += softplus(-label_sign(m.labels[r]) * z);
        }
        double reg = 0.0;
        for (double x : wv) reg += x * x;
        return (loss + 0.5 * lambda * reg) / static_cast<double>(n);
    };

    std::vector<double> g(d, 0.0), trial(d, 0.0);
    double step = 1.0;
    for (int iter = 0; iter < hp.maxent_max_iters; ++iter) {
        std::fill(g.begin(), g.end(), 0.0);
        double gb = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double y = label_sign(m.labels[r]);
            const double z = row_dot(m, r, w) + b;
            const double coeff = -y * sigmoid(-y * z);
            for_each_nonzero(m, r, [&](std::size_t c, double x) {
                g[c] += coeff * x;
            });
            gb += coeff;
        }
        for (std::size_t c = 0; c < d; ++c)
            g[c] = (g[c] + lambda * w[c]) / static_cast<double>(n);
        gb /= static_cast<double>(n);

        double gnorm2 = gb * gb;
        for (double x : g) gnorm2 += x * x;
        if (std::sqrt(gnorm2) <= hp.maxent_tol) break;

        const double f0 = objective(w, b);
        double alpha = step;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t c = 0; c < d; ++c) trial[c] = w[c] - alpha * g[c];
            const double tb = b - alpha * gb;
            if (objective(trial, tb) <= f0 - 1e-4 * alpha * gnorm2) {
                w.swap(trial);
                b = tb;
                step = alpha * 2.0;
                accepted = true;
                break;
            }
            alpha /= 2.0;
        }
        if (!accepted) break;  // step too small to make progress
    }
    model.weights = std::move(w);
    model.bias = b;
}

}  // namespace

TrainedModel train(ClassifierKind kind, const features::FeatureMatrix& m,
                   const Hyperparams& hp, std::uint64_t seed) {
    check_trainable(m);
    TrainedModel model;
    model.kind = kind;
    model.column_count = static_cast<int>(m.cols());
    model.training_seed = seed;
    model.hyper = hp;
    switch (kind) {
        case ClassifierKind::NaiveBayes: train_naive_bayes(model, m, hp); break;
        case ClassifierKind::LinearSVM: train_svm(model, m, hp, seed); break;
        case ClassifierKind::RandomForest: train_forest(model, m, hp, seed); break;
        case ClassifierKind::MaxEnt: train_maxent(model, m, hp); break;
    }
    return model;
}

namespace {

double gaussian_log_pdf(double x, double mu, double var) {
    const double diff = x - mu;
    return -0.5 * (std::log(2.0 * 3.14159265358979323846 * var) +
                   diff * diff / var);
}

// zero_base: per-class score of an all-zeros row, computed once per batch so
// sparse rows cost only their nonzeros
model::Stance predict_nb(const TrainedModel& model,
                         const features::FeatureMatrix& m, std::size_t r,
                         const double zero_base[2]) {
    double score[2] = {zero_base[0], zero_base[1]};
    if (model.nb_bernoulli) {
        for_each_nonzero(m, r, [&](std::size_t j, double v) {
            if (v == 0.0) return;
            for (int c = 0; c < 2; ++c)
                score[c] += model.nb_log_p1[c][j] - model.nb_log_p0[c][j];
        });
    } else {
        for_each_nonzero(m, r, [&](std::size_t j, double v) {
            for (int c = 0; c < 2; ++c)
                score[c] += gaussian_log_pdf(v, model.nb_mean[c][j],
                                             model.nb_var[c][j]) -
                            gaussian_log_pdf(0.0, model.nb_mean[c][j],
                                             model.nb_var[c][j]);
        });
    }
    return score[kPi] >= score[kAi] ? model::Stance::PI : model::Stance::AI;
}

model::Stance predict_forest(const TrainedModel& model,
                             const std::vector<double>& row) {
    int votes[2] = {0, 0};
    for (const auto& tree : model.trees) {
        std::size_t node = 0;
        while (tree[node].leaf < 0) {
            const auto& nd = tree[node];
            node = static_cast<std::size_t>(
                row[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                    ? nd.left
                    : nd.right);
        }
        ++votes[tree[node].leaf];
    }
    return votes[kAi] > votes[kPi] ? model::Stance::AI : model::Stance::PI;
}

}  // namespace

std::vector<model::Stance> predict(const TrainedModel& model,
                                   const features::FeatureMatrix& m) {
    if (static_cast<int>(m.cols()) != model.column_count)
        throw InputError("matrix width " + std::to_string(m.cols()) +
                         " does not match model width " +
                         std::to_string(model.column_count));
    std::vector<model::Stance> out;
    out.reserve(m.rows());
    if (model.kind == ClassifierKind::NaiveBayes) {
        double zero_base[2];
        for (int c = 0; c < 2; ++c) {
            zero_base[c] = model.log_prior[c];
            if (model.nb_bernoulli) {
                zero_base[c] += model.nb_log_p0_sum[c];
            } else {
                for (std::size_t j = 0; j < model.nb_mean[c].size(); ++j)
                    zero_base[c] += gaussian_log_pdf(0.0, model.nb_mean[c][j],
                                                     model.nb_var[c][j]);
            }
        }
        for (std::size_t r = 0; r < m.rows(); ++r)
            out.push_back(predict_nb(model, m, r, zero_base));
        return out;
    }
    if (model.kind == ClassifierKind::RandomForest) {
        std::vector<double> row;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            m.row_dense(r, row);
            out.push_back(predict_forest(model, row));
        }
        return out;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double z = row_dot(m, r, model.weights) + model.bias;
        out.push_back(z >= 0.0 ? model::Stance::PI : model::Stance::AI);
    }
    return out;
}

namespace {

json hyper_to_json(const Hyperparams& hp) {
    json j;
    j["nb_variant"] = hp.nb_variant == NbVariant::Auto ? "auto"
                      : hp.nb_variant == NbVariant::Gaussian ? "gaussian"
                                                             : "bernoulli";
    j["nb_alpha"] = hp.nb_alpha;
    j["svm_lambda"] = hp.svm_lambda;
    j["svm_epochs"] = hp.svm_epochs;
    j["rf_trees"] = hp.rf_trees;
    j["rf_max_depth"] = hp.rf_max_depth;
    j["rf_features_per_split"] = hp.rf_features_per_split;
    j["rf_bootstrap"] = hp.rf_bootstrap;
    j["maxent_l2"] = hp.maxent_l2;
    j["maxent_max_iters"] = hp.maxent_max_iters;
    j["maxent_tol"] = hp.maxent_tol;
    return j;
}

Hyperparams hyper_from_json(const json& j) {
    Hyperparams hp;
    const std::string v = j.at("nb_variant").get<std::string>();
    if (v == "auto") hp.nb_variant = NbVariant::Auto;
    else if (v == "gaussian") hp.nb_variant = NbVariant::Gaussian;
    else if (v == "bernoulli") hp.nb_variant = NbVariant::Bernoulli;
    else throw InputError("unknown nb_variant '" + v + "'");
    hp.nb_alpha = j.at("nb_alpha").get<double>();
    hp.svm_lambda = j.at("svm_lambda").get<double>();
    hp.svm_epochs = j.at("svm_epochs").get<int>();
    hp.rf_trees = j.at("rf_trees").get<int>();
    hp.rf_max_depth = j.at("rf_max_depth").get<int>();
    hp.rf_features_per_split = j.at("rf_features_per_split").get<int>();
    hp.rf_bootstrap = j.at("rf_bootstrap").get<bool>();
    hp.maxent_l2 = j.at("maxent_l2").get<double>();
    hp.maxent_max_iters = j.at("maxent_max_iters").get<int>();
    hp.maxent_tol = j.at("maxent_tol").get<double>();
    return hp;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    json j;
    j["schema"] = "natid/model/v1";
    j["kind"] = kind_name(model.kind);
    j["column_count"] = model.column_count;
    j["training_seed"] = model.training_seed;
    j["hyper"] = hyper_to_json(model.hyper);
    switch (model.kind) {
        case ClassifierKind::NaiveBayes: {
            json nb;
            nb["bernoulli"] = model.nb_bernoulli;
            nb["log_prior"] = {model.log_prior[0], model.log_prior[1]};
            if (model.nb_bernoulli) {
                nb["log_p1"] = {model.nb_log_p1[0], model.nb_log_p1[1]};
                nb["log_p0"] = {model.nb_log_p0[0], model.nb_log_p0[1]};
                nb["log_p0_sum"] = {model.nb_log_p0_sum[0],
                                    model.nb_log_p0_sum[1]};
            } else {
                nb["mean"] = {model.nb_mean[0], model.nb_mean[1]};
                nb["var"] = {model.nb_var[0], model.nb_var[1]};
            }
            j["nb"] = std::move(nb);
            break;
        }
        case ClassifierKind::LinearSVM:
        case ClassifierKind::MaxEnt:
            j["linear"] = {{"weights", model.weights}, {"bias", model.bias}};
            break;
        case ClassifierKind::RandomForest: {
            json forest = json::array();
            for (const auto& tree : model.trees) {
                json t = json::array();
                for (const auto& nd : tree)
                    t.push_back({nd.feature, nd.threshold, nd.left, nd.right,
                                 nd.leaf});
                forest.push_back(std::move(t));
            }
            j["forest"] = std::move(forest);
            break;
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw InputError("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    if (!j.is_object() || j.value("schema", "") != "natid/model/v1")
        throw InputError(path.string() + ": not a natid/model/v1 file");
    TrainedModel model;
    try {
        model.kind = parse_kind(j.at("kind").get<std::string>());
        model.column_count = j.at("column_count").get<int>();
        model.training_seed = j.at("training_seed").get<std::uint64_t>();
        model.hyper = hyper_from_json(j.at("hyper"));
        switch (model.kind) {
            case ClassifierKind::NaiveBayes: {
                const json& nb = j.at("nb");
                model.nb_bernoulli = nb.at("bernoulli").get<bool>();
                model.log_prior[0] = nb.at("log_prior").at(0).get<double>();
                model.log_prior[1] = nb.at("log_prior").at(1).get<double>();
                for (int c = 0; c < 2; ++c) {
                    if (model.nb_bernoulli) {
                        model.nb_log_p1[c] =
                            nb.at("log_p1").at(c).get<std::vector<double>>();
                        model.nb_log_p0[c] =
                            nb.at("log_p0").at(c).get<std::vector<double>>();
                        model.nb_log_p0_sum[c] =
                            nb.at("log_p0_sum").at(c).get<double>();
                    } else {
                        model.nb_mean[c] =
                            nb.at("mean").at(c).get<std::vector<double>>();
                        model.nb_var[c] =
                            nb.at("var").at(c).get<std::vector<double>>();
                    }
                }
                break;
            }
            case ClassifierKind::LinearSVM:
            case ClassifierKind::MaxEnt:
                model.weights =
                    j.at("linear").at("weights").get<std::vector<double>>();
                model.bias = j.at("linear").at("bias").get<double>();
                break;
            case ClassifierKind::RandomForest:
                for (const auto& t : j.at("forest")) {
                    std::vector<TreeNode> tree;
                    for (const auto& nd : t) {
                        TreeNode node;
                        node.feature = nd.at(0).get<int>();
                        node.threshold = nd.at(1).get<double>();
                        node.left = nd.at(2).get<int>();
                        node.right = nd.at(3).get<int>();
                        node.leaf = nd.at(4).get<int>();
                        tree.push_back(node);
                    }
                    model.trees.push_back(std::move(tree));
                }
                break;
        }
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return model;
}

std::vector<std::vector<int>> stratified_kfold(
    const std::vector<model::Stance>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw InputError("k must be at least 2");
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    for (int c = 0; c < 2; ++c) {
        const auto stance = c == kPi ? model::Stance::PI : model::Stance::AI;
        std::vector<int> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == stance) idx.push_back(static_cast<int>(i));
        if (idx.size() < static_cast<std::size_t>(k))
            throw InputError("stance " + std::string(model::stance_name(stance)) +
                             " has " + std::to_string(idx.size()) +
                             " members, fewer than k=" + std::to_string(k));
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

namespace {

CvReport run_cv(const std::vector<model::Stance>& labels,
                const std::function<features::FeatureMatrix(
                    const std::vector<int>&)>& build,
                ClassifierKind kind, int k, std::uint64_t seed,
                const Hyperparams& hp) {
    const auto folds = stratified_kfold(labels, k, seed);
    CvReport report;
    report.kind = kind;
    report.k = k;
    report.seed = seed;
    report.hyper = hp;
    std::int64_t correct_total = 0, total = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<int> train_rows;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                train_rows.insert(train_rows.end(), folds[g].begin(),
                                  folds[g].end());
        std::sort(train_rows.begin(), train_rows.end());
        const auto matrix = build(train_rows);
        if (matrix.rows() != labels.size())
            throw InputError("fold matrix rows do not match the label list");
        report.family = matrix.family;
        const auto trained =
            train(kind, features::select_rows(matrix, train_rows), hp,
                  derive_seed(seed, 1000 + f));
        const auto& test_rows = folds[f];
        const auto preds =
            predict(trained, features::select_rows(matrix, test_rows));
        std::int64_t correct = 0;
        for (std::size_t i = 0; i < test_rows.size(); ++i)
            if (preds[i] == labels[static_cast<std::size_t>(test_rows[i])])
                ++correct;
        report.fold_counts.emplace_back(
            correct, static_cast<std::int64_t>(test_rows.size()));
        correct_total += correct;
        total += static_cast<std::int64_t>(test_rows.size());
    }
    report.micro_accuracy =
        static_cast<double>(correct_total) / static_cast<double>(total);
    return report;
}

}  // namespace

CvReport cross_validate(const features::FeatureMatrix& m, ClassifierKind kind,
                        int k, std::uint64_t seed, const Hyperparams& hp) {
    if (m.labels.size() != m.rows())
        throw InputError("cross-validation needs a labeled matrix");
    return run_cv(
        m.labels, [&](const std::vector<int>&) { return m; }, kind, k, seed,
        hp);
}

CvReport cross_validate_with_builder(
    const std::vector<model::Stance>& labels,
    const std::function<features::FeatureMatrix(const std::vector<int>&)>&
        build,
    ClassifierKind kind, int k, std::uint64_t seed, const Hyperparams& hp) {
    return run_cv(labels, build, kind, k, seed, hp);
}

}  // namespace natid::classify
