#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "natid/classify.hpp"
#include "natid/features.hpp"
#include "natid/graph.hpp"
#include "natid/ingest.hpp"
#include "natid/labeler.hpp"
#include "natid/model.hpp"
#include "natid/synth.hpp"
#include "natid/textfeat.hpp"
#include "natid/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using natid::InputError;

namespace {

// ---- config file overlay: flags win over config values ----

json read_config(const std::string& path) {
    if (path.empty()) return json();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("config file " + path + " must hold a JSON object");
    return j;
}

template <typename T>
void overlay(const CLI::App& cmd, const json& cfg, const std::string& name, T& value) {
    if (!cfg.is_object()) return;
    const auto it = cfg.find(name);
    if (it == cfg.end()) return;
    if (cmd.count("--" + name) > 0) return;
    try {
        value = it->get<T>();
    } catch (const json::exception&) {
        throw InputError("config key \"" + name + "\" has the wrong type");
    }
}

// ---- shared option bundles ----

natid::model::TerritoryKind parse_territory_name(std::string name) {
    for (auto& c : name) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '-' || c == ' ') c = '_';
    }
    if (name == "catalonia") return natid::model::TerritoryKind::Catalonia;
    if (name == "basque" || name == "basque_country" || name == "euskadi")
        return natid::model::TerritoryKind::BasqueCountry;
    if (name == "scotland") return natid::model::TerritoryKind::Scotland;
    throw InputError("unknown territory \"" + name +
                     "\" (expected catalonia, basque_country, or scotland)");
}

struct DataArgs {
    std::string data_dir;
    std::string territory;  // empty = take from manifest
    std::string config_path;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.data_dir, "dataset directory (with manifest.json)")
        ->required();
    cmd->add_option("--territory", args.territory,
                    "override territory: catalonia, basque_country, scotland");
    cmd->add_option("--config", args.config_path, "JSON config file; flags win");
}

natid::model::Dataset load_data(const DataArgs& args, const json& cfg,
                                const CLI::App& cmd) {
    DataArgs a = args;
    overlay(cmd, cfg, "data", a.data_dir);
    overlay(cmd, cfg, "territory", a.territory);
    auto result = natid::ingest::load_directory(a.data_dir);
    if (!a.territory.empty())
        result.dataset.territory =
            natid::model::builtin_territory(parse_territory_name(a.territory));
    return std::move(result.dataset);
}

fs::path ensure_out_dir(const std::string& out) {
    if (out.empty()) throw InputError("--out directory is required");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + out);
    return dir;
}

std::ofstream open_csv(const fs::path& path, const std::string& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << "#schema: " << schema << "\n";
    return out;
}

// profiles.tsv / lexicon.tsv next to the data are picked up automatically;
// explicit flags override
struct TextResources {
    std::vector<natid::textfeat::LanguageProfile> profiles;
    natid::textfeat::SentimentLexicon lexicon;
    bool have_profiles = false;
    bool have_lexicon = false;
};

TextResources load_text_resources(const std::string& profiles_path,
                                  const std::string& lexicon_path,
                                  const std::string& data_dir) {
    TextResources r;
    fs::path pp = profiles_path.empty() ? fs::path(data_dir) / "profiles.tsv"
                                        : fs::path(profiles_path);
    fs::path lp = lexicon_path.empty() ? fs::path(data_dir) / "lexicon.tsv"
                                       : fs::path(lexicon_path);
    if (!profiles_path.empty() || fs::exists(pp)) {
        r.profiles = natid::textfeat::load_language_profiles(pp);
        r.have_profiles = true;
    }
    if (!lexicon_path.empty() || fs::exists(lp)) {
        r.lexicon = natid::textfeat::load_lexicon(lp);
        r.have_lexicon = true;
    }
    return r;
}

std::vector<std::vector<std::string>> dataset_corpus(
    const natid::model::Dataset& ds,
    const std::vector<std::string>* only_users = nullptr) {
    std::vector<std::vector<std::string>> corpus;
    auto add_user = [&](const natid::model::UserRecord& u) {
        for (const auto& t : u.timeline)
            corpus.push_back(natid::textfeat::tokenize(t.text));
        for (const auto& t : u.favourites)
            corpus.push_back(natid::textfeat::tokenize(t.text));
    };
    if (only_users) {
        for (const auto& id : *only_users) {
            const auto it = ds.users.find(id);
            if (it == ds.users.end())
                throw InputError("unknown user in vocabulary restriction: " + id);
            add_user(it->second);
        }
    } else {
        for (const auto& [id, u] : ds.users) add_user(u);
    }
    return corpus;
}

// ---- per-command argument structs ----

struct LabelArgs {
    DataArgs data;
    std::string rules_path;
    std::string out;
};

struct HomophilyArgs {
    DataArgs data;
    std::string out;
    std::int64_t permutations = 999;
    std::uint64_t seed = 1;
};

struct CompareArgs {
    DataArgs data;
    std::string out;
    std::string profiles_path;
    std::string lexicon_path;
};

struct EmbeddingArgs {
    int dim = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    int min_count = 2;
};

void add_embedding_options(CLI::App* cmd, EmbeddingArgs& args) {
    cmd->add_option("--dim", args.dim, "embedding dimension");
    cmd->add_option("--window", args.window, "skip-gram window");
    cmd->add_option("--negatives", args.negatives, "negative samples");
    cmd->add_option("--epochs", args.epochs, "skip-gram epochs");
    cmd->add_option("--min-count", args.min_count, "minimum token count");
}

void overlay_embedding(const CLI::App& cmd, const json& cfg, EmbeddingArgs& args) {
    overlay(cmd, cfg, "dim", args.dim);
    overlay(cmd, cfg, "window", args.window);
    overlay(cmd, cfg, "negatives", args.negatives);
    overlay(cmd, cfg, "epochs", args.epochs);
    overlay(cmd, cfg, "min-count", args.min_count);
}

natid::textfeat::SkipgramParams skipgram_params(const EmbeddingArgs& args,
                                                std::uint64_t seed) {
    natid::textfeat::SkipgramParams p;
    p.dimension = args.dim;
    p.window = args.window;
    p.negatives = args.negatives;
    p.epochs = args.epochs;
    p.min_count = args.min_count;
    p.seed = seed;
    return p;
}

struct FeaturizeArgs {
    DataArgs data;
    std::string out;
    std::string family = "behavioral";
    double percentile = 0.99;
    std::uint64_t seed = 1;
    EmbeddingArgs embedding;
    std::string profiles_path;
    std::string lexicon_path;
};

struct ClassifyArgs {
    DataArgs data;
    std::string out;
    std::string family = "all";
    std::string classifier = "all";
    int k = 10;
    std::uint64_t seed = 1;
    double percentile = 0.99;
    bool strict_vocab = false;
    EmbeddingArgs embedding;
    std::string profiles_path;
    std::string lexicon_path;
};

struct SynthArgs {
    std::string config_path;
    std::string out;
    std::string territory = "catalonia";
    natid::synth::SynthConfig cfg;
};

struct ExportArgs {
    DataArgs data;
    std::string out;
    std::string graph = "follow";
    std::string format = "dot";
};

// ---- commands ----

int cmd_label(const CLI::App& cmd, LabelArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "rules", args.rules_path);
    overlay(cmd, cfg, "out", args.out);
    auto ds = load_data(args.data, cfg, cmd);
    const auto rules =
        args.rules_path.empty()
            ? natid::labeler::builtin_rules(ds.territory)
            : natid::labeler::load_rules(args.rules_path, ds.territory);
    const auto report = natid::labeler::label_dataset(ds, rules);

    const fs::path out_dir = ensure_out_dir(args.out);
    natid::labeler::export_for_review(ds, out_dir / "labels.csv");
    natid::ingest::save_dataset(ds, out_dir / "labeled");
    {
        auto csv = open_csv(out_dir / "label_counts.csv", "natid/label-counts/v1");
        csv << "label,users\n";
        csv << "PI," << report.pi << "\n";
        csv << "AI," << report.ai << "\n";
        csv << "Total," << (report.pi + report.ai) << "\n";
    }

    std::printf("territory: %s\n", ds.territory.name.c_str());
    std::printf("%-6s %10s\n", "label", "users");
    std::printf("%-6s %10lld\n", "PI", static_cast<long long>(report.pi));
    std::printf("%-6s %10lld\n", "AI", static_cast<long long>(report.ai));
    std::printf("%-6s %10lld\n", "Total",
                static_cast<long long>(report.pi + report.ai));
    std::printf("(unlabeled: %lld)\n", static_cast<long long>(report.unlabeled));
    return 0;
}

std::string r_p_cell(double r, double p) {
    return natid::format_double(r) + " (" + natid::format_double(p) + ")";
}

int cmd_homophily(const CLI::App& cmd, HomophilyArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "permutations", args.permutations);
    overlay(cmd, cfg, "seed", args.seed);
    const auto ds = load_data(args.data, cfg, cmd);

    const auto follow = natid::graph::build_follow_graph(ds);
    const auto interaction = natid::graph::build_interaction_graph(ds);
    const auto fr = natid::graph::homophily_significance(
        follow, args.permutations, natid::derive_seed(args.seed, 1));
    const auto ir = natid::graph::homophily_significance(
        interaction, args.permutations, natid::derive_seed(args.seed, 2));

    const fs::path out_dir = ensure_out_dir(args.out);
    {
        auto csv = open_csv(out_dir / "homophily.csv", "natid/homophily/v1");
        csv << "territory,network,interactions\n";
        csv << natid::csv_escape(ds.territory.name) << ","
            << natid::csv_escape(r_p_cell(fr.assortativity_r, fr.p_value)) << ","
            << natid::csv_escape(r_p_cell(ir.assortativity_r, ir.p_value)) << "\n";
    }
    {
        auto csv =
            open_csv(out_dir / "homophily_detail.csv", "natid/homophily-detail/v1");
        csv << "graph,r,permutation_p,mww_p,nodes,edges,method\n";
        const auto row = [&](const char* name,
                             const natid::graph::HomophilyReport& hr) {
            csv << name << "," << natid::format_double(hr.assortativity_r) << ","
                << natid::format_double(hr.p_value) << ","
                << natid::format_double(hr.mww_p_value) << "," << hr.n_nodes << ","
                << hr.n_edges << "," << natid::csv_escape(hr.method) << "\n";
        };
        row("follow", fr);
        row("interaction", ir);
    }

    std::printf("territory: %s\n", ds.territory.name.c_str());
    std::printf("follow graph:      r=%s p=%s (nodes=%lld edges=%lld)\n",
                natid::format_double(fr.assortativity_r).c_str(),
                natid::format_double(fr.p_value).c_str(),
                static_cast<long long>(fr.n_nodes),
                static_cast<long long>(fr.n_edges));
    std::printf("interaction graph: r=%s p=%s (nodes=%lld edges=%lld)\n",
                natid::format_double(ir.assortativity_r).c_str(),
                natid::format_double(ir.p_value).c_str(),
                static_cast<long long>(ir.n_nodes),
                static_cast<long long>(ir.n_edges));
    return 0;
}

int cmd_compare(const CLI::App& cmd, CompareArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "profiles", args.profiles_path);
    overlay(cmd, cfg, "lexicon", args.lexicon_path);
    const auto ds = load_data(args.data, cfg, cmd);
    const auto resources =
        load_text_resources(args.profiles_path, args.lexicon_path, args.data.data_dir);

    natid::features::BehavioralConfig bcfg;
    if (resources.have_profiles) bcfg.profiles = &resources.profiles;
    if (resources.have_lexicon) bcfg.lexicon = &resources.lexicon;
    const auto matrix = natid::features::behavioral_features(ds, bcfg);
    const auto rows = natid::features::group_comparison_report(matrix);

    const fs::path out_dir = ensure_out_dir(args.out);
    auto csv = open_csv(out_dir / "compare.csv", "natid/compare/v1");
    csv << "feature,name,pi_mean,ai_mean,t_statistic,df,p_value,direction,stars\n";
    int significant = 0;
    for (const auto& row : rows) {
        const char* direction =
            row.test.direction == natid::stats::Direction::GroupA   ? "PI"
            : row.test.direction == natid::stats::Direction::GroupB ? "AI"
                                                                    : "";
        const std::string stars =
            natid::features::significance_stars(row.test.p_value);
        if (row.test.p_value < 0.05) ++significant;
        csv << row.feature_id << "," << natid::csv_escape(row.name) << ","
            << natid::format_double(row.pi_mean) << ","
            << natid::format_double(row.ai_mean) << ","
            << natid::format_double(row.test.statistic) << ","
            << (row.test.df ? natid::format_double(*row.test.df) : std::string())
            << "," << natid::format_double(row.test.p_value) << "," << direction
            << "," << stars << "\n";
    }
    std::printf("territory: %s\n", ds.territory.name.c_str());
    std::printf("%zu features compared, %d significant at 0.05\n", rows.size(),
                significant);
    std::printf("report: %s\n", (out_dir / "compare.csv").string().c_str());
    return 0;
}

int cmd_featurize(const CLI::App& cmd, FeaturizeArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "family", args.family);
    overlay(cmd, cfg, "percentile", args.percentile);
    overlay(cmd, cfg, "seed", args.seed);
    overlay(cmd, cfg, "profiles", args.profiles_path);
    overlay(cmd, cfg, "lexicon", args.lexicon_path);
    overlay_embedding(cmd, cfg, args.embedding);
    const auto ds = load_data(args.data, cfg, cmd);
    const auto family = natid::features::parse_family(args.family);

    natid::features::FeatureMatrix matrix;
    std::array<std::int64_t, natid::features::kBehavioralFeatureCount>
        missing{};
    using natid::features::Family;
    if (family == Family::Timeline || family == Family::Favourites) {
        const auto corpus = dataset_corpus(ds);
        const auto table = natid::textfeat::train_skipgram(
            corpus, skipgram_params(args.embedding, args.seed));
        matrix = family == Family::Timeline
                     ? natid::features::timeline_features(ds, table)
                     : natid::features::favourite_features(ds, table);
    } else if (family == Family::Interactions) {
        matrix = natid::features::interaction_features(ds, args.percentile);
    } else if (family == Family::Network) {
        matrix = natid::features::network_features(ds, args.percentile);
    } else {
        const auto resources = load_text_resources(
            args.profiles_path, args.lexicon_path, args.data.data_dir);
        natid::features::BehavioralConfig bcfg;
        if (resources.have_profiles) bcfg.profiles = &resources.profiles;
        if (resources.have_lexicon) bcfg.lexicon = &resources.lexicon;
        matrix = natid::features::behavioral_features(ds, bcfg, &missing);
    }

    const fs::path out_dir = ensure_out_dir(args.out);
    const fs::path path =
        out_dir / ("features_" + std::string(natid::features::family_name(family)) +
                   ".csv");
    natid::features::save_feature_matrix(matrix, path);
    std::printf("family: %s\n", natid::features::family_name(family).c_str());
    std::printf("rows: %lld, columns: %lld, %s\n",
                static_cast<long long>(matrix.rows()),
                static_cast<long long>(matrix.cols()),
                matrix.sparse ? "sparse" : "dense");
    for (std::size_t j = 0; j < missing.size(); ++j)
        if (missing[j] > 0)
            std::printf("missing data: %s for %lld users (zero-filled)\n",
                        natid::features::kBehavioralFeatureNames[j],
                        static_cast<long long>(missing[j]));
    std::printf("written: %s\n", path.string().c_str());
    return 0;
}

std::vector<natid::features::Family> parse_family_list(const std::string& s) {
    using natid::features::Family;
    if (s == "all")
        return {Family::Timeline, Family::Interactions, Family::Favourites,
                Family::Network};
    std::vector<Family> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto token = s.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) out.push_back(natid::features::parse_family(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw InputError("no feature family selected");
    return out;
}

std::vector<natid::classify::ClassifierKind> parse_classifier_list(
    const std::string& s) {
    using natid::classify::ClassifierKind;
    if (s == "all")
        return {ClassifierKind::NaiveBayes, ClassifierKind::LinearSVM,
                ClassifierKind::RandomForest, ClassifierKind::MaxEnt};
    std::vector<ClassifierKind> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto token = s.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) out.push_back(natid::classify::parse_kind(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw InputError("no classifier selected");
    return out;
}

int cmd_classify(const CLI::App& cmd, ClassifyArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "family", args.family);
    overlay(cmd, cfg, "classifier", args.classifier);
    overlay(cmd, cfg, "k", args.k);
    overlay(cmd, cfg, "seed", args.seed);
    overlay(cmd, cfg, "percentile", args.percentile);
    overlay(cmd, cfg, "strict-vocab", args.strict_vocab);
    overlay(cmd, cfg, "profiles", args.profiles_path);
    overlay(cmd, cfg, "lexicon", args.lexicon_path);
    overlay_embedding(cmd, cfg, args.embedding);
    const auto ds = load_data(args.data, cfg, cmd);
    const auto families = parse_family_list(args.family);
    const auto kinds = parse_classifier_list(args.classifier);

    // labeled users in the row order every family builder uses
    std::vector<std::string> labeled_ids;
    std::vector<natid::model::Stance> labels;
    for (const auto& [id, u] : ds.users) {
        if (u.label) {
            labeled_ids.push_back(id);
            labels.push_back(*u.label);
        }
    }
    if (labels.empty()) throw InputError("dataset has no labeled users");

    const auto resources = load_text_resources(
        args.profiles_path, args.lexicon_path, args.data.data_dir);

    using natid::features::Family;
    const bool needs_embeddings =
        std::any_of(families.begin(), families.end(), [](Family f) {
            return f == Family::Timeline || f == Family::Favourites;
        });
    natid::textfeat::EmbeddingTable shared_table;
    if (needs_embeddings && !args.strict_vocab) {
        shared_table = natid::textfeat::train_skipgram(
            dataset_corpus(ds), skipgram_params(args.embedding, args.seed));
    }

    auto build_family = [&](Family family,
                            const std::vector<std::string>* vocab_users,
                            const natid::textfeat::EmbeddingTable* table) {
        switch (family) {
            case Family::Timeline:
                return natid::features::timeline_features(ds, *table);
            case Family::Favourites:
                return natid::features::favourite_features(ds, *table);
            case Family::Interactions:
                return natid::features::interaction_features(ds, args.percentile, {},
                                                             vocab_users);
            case Family::Network:
                return natid::features::network_features(ds, args.percentile,
                                                         vocab_users);
            case Family::Behavioral: {
                natid::features::BehavioralConfig bcfg;
                if (resources.have_profiles) bcfg.profiles = &resources.profiles;
                if (resources.have_lexicon) bcfg.lexicon = &resources.lexicon;
                return natid::features::behavioral_features(ds, bcfg);
            }
        }
        throw InputError("unsupported feature family");
    };

    std::map<Family, std::map<natid::classify::ClassifierKind, double>> grid;
    std::vector<natid::classify::CvReport> reports;
    for (const Family family : families) {
        natid::features::FeatureMatrix matrix;
        if (!args.strict_vocab)
            matrix = build_family(family, nullptr, &shared_table);
        for (const auto kind : kinds) {
            natid::classify::CvReport report;
            if (args.strict_vocab) {
                auto builder = [&](const std::vector<int>& train_rows) {
                    std::vector<std::string> train_ids;
                    train_ids.reserve(train_rows.size());
                    for (const auto r : train_rows)
                        train_ids.push_back(labeled_ids[static_cast<std::size_t>(r)]);
                    if (family == Family::Timeline || family == Family::Favourites) {
                        const auto table = natid::textfeat::train_skipgram(
                            dataset_corpus(ds, &train_ids),
                            skipgram_params(args.embedding, args.seed));
                        return build_family(family, nullptr, &table);
                    }
                    return build_family(family, &train_ids, nullptr);
                };
                report = natid::classify::cross_validate_with_builder(
                    labels, builder, kind, args.k, args.seed);
            } else {
                report = natid::classify::cross_validate(matrix, kind, args.k,
                                                         args.seed);
            }
            report.territory = ds.territory.name;
            grid[family][kind] = report.micro_accuracy;
            reports.push_back(std::move(report));
        }
    }

    const fs::path out_dir = ensure_out_dir(args.out);
    {
        auto csv = open_csv(out_dir / "classify.csv", "natid/classify/v1");
        csv << "family";
        for (const auto kind : kinds) csv << "," << natid::classify::kind_name(kind);
        csv << "\n";
        for (const Family family : families) {
            csv << natid::features::family_name(family);
            for (const auto kind : kinds)
                csv << "," << natid::format_double(grid[family][kind]);
            csv << "\n";
        }
    }
    {
        auto csv = open_csv(out_dir / "classify_folds.csv", "natid/classify-folds/v1");
        csv << "family,classifier,fold,correct,total\n";
        for (const auto& report : reports) {
            for (std::size_t f = 0; f < report.fold_counts.size(); ++f)
                csv << natid::features::family_name(report.family) << ","
                    << natid::classify::kind_name(report.kind) << "," << f << ","
                    << report.fold_counts[f].first << ","
                    << report.fold_counts[f].second << "\n";
        }
    }

    std::printf("territory: %s, %d-fold stratified CV, seed %llu\n",
                ds.territory.name.c_str(), args.k,
                static_cast<unsigned long long>(args.seed));
    std::printf("%-14s", "family");
    for (const auto kind : kinds)
        std::printf(" %8s", natid::classify::kind_name(kind).c_str());
    std::printf("\n");
    for (const Family family : families) {
        std::printf("%-14s", natid::features::family_name(family).c_str());
        for (const auto kind : kinds)
            std::printf(" %8.4f", grid[family][kind]);
        std::printf("\n");
    }
    return 0;
}

int cmd_synth(const CLI::App& cmd, SynthArgs& args) {
    const json cfg = read_config(args.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "territory", args.territory);
    overlay(cmd, cfg, "n", args.cfg.n_users);
    overlay(cmd, cfg, "pi-fraction", args.cfg.pi_fraction);
    overlay(cmd, cfg, "homophily", args.cfg.homophily);
    overlay(cmd, cfg, "mean-degree", args.cfg.mean_degree);
    overlay(cmd, cfg, "tweets-per-user", args.cfg.tweets_per_user);
    overlay(cmd, cfg, "vocab", args.cfg.token_vocab_per_group);
    overlay(cmd, cfg, "overlap", args.cfg.token_overlap);
    overlay(cmd, cfg, "contrast", args.cfg.group_contrast);
    overlay(cmd, cfg, "degree-boost", args.cfg.pi_degree_boost);
    overlay(cmd, cfg, "seed", args.cfg.seed);
    args.cfg.territory = parse_territory_name(args.territory);

    const fs::path out_dir = ensure_out_dir(args.out);
    const auto manifest = natid::synth::emit(args.cfg, out_dir);
    std::printf("territory: %s\n", manifest.territory.name.c_str());
    std::printf(
        "wrote %d users (pi_fraction %s, homophily %s, mean degree %s, seed "
        "%llu)\n",
        args.cfg.n_users, natid::format_double(args.cfg.pi_fraction).c_str(),
        natid::format_double(args.cfg.homophily).c_str(),
        natid::format_double(args.cfg.mean_degree).c_str(),
        static_cast<unsigned long long>(args.cfg.seed));
    std::printf("dataset: %s\n", out_dir.string().c_str());
    return 0;
}

int cmd_export_graph(const CLI::App& cmd, ExportArgs& args) {
    const json cfg = read_config(args.data.config_path);
    overlay(cmd, cfg, "out", args.out);
    overlay(cmd, cfg, "graph", args.graph);
    overlay(cmd, cfg, "format", args.format);
    const auto ds = load_data(args.data, cfg, cmd);

    natid::graph::LabeledGraph g;
    if (args.graph == "follow") g = natid::graph::build_follow_graph(ds);
    else if (args.graph == "interaction") g = natid::graph::build_interaction_graph(ds);
    else throw InputError("unknown graph \"" + args.graph + "\" (follow or interaction)");

    natid::graph::ExportFormat format;
    std::string ext;
    if (args.format == "dot") { format = natid::graph::ExportFormat::DOT; ext = ".dot"; }
    else if (args.format == "graphml") { format = natid::graph::ExportFormat::GraphML; ext = ".graphml"; }
    else if (args.format == "csv") { format = natid::graph::ExportFormat::CSV; ext = ".csv"; }
    else throw InputError("unknown format \"" + args.format + "\" (dot, graphml, or csv)");

    const fs::path out_dir = ensure_out_dir(args.out);
    const fs::path path = out_dir / ("graph_" + args.graph + ext);
    const auto bytes = natid::graph::export_graph(g, format, path);
    std::printf("wrote %s (%lld bytes, %zu nodes, %zu edges)\n",
                path.string().c_str(), static_cast<long long>(bytes),
                g.node_ids.size(), g.edges.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"social network analysis of national-identity stance"};
    app.require_subcommand(1);

    LabelArgs label_args;
    auto* label_cmd =
        app.add_subcommand("label", "label users PI/AI from location rules");
    add_data_options(label_cmd, label_args.data);
    label_cmd->add_option("--rules", label_args.rules_path, "rule file (JSON)");
    label_cmd->add_option("--out", label_args.out, "output directory");

    HomophilyArgs homophily_args;
    auto* homophily_cmd = app.add_subcommand(
        "homophily", "assortativity of follow and interaction graphs");
    add_data_options(homophily_cmd, homophily_args.data);
    homophily_cmd->add_option("--out", homophily_args.out, "output directory");
    homophily_cmd->add_option("--permutations", homophily_args.permutations,
                              "label permutations for the significance test");
    homophily_cmd->add_option("--seed", homophily_args.seed, "random seed");

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand(
        "compare", "per-feature PI vs AI comparison (behavioral features)");
    add_data_options(compare_cmd, compare_args.data);
    compare_cmd->add_option("--out", compare_args.out, "output directory");
    compare_cmd->add_option("--profiles", compare_args.profiles_path,
                            "language profile file (TSV)");
    compare_cmd->add_option("--lexicon", compare_args.lexicon_path,
                            "sentiment lexicon file (TSV)");

    FeaturizeArgs featurize_args;
    auto* featurize_cmd =
        app.add_subcommand("featurize", "build one feature family as CSV");
    add_data_options(featurize_cmd, featurize_args.data);
    featurize_cmd->add_option("--out", featurize_args.out, "output directory");
    featurize_cmd->add_option("--family", featurize_args.family,
                              "timeline, interactions, favourites, network, "
                              "behavioral");
    featurize_cmd->add_option("--percentile", featurize_args.percentile,
                              "vocabulary percentile cutoff q in (0,1)");
    featurize_cmd->add_option("--seed", featurize_args.seed, "random seed");
    featurize_cmd->add_option("--profiles", featurize_args.profiles_path,
                              "language profile file (TSV)");
    featurize_cmd->add_option("--lexicon", featurize_args.lexicon_path,
                              "sentiment lexicon file (TSV)");
    add_embedding_options(featurize_cmd, featurize_args.embedding);

    ClassifyArgs classify_args;
    auto* classify_cmd = app.add_subcommand(
        "classify", "cross-validated stance classification grid");
    add_data_options(classify_cmd, classify_args.data);
    classify_cmd->add_option("--out", classify_args.out, "output directory");
    classify_cmd->add_option("--family", classify_args.family,
                             "family list or \"all\"");
    classify_cmd->add_option("--classifier", classify_args.classifier,
                             "classifier list (nb,sv,rf,me) or \"all\"");
    classify_cmd->add_option("--k", classify_args.k, "number of CV folds");
    classify_cmd->add_option("--seed", classify_args.seed, "random seed");
    classify_cmd->add_option("--percentile", classify_args.percentile,
                             "vocabulary percentile cutoff q in (0,1)");
    classify_cmd->add_flag("--strict-vocab", classify_args.strict_vocab,
                           "rebuild vocabularies/embeddings per fold from "
                           "training rows only");
    classify_cmd->add_option("--profiles", classify_args.profiles_path,
                             "language profile file (TSV)");
    classify_cmd->add_option("--lexicon", classify_args.lexicon_path,
                             "sentiment lexicon file (TSV)");
    add_embedding_options(classify_cmd, classify_args.embedding);

    SynthArgs synth_args;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth_cmd->add_option("--config", synth_args.config_path,
                          "JSON config file; flags win");
    synth_cmd->add_option("--out", synth_args.out, "output directory");
    synth_cmd->add_option("--territory", synth_args.territory,
                          "catalonia, basque_country, scotland");
    synth_cmd->add_option("--n", synth_args.cfg.n_users, "number of users");
    synth_cmd->add_option("--pi-fraction", synth_args.cfg.pi_fraction,
                          "fraction of PI users");
    synth_cmd->add_option("--homophily", synth_args.cfg.homophily,
                          "within-group edge probability h");
    synth_cmd->add_option("--mean-degree", synth_args.cfg.mean_degree,
                          "mean undirected degree");
    synth_cmd->add_option("--tweets-per-user", synth_args.cfg.tweets_per_user,
                          "base timeline tweets per user");
    synth_cmd->add_option("--vocab", synth_args.cfg.token_vocab_per_group,
                          "tokens per group pool");
    synth_cmd->add_option("--overlap", synth_args.cfg.token_overlap,
                          "shared mass between group token distributions");
    synth_cmd->add_option("--contrast", synth_args.cfg.group_contrast,
                          "profile/behavior group contrast in [0,1]");
    synth_cmd->add_option("--degree-boost", synth_args.cfg.pi_degree_boost,
                          "PI edge-sourcing rate multiplier");
    synth_cmd->add_option("--seed", synth_args.cfg.seed, "random seed");

    ExportArgs export_args;
    auto* export_cmd =
        app.add_subcommand("export-graph", "export a graph for external tools");
    add_data_options(export_cmd, export_args.data);
    export_cmd->add_option("--out", export_args.out, "output directory");
    export_cmd->add_option("--graph", export_args.graph, "follow or interaction");
    export_cmd->add_option("--format", export_args.format, "dot, graphml, or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (label_cmd->parsed()) return cmd_label(*label_cmd, label_args);
        if (homophily_cmd->parsed()) return cmd_homophily(*homophily_cmd, homophily_args);
        if (compare_cmd->parsed()) return cmd_compare(*compare_cmd, compare_args);
        if (featurize_cmd->parsed()) return cmd_featurize(*featurize_cmd, featurize_args);
        if (classify_cmd->parsed()) return cmd_classify(*classify_cmd, classify_args);
        if (synth_cmd->parsed()) return cmd_synth(*synth_cmd, synth_args);
        if (export_cmd->parsed()) return cmd_export_graph(*export_cmd, export_args);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
