#include "natid/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "natid/util.hpp"

namespace natid::textfeat {

namespace {

bool is_word_cp(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z') || cp == '_';
    return cp >= 0xC0;
}

bool is_space_cp(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

bool starts_with(const std::string& s, std::size_t pos, const char* prefix) {
    return s.compare(pos, std::strlen(prefix), prefix) == 0;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    const std::string folded = unicode_fold(text);
    std::vector<std::string> tokens;

    // Split into whitespace-delimited chunks of code points first so URL and
    // mention detection sees whole "words".
    std::size_t i = 0;
    while (i < folded.size()) {
        std::size_t next = i;
        if (is_space_cp(utf8_decode(folded, next))) {
            i = next;
            continue;
        }
        std::size_t start = i;
        while (i < folded.size()) {
            next = i;
            if (is_space_cp(utf8_decode(folded, next))) break;
            i = next;
        }
        std::string chunk = folded.substr(start, i - start);

        // Trim decoration so "(https://x)" still registers as a URL.
        std::size_t lead = 0;
        while (lead < chunk.size()) {
            std::size_t tmp = lead;
            char32_t cp = utf8_decode(chunk, tmp);
            if (is_word_cp(cp) || cp == '#' || cp == '@') break;
            lead = tmp;
        }

        if (starts_with(chunk, lead, "http://") ||
            starts_with(chunk, lead, "https://") ||
            starts_with(chunk, lead, "www.")) {
            tokens.push_back("<url>");
            continue;
        }

        std::size_t p = lead;
        while (p < chunk.size()) {
            std::size_t tmp = p;
            char32_t cp = utf8_decode(chunk, tmp);
            if (cp == '@' || cp == '#') {
                // Collect the word run that follows.
                std::size_t run_start = tmp;
                std::size_t q = tmp;
                while (q < chunk.size()) {
                    std::size_t t2 = q;
                    if (!is_word_cp(utf8_decode(chunk, t2))) break;
                    q = t2;
                }
                if (q > run_start) {
                    if (cp == '@')
                        tokens.push_back("<mention>");
                    else
                        tokens.push_back("#" + chunk.substr(run_start, q - run_start));
                    p = q;
                    continue;
                }
                p = tmp;
                continue;
            }
            if (!is_word_cp(cp)) {
                p = tmp;
                continue;
            }
            std::size_t q = p;
            while (q < chunk.size()) {
                std::size_t t2 = q;
                if (!is_word_cp(utf8_decode(chunk, t2))) break;
                q = t2;
            }
            tokens.push_back(chunk.substr(p, q - p));
            p = q;
        }
    }
    return tokens;
}

EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                              const SkipgramParams& params) {
    if (corpus.empty()) throw InputError("empty corpus");
    if (params.dimension < 2 || params.window < 1 || params.negatives < 1 ||
        params.epochs < 1)
        throw InputError("invalid skip-gram hyperparameters");

    std::map<std::string, std::int64_t> counts;
    for (const auto& sent : corpus)
        for (const auto& tok : sent)
            if (!tok.empty()) ++counts[tok];

    struct VocabEntry {
        std::string token;
        std::int64_t count;
    };
    std::vector<VocabEntry> vocab;
    for (const auto& [tok, c] : counts)
        if (c >= params.min_count) vocab.push_back({tok, c});
    if (vocab.empty())
        throw InputError("vocabulary empty after min_count filter");
    std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
        return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    std::unordered_map<std::string, int> index;
    for (std::size_t v = 0; v < vocab.size(); ++v) index[vocab[v].token] = (int)v;

    std::vector<std::vector<int>> sentences;
    std::int64_t positions_per_epoch = 0;
    for (const auto& sent : corpus) {
        std::vector<int> ids;
        for (const auto& tok : sent) {
            auto it = index.find(tok);
            if (it != index.end()) ids.push_back(it->second);
        }
        positions_per_epoch += (std::int64_t)ids.size();
        sentences.push_back(std::move(ids));
    }

    const std::size_t V = vocab.size();
    const int dim = params.dimension;
    std::vector<double> in(V * dim), out(V * dim, 0.0);
    Rng init_rng(derive_seed(params.seed, 1));
    for (auto& w : in) w = (init_rng.uniform() - 0.5) / dim;

    // Unigram^0.75 noise distribution as a cumulative table.
    std::vector<double> cdf(V);
    double acc = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
        acc += std::pow((double)vocab[v].count, 0.75);
        cdf[v] = acc;
    }

    Rng rng(derive_seed(params.seed, 2));
    auto sample_noise = [&]() {
        double r = rng.uniform() * acc;
        return (int)(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    };

    const double total = (double)positions_per_epoch * params.epochs;
    std::int64_t processed = 0;
    std::vector<double> grad_center(dim);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (const auto& sent : sentences) {
            for (std::size_t pos = 0; pos < sent.size(); ++pos) {
                double lr = params.learning_rate *
                            std::max(1.0 - processed / total, 1e-4);
                ++processed;
                int center = sent[pos];
                int b = 1 + (int)rng.below((std::uint64_t)params.window);
                for (int off = -b; off <= b; ++off) {
                    if (off == 0) continue;
                    std::int64_t cpos = (std::int64_t)pos + off;
                    if (cpos < 0 || cpos >= (std::int64_t)sent.size()) continue;
                    int target = sent[cpos];
                    double* wc = &in[(std::size_t)center * dim];
                    std::fill(grad_center.begin(), grad_center.end(), 0.0);
                    for (int k = 0; k <= params.negatives; ++k) {
                        int tgt;
                        double label;
                        if (k == 0) {
                            tgt = target;
                            label = 1.0;
                        } else {
                            tgt = sample_noise();
                            if (tgt == target) continue;
                            label = 0.0;
                        }
                        double* wo = &out[(std::size_t)tgt * dim];
                        double dot = 0.0;
                        for (int d = 0; d < dim; ++d) dot += wc[d] * wo[d];
                        double g = (label - 1.0 / (1.0 + std::exp(-dot))) * lr;
                        for (int d = 0; d < dim; ++d) {
                            grad_center[d] += g * wo[d];
                            wo[d] += g * wc[d];
                        }
                    }
                    for (int d = 0; d < dim; ++d) wc[d] += grad_center[d];
                }
            }
        }
    }

    EmbeddingTable table;
    table.dimension = dim;
    {
        std::ostringstream meta;
        meta << "skipgram dim=" << dim << " window=" << params.window
             << " negatives=" << params.negatives << " epochs=" << params.epochs
             << " min_count=" << params.min_count << " lr=" << params.learning_rate
             << " seed=" << params.seed;
        table.meta = meta.str();
    }
    for (std::size_t v = 0; v < V; ++v)
        table.vectors.emplace(vocab[v].token,
                              std::vector<double>(in.begin() + v * dim,
                                                  in.begin() + (v + 1) * dim));
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::int64_t* duplicate_tokens) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    EmbeddingTable table;
    std::string line;
    std::int64_t lineno = 0, dups = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("#%", 0) == 0) {
            std::size_t skip = line.size() > 2 && line[2] == ' ' ? 3 : 2;
            table.meta = line.substr(skip);
            continue;
        }
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        std::vector<double> vec;
        std::string field;
        while (ss >> field) {
            char* endp = nullptr;
            double v = std::strtod(field.c_str(), &endp);
            if (endp == field.c_str() || *endp != '\0')
                throw InputError(path.string() + " line " +
                                 std::to_string(lineno) + ": bad number '" +
                                 field + "'");
            vec.push_back(v);
        }
        if (token.empty() || vec.empty())
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": expected 'token v1 ... vd'");
        if (table.dimension == 0) table.dimension = (int)vec.size();
        if ((int)vec.size() != table.dimension)
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": dimension " + std::to_string(vec.size()) +
                             " != " + std::to_string(table.dimension));
        auto [it, inserted] = table.vectors.insert_or_assign(token, std::move(vec));
        (void)it;
        if (!inserted) ++dups;
    }
    if (duplicate_tokens) *duplicate_tokens = dups;
    return table;
}

void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    if (!table.meta.empty()) out << "#% " << table.meta << '\n';
    std::vector<const std::string*> tokens;
    tokens.reserve(table.vectors.size());
    for (const auto& [tok, vec] : table.vectors) tokens.push_back(&tok);
    std::sort(tokens.begin(), tokens.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* tok : tokens) {
        out << *tok;
        for (double v : table.vectors.at(*tok)) out << ' ' << format_double(v);
        out << '\n';
    }
    if (!out) throw InputError("write failed for " + path.string());
}

std::vector<double> embed_text(const std::vector<std::string>& tokens,
                               const EmbeddingTable& table) {
    std::vector<double> sum(table.dimension, 0.0);
    std::vector<const std::string*> known;
    for (const auto& tok : tokens)
        if (table.vectors.count(tok)) known.push_back(&tok);
    if (known.empty()) return sum;
    std::sort(known.begin(), known.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* tok : known) {
        const auto& vec = table.vectors.at(*tok);
        for (int d = 0; d < table.dimension; ++d) sum[d] += vec[d];
    }
    for (auto& v : sum) v /= (double)known.size();
    return sum;
}

namespace {

void collect_trigrams(const std::string& text,
                      std::map<std::string, std::int64_t>& counts) {
    for (const auto& tok : tokenize(text)) {
        if (tok == "<url>" || tok == "<mention>") continue;
        std::string word = tok[0] == '#' ? tok.substr(1) : tok;
        if (word.empty()) continue;
        std::vector<char32_t> cps{' '};
        std::size_t i = 0;
        while (i < word.size()) cps.push_back(utf8_decode(word, i));
        cps.push_back(' ');
        for (std::size_t k = 0; k + 3 <= cps.size(); ++k) {
            std::string tri;
            for (std::size_t j = k; j < k + 3; ++j) utf8_encode(cps[j], tri);
            ++counts[tri];
        }
    }
}

std::vector<std::string> ranked_trigrams(
    const std::map<std::string, std::int64_t>& counts, std::size_t max_n) {
    std::vector<std::pair<std::string, std::int64_t>> items(counts.begin(),
                                                            counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (items.size() > max_n) items.resize(max_n);
    std::vector<std::string> out;
    out.reserve(items.size());
    for (auto& [tri, c] : items) out.push_back(std::move(tri));
    return out;
}

}  // namespace

LanguageProfile build_language_profile(const std::vector<std::string>& texts,
                                       const std::string& language,
                                       std::size_t max_trigrams) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& t : texts) collect_trigrams(t, counts);
    return {language, ranked_trigrams(counts, max_trigrams)};
}

std::string identify_language(const std::string& text,
                              const std::vector<LanguageProfile>& profiles) {
    if (profiles.empty()) throw InputError("no language profiles");
    if (utf8_length(text) < 10) return "und";
    std::map<std::string, std::int64_t> counts;
    collect_trigrams(text, counts);
    auto text_ranked = ranked_trigrams(counts, 300);
    if (text_ranked.empty()) return "und";

    std::string best;
    std::int64_t best_dist = -1;
    for (const auto& profile : profiles) {
        std::unordered_map<std::string, std::int64_t> rank_of;
        for (std::size_t r = 0; r < profile.trigrams.size(); ++r)
            rank_of.emplace(profile.trigrams[r], (std::int64_t)r);
        const std::int64_t penalty = (std::int64_t)profile.trigrams.size();
        std::int64_t dist = 0;
        for (std::size_t r = 0; r < text_ranked.size(); ++r) {
            auto it = rank_of.find(text_ranked[r]);
            dist += it == rank_of.end()
                        ? penalty
                        : std::llabs((std::int64_t)r - it->second);
        }
        if (best_dist < 0 || dist < best_dist) {
            best_dist = dist;
            best = profile.language;
        }
    }
    return best;
}

std::vector<LanguageProfile> load_language_profiles(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    // language -> (rank -> trigram); ordered so file order does not matter
    std::map<std::string, std::map<std::int64_t, std::string>> by_lang;
    std::vector<std::string> lang_order;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos
                                          : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": expected 'lang<TAB>trigram<TAB>rank'");
        std::string lang = line.substr(0, t1);
        std::string tri = line.substr(t1 + 1, t2 - t1 - 1);
        std::int64_t rank = std::strtoll(line.c_str() + t2 + 1, nullptr, 10);
        if (!by_lang.count(lang)) lang_order.push_back(lang);
        by_lang[lang][rank] = tri;
    }
    std::vector<LanguageProfile> out;
    for (const auto& lang : lang_order) {
        LanguageProfile p;
        p.language = lang;
        for (auto& [rank, tri] : by_lang[lang]) p.trigrams.push_back(tri);
        out.push_back(std::move(p));
    }
    return out;
}

void save_language_profiles(const std::vector<LanguageProfile>& profiles,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    for (const auto& p : profiles)
        for (std::size_t r = 0; r < p.trigrams.size(); ++r)
            out << p.language << '\t' << p.trigrams[r] << '\t' << r << '\n';
    if (!out) throw InputError("write failed for " + path.string());
}

SentimentResult sentiment_score(const std::vector<std::string>& tokens,
                                const SentimentLexicon& lexicon) {
    SentimentResult res;
    for (const auto& tok : tokens) {
        auto it = lexicon.polarity.find(tok);
        if (it != lexicon.polarity.end()) res.score += it->second;
    }
    res.cls = res.score > 0   ? SentimentClass::Pos
              : res.score < 0 ? SentimentClass::Neg
                              : SentimentClass::Neu;
    return res;
}

SentimentLexicon load_lexicon(const std::filesystem::path& path,
                              const std::string& language) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    SentimentLexicon lex;
    lex.language = language;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": expected 'token<TAB>polarity'");
        std::string tok = line.substr(0, tab);
        char* endp = nullptr;
        double v = std::strtod(line.c_str() + tab + 1, &endp);
        if (endp == line.c_str() + tab + 1 || v < -1.0 || v > 1.0)
            throw InputError(path.string() + " line " + std::to_string(lineno) +
                             ": polarity must be a number in [-1,1]");
        lex.polarity[tok] = v;
    }
    return lex;
}

void save_lexicon(const SentimentLexicon& lexicon,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    std::vector<const std::string*> tokens;
    for (const auto& [tok, v] : lexicon.polarity) tokens.push_back(&tok);
    std::sort(tokens.begin(), tokens.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* tok : tokens)
        out << *tok << '\t' << format_double(lexicon.polarity.at(*tok)) << '\n';
    if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace natid::textfeat
