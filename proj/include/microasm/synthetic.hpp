#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"
#include "microasm/lexicon.hpp"
#include "microasm/rng.hpp"

namespace microasm {

// Fully specified generative configuration for a synthetic corpus: every
// latent distribution is given explicitly so tests can score recovery
// against exact ground truth.
struct SyntheticSpec {
    std::int32_t docs = 0;
    std::int32_t vocab = 0;
    std::int32_t clusters = 1;
    std::int32_t topics = 1;
    std::int32_t sentiments = 2;
    std::int32_t pairs_min = 1; // pairs per document ~ uniform int
    std::int32_t pairs_max = 1;

    std::vector<double> psi;   // [c]
    std::vector<double> pi;    // [c*S + s]
    std::vector<double> theta; // [(c*S + s)*T + z]
    std::vector<double> phi;   // [(s*T + z)*V + w]

    std::vector<WordId> pos_seed_ids;
    std::vector<WordId> neg_seed_ids;

    std::uint64_t rng_seed = 1;

    void validate() const {
        if (docs < 1 || vocab < 1) throw config_error("synthetic spec needs docs >= 1, vocab >= 1");
        if (clusters < 1 || topics < 1 || sentiments < 1)
            throw config_error("synthetic spec dimensions must be >= 1");
        if (pairs_min < 1 || pairs_max < pairs_min)
            throw config_error("synthetic pairs-per-document range is invalid");
        auto check = [](const std::vector<double>& p, std::size_t rows, std::size_t width,
                        const char* name) {
            if (p.size() != rows * width)
                throw config_error(std::string("synthetic spec: bad ") + name + " shape");
            for (std::size_t r = 0; r < rows; ++r) {
                double total = 0.0;
                for (std::size_t i = 0; i < width; ++i) {
                    const double v = p[r * width + i];
                    if (v < 0.0) throw config_error(std::string("synthetic spec: negative mass in ") + name);
                    total += v;
                }
                if (std::abs(total - 1.0) > 1e-9)
                    throw config_error(std::string("synthetic spec: ") + name +
                                       " row does not sum to 1");
            }
        };
        check(psi, 1, static_cast<std::size_t>(clusters), "psi");
        check(pi, static_cast<std::size_t>(clusters), static_cast<std::size_t>(sentiments), "pi");
        check(theta, static_cast<std::size_t>(clusters) * sentiments,
              static_cast<std::size_t>(topics), "theta");
        check(phi, static_cast<std::size_t>(sentiments) * topics, static_cast<std::size_t>(vocab),
              "phi");
        for (WordId w : pos_seed_ids)
            for (WordId v : neg_seed_ids)
                if (w == v) throw config_error("synthetic spec: seed sets overlap");
    }
};

struct SyntheticTruth {
    std::vector<std::int32_t> cluster_of_doc;
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pair_assign;
    std::vector<Polarity> majority_sentiment; // realized per-document majority, ties positive
};

struct SyntheticData {
    Corpus corpus;
    SyntheticTruth truth;
};

inline std::string synthetic_surface(const SyntheticSpec& spec, WordId w) {
    for (std::size_t i = 0; i < spec.pos_seed_ids.size(); ++i)
        if (spec.pos_seed_ids[i] == w) return "seedpos" + std::to_string(i);
    for (std::size_t i = 0; i < spec.neg_seed_ids.size(); ++i)
        if (spec.neg_seed_ids[i] == w) return "seedneg" + std::to_string(i);
    return "w" + std::to_string(w);
}

namespace detail {

inline std::int32_t draw_categorical(Rng& rng, const double* p, std::int32_t n) {
    double u = rng.uniform();
    double cum = 0.0;
    for (std::int32_t i = 0; i < n; ++i) {
        cum += p[i];
        if (u <= cum) return i;
    }
    return n - 1;
}

} // namespace detail

// cluster ~ psi, then per pair: s ~ pi(c), z ~ theta(c, s), both words
// ~ phi(s, z). Tokens are the flattened pairs, so every stored pair sits at
// positional distance 1.
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.rng_seed);

    SyntheticData out;
    out.corpus.options.pair_window = 1;
    for (WordId w = 0; w < spec.vocab; ++w) out.corpus.vocabulary.add(synthetic_surface(spec, w));

    const std::int32_t S = spec.sentiments, T = spec.topics, V = spec.vocab;
    for (std::int32_t d = 0; d < spec.docs; ++d) {
        const std::int32_t c = detail::draw_categorical(rng, spec.psi.data(), spec.clusters);
        const std::int32_t n_pairs =
            spec.pairs_min + rng.uniform_int(spec.pairs_max - spec.pairs_min + 1);
        Document doc;
        doc.id = "synth-" + std::to_string(d);
        std::vector<std::pair<std::int32_t, std::int32_t>> assigns;
        std::vector<std::int64_t> sent_count(static_cast<std::size_t>(S), 0);
        for (std::int32_t p = 0; p < n_pairs; ++p) {
            const std::int32_t s = detail::draw_categorical(
                rng, spec.pi.data() + static_cast<std::size_t>(c) * S, S);
            const std::int32_t z = detail::draw_categorical(
                rng, spec.theta.data() + (static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s)) * T, T);
            const double* word_dist =
                spec.phi.data() + (static_cast<std::size_t>(s) * T + static_cast<std::size_t>(z)) * V;
            const WordId w1 = detail::draw_categorical(rng, word_dist, V);
            const WordId w2 = detail::draw_categorical(rng, word_dist, V);
            doc.tokens.push_back(w1);
            doc.tokens.push_back(w2);
            doc.pairs.emplace_back(w1, w2);
            assigns.emplace_back(s, z);
            sent_count[static_cast<std::size_t>(s)] += 1;
        }
        // realized majority sentiment; sentiment 0 (positive) wins ties
        if (S == 2) {
            doc.gold = sent_count[0] >= sent_count[1] ? Polarity::positive : Polarity::negative;
            out.truth.majority_sentiment.push_back(*doc.gold);
        }
        out.truth.cluster_of_doc.push_back(c);
        out.truth.pair_assign.push_back(std::move(assigns));
        out.corpus.documents.push_back(std::move(doc));
    }
    return out;
}

inline SeedLexicon planted_lexicon(const SyntheticSpec& spec) {
    SeedLexicon lex;
    for (std::size_t i = 0; i < spec.pos_seed_ids.size(); ++i)
        lex.positive.insert("seedpos" + std::to_string(i));
    for (std::size_t i = 0; i < spec.neg_seed_ids.size(); ++i)
        lex.negative.insert("seedneg" + std::to_string(i));
    return expand_lexicon(lex);
}

// ---- well-separated preset ----------------------------------------------

struct SeparatedConfig {
    std::int32_t docs = 2000;
    std::int32_t vocab = 200;
    std::int32_t clusters = 5;
    std::int32_t topics = 5;
    std::int32_t seeds_per_polarity = 10;
    std::int32_t pairs_min = 15;
    std::int32_t pairs_max = 25;
    double seed_mass = 0.10;     // phi mass on the own-polarity seed block
    double topic_mass = 0.88;    // phi mass on the (s, z) word block
    double cluster_topic_mass = 0.8;
    double sentiment_skew = 0.9; // dominant-sentiment share per cluster
    std::uint64_t rng_seed = 1;
};

struct SeparatedSynthetic {
    SyntheticSpec spec;
    // planted word block per (s*T + z); recovered top terms are scored
    // against these sets
    std::vector<std::vector<WordId>> topic_words;
};

// Two-sentiment corpus with one dominant topic per cluster, polarity seeds
// mixed into every pair's sentiment, and disjoint per-(s, z) word blocks.
inline SeparatedSynthetic make_separated_spec(const SeparatedConfig& cfg) {
    constexpr std::int32_t S = 2;
    const std::int32_t C = cfg.clusters, T = cfg.topics, V = cfg.vocab;
    const std::int32_t n_seeds = 2 * cfg.seeds_per_polarity;
    if (V <= n_seeds + S * T) throw config_error("separated preset: vocabulary too small");

    SeparatedSynthetic out;
    SyntheticSpec& spec = out.spec;
    spec.docs = cfg.docs;
    spec.vocab = V;
    spec.clusters = C;
    spec.topics = T;
    spec.sentiments = S;
    spec.pairs_min = cfg.pairs_min;
    spec.pairs_max = cfg.pairs_max;
    spec.rng_seed = cfg.rng_seed;

    for (std::int32_t i = 0; i < cfg.seeds_per_polarity; ++i) {
        spec.pos_seed_ids.push_back(i);
        spec.neg_seed_ids.push_back(cfg.seeds_per_polarity + i);
    }

    spec.psi.assign(static_cast<std::size_t>(C), 1.0 / static_cast<double>(C));

    spec.pi.assign(static_cast<std::size_t>(C) * S, 0.0);
    for (std::int32_t c = 0; c < C; ++c) {
        const double skew = cfg.sentiment_skew;
        spec.pi[static_cast<std::size_t>(c) * S + 0] = (c % 2 == 0) ? skew : 1.0 - skew;
        spec.pi[static_cast<std::size_t>(c) * S + 1] = (c % 2 == 0) ? 1.0 - skew : skew;
    }

    spec.theta.assign(static_cast<std::size_t>(C) * S * T, 0.0);
    for (std::int32_t c = 0; c < C; ++c)
        for (std::int32_t s = 0; s < S; ++s) {
            const std::size_t row = (static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s)) *
                                    static_cast<std::size_t>(T);
            for (std::int32_t z = 0; z < T; ++z)
                spec.theta[row + static_cast<std::size_t>(z)] =
                    (z == c % T) ? cfg.cluster_topic_mass
                                 : (1.0 - cfg.cluster_topic_mass) / static_cast<double>(T - 1);
        }

    // word blocks: seeds first, then S*T disjoint topical blocks over the rest
    const std::int32_t n_topical = V - n_seeds;
    const std::int32_t block = n_topical / (S * T);
    spec.phi.assign(static_cast<std::size_t>(S) * T * V, 0.0);
    out.topic_words.resize(static_cast<std::size_t>(S) * T);
    const double spread_mass = 1.0 - cfg.topic_mass - cfg.seed_mass;
    if (spread_mass < 0.0) throw config_error("separated preset: topic and seed mass exceed 1");
    for (std::int32_t s = 0; s < S; ++s)
        for (std::int32_t z = 0; z < T; ++z) {
            const std::size_t row = (static_cast<std::size_t>(s) * T + static_cast<std::size_t>(z)) *
                                    static_cast<std::size_t>(V);
            const std::int32_t begin = n_seeds + (s * T + z) * block;
            const std::int32_t end = (s * T + z == S * T - 1) ? V : begin + block;
            for (WordId w = begin; w < end; ++w) {
                spec.phi[row + static_cast<std::size_t>(w)] =
                    cfg.topic_mass / static_cast<double>(end - begin);
                out.topic_words[static_cast<std::size_t>(s) * T + z].push_back(w);
            }
            const auto& seeds = (s == 0) ? spec.pos_seed_ids : spec.neg_seed_ids;
            for (WordId w : seeds)
                spec.phi[row + static_cast<std::size_t>(w)] +=
                    cfg.seed_mass / static_cast<double>(seeds.size());
            for (WordId w = n_seeds; w < V; ++w)
                spec.phi[row + static_cast<std::size_t>(w)] +=
                    spread_mass / static_cast<double>(n_topical);
        }
    return out;
}

} // namespace microasm
