#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"
#include "microasm/log.hpp"

namespace microasm {

// Polarity seed word lists. Sets are ordered so every downstream artifact
// built from a lexicon is deterministic.
struct SeedLexicon {
    std::set<std::string> positive;
    std::set<std::string> negative;

    bool is_seed(const std::string& w) const {
        return positive.count(w) != 0 || negative.count(w) != 0;
    }
};

// Adds the negation-toggled form of every seed to the opposite list
// (good -> not_good in negative, not_bad -> bad in positive). Applying it
// twice is a no-op. Throws when a word ends up in both lists.
inline SeedLexicon expand_lexicon(const SeedLexicon& in) {
    SeedLexicon out = in;
    for (const auto& w : in.positive) out.negative.insert(toggle_negation_prefix(w));
    for (const auto& w : in.negative) out.positive.insert(toggle_negation_prefix(w));
    for (const auto& w : out.positive)
        if (out.negative.count(w) != 0)
            throw input_error("seed word in both polarities after expansion: " + w);
    return out;
}

// Built-in English Paradigm+ lists.
inline SeedLexicon paradigm_plus_raw() {
    SeedLexicon lex;
    lex.positive = {"good",        "nice",      "excellent", "positive", "fortunate", "correct",
                    "superior",    "amazing",   "attractive", "awesome", "best",
                    "comfortable", "enjoy",     "fantastic", "favorite", "fun",       "glad",
                    "great",       "happy",     "impressive", "love",    "perfect",
                    "recommend",   "satisfied", "thank",     "worth"};
    lex.negative = {"bad",          "nasty",   "poor",     "negative", "unfortunate", "wrong",
                    "inferior",     "annoy",   "complain", "disappointed", "hate",    "junk",
                    "mess",         "dislike", "unworthy", "problem",  "regret",      "sorry",
                    "terrible",     "trouble", "unacceptable", "upset", "waste",      "worst",
                    "worthless"};
    return lex;
}

inline SeedLexicon default_lexicon() { return expand_lexicon(paradigm_plus_raw()); }

inline SeedLexicon lexicon_from_json(const nlohmann::json& j) {
    SeedLexicon lex;
    if (!j.is_object() || !j.contains("positive") || !j.contains("negative"))
        throw input_error("lexicon file must contain \"positive\" and \"negative\" arrays");
    for (const auto& w : j.at("positive")) lex.positive.insert(w.get<std::string>());
    for (const auto& w : j.at("negative")) lex.negative.insert(w.get<std::string>());
    if (lex.positive.empty() && lex.negative.empty())
        log_warn("lexicon is empty; sentiment identity will be unanchored");
    return expand_lexicon(lex);
}

inline SeedLexicon load_lexicon_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read lexicon file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw input_error("lexicon file is not valid JSON: " + path);
    return lexicon_from_json(j);
}

inline std::set<std::string> read_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read word list: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i > 0) line = line.substr(i);
        if (!line.empty()) words.insert(line);
    }
    return words;
}

inline SeedLexicon load_lexicon_lists(const std::string& pos_path, const std::string& neg_path) {
    SeedLexicon lex;
    lex.positive = read_word_list(pos_path);
    lex.negative = read_word_list(neg_path);
    if (lex.positive.empty() && lex.negative.empty())
        log_warn("lexicon is empty; sentiment identity will be unanchored");
    return expand_lexicon(lex);
}

// Dirichlet prior over (sentiment, word): base mass for neutral words,
// seed_match for a seed under its own polarity, zero under the opposite one.
// Rows beyond the two polarities (S > 2) carry base mass everywhere.
struct BetaPrior {
    int sentiments = 2;
    std::size_t vocab = 0;
    double base = 0.01;
    double seed_match = 0.1;
    std::vector<double> mass;    // [s * vocab + w]
    std::vector<double> row_sum; // [s]

    double at(int s, WordId w) const {
        return mass[static_cast<std::size_t>(s) * vocab + static_cast<std::size_t>(w)];
    }
    const double* row(int s) const { return mass.data() + static_cast<std::size_t>(s) * vocab; }
};

inline BetaPrior build_beta(const SeedLexicon& lexicon, const Vocabulary& vocabulary,
                            int sentiments = 2, double base = 0.01, double seed_match = 0.1) {
    if (base <= 0.0) throw config_error("beta base mass must be > 0");
    if (seed_match <= 0.0) throw config_error("beta seed mass must be > 0");
    if (sentiments < 1) throw config_error("sentiment count must be >= 1");

    BetaPrior beta;
    beta.sentiments = sentiments;
    beta.vocab = vocabulary.size();
    beta.base = base;
    beta.seed_match = seed_match;
    beta.mass.assign(static_cast<std::size_t>(sentiments) * beta.vocab, base);

    std::size_t seeds_in_vocab = 0;
    if (sentiments >= 2) {
        for (std::size_t w = 0; w < beta.vocab; ++w) {
            const std::string& word = vocabulary.word(static_cast<WordId>(w));
            bool pos = lexicon.positive.count(word) != 0;
            bool neg = lexicon.negative.count(word) != 0;
            if (!pos && !neg) continue;
            ++seeds_in_vocab;
            beta.mass[0 * beta.vocab + w] = pos ? seed_match : 0.0;
            beta.mass[1 * beta.vocab + w] = neg ? seed_match : 0.0;
        }
    }
    std::size_t lex_size = lexicon.positive.size() + lexicon.negative.size();
    if (lex_size > 0 && seeds_in_vocab < lex_size)
        log_debug("%zu of %zu seed words absent from the vocabulary", lex_size - seeds_in_vocab,
                  lex_size);

    beta.row_sum.assign(static_cast<std::size_t>(sentiments), 0.0);
    for (int s = 0; s < sentiments; ++s) {
        double sum = 0.0;
        for (std::size_t w = 0; w < beta.vocab; ++w) sum += beta.mass[static_cast<std::size_t>(s) * beta.vocab + w];
        beta.row_sum[static_cast<std::size_t>(s)] = sum;
    }
    return beta;
}

} // namespace microasm
