#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "microasm/errors.hpp"
#include "microasm/log.hpp"

namespace microasm {

inline constexpr int kCorpusFileVersion = 1;

enum class Polarity { positive = 0, negative = 1 };

inline const char* to_string(Polarity p) {
    return p == Polarity::positive ? "pos" : "neg";
}

inline std::optional<Polarity> polarity_from_string(std::string_view s) {
    if (s == "pos") return Polarity::positive;
    if (s == "neg") return Polarity::negative;
    return std::nullopt;
}

struct RawDocument {
    std::string id;
    std::string text;
    std::optional<Polarity> label;
    std::optional<double> rating;
};

using WordId = std::int32_t;
using WordPair = std::pair<WordId, WordId>;

struct Document {
    std::string id;
    std::vector<WordId> tokens;
    std::vector<WordPair> pairs; // word ids, first member earlier in the token stream
    std::optional<Polarity> gold;
};

// word <-> index bijection, ids assigned by first occurrence
class Vocabulary {
public:
    WordId add(const std::string& w) {
        auto it = index_.find(w);
        if (it != index_.end()) return it->second;
        WordId id = static_cast<WordId>(words_.size());
        words_.push_back(w);
        index_.emplace(w, id);
        return id;
    }

    std::optional<WordId> find(const std::string& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> index_;
};

inline const std::vector<std::string>& default_negators() {
    static const std::vector<std::string> list = {
        "not", "no", "never", "cannot", "nt", "n't", "dont", "didnt", "isnt", "wasnt"};
    return list;
}

struct PrepOptions {
    bool lowercase = true;
    bool pretokenized = false; // input B: split on whitespace only
    std::vector<std::string> stopwords;
    std::vector<std::string> negators = default_negators();
    int negation_window = 5;
    int pair_window = 5;
    double rating_threshold = 3.0; // rating < threshold => negative
};

// Whitespace/punctuation-delimited tokens. '_' and '\'' stay inside tokens
// (negation prefixes, clitics); bytes >= 0x80 are kept so multi-byte UTF-8
// words survive intact. Lowercasing is ASCII-only.
inline std::vector<std::string> tokenize(std::string_view text, bool lowercase = true,
                                         const std::unordered_set<std::string>& stopwords = {}) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            if (stopwords.empty() || stopwords.find(cur) == stopwords.end()) out.push_back(cur);
            cur.clear();
        }
    };
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool word_char = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                         (c >= '0' && c <= '9') || c == '_' || c == '\'' || c >= 0x80;
        if (word_char) {
            if (lowercase && c >= 'A' && c <= 'Z')
                cur.push_back(static_cast<char>(c - 'A' + 'a'));
            else
                cur.push_back(ch);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline std::vector<std::string> split_whitespace(std::string_view text, bool lowercase,
                                                 const std::unordered_set<std::string>& stopwords = {}) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            if (stopwords.empty() || stopwords.find(cur) == stopwords.end()) out.push_back(cur);
            cur.clear();
        }
    };
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            flush();
        } else if (lowercase && c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            cur.push_back(ch);
        }
    }
    flush();
    return out;
}

inline constexpr std::string_view kNegationPrefix = "not_";

inline bool has_negation_prefix(std::string_view w) {
    return w.size() > kNegationPrefix.size() &&
           w.substr(0, kNegationPrefix.size()) == kNegationPrefix;
}

inline std::string toggle_negation_prefix(const std::string& w) {
    if (has_negation_prefix(w)) return w.substr(kNegationPrefix.size());
    return std::string(kNegationPrefix) + w;
}

// Each negator flips the up-to-`window` tokens that follow it (positions
// counted in the input sequence); a flip adds the not_ prefix, or removes it
// if already present, so an even number of covering negators cancels out.
// Negator tokens are dropped and never receive a prefix themselves.
inline std::vector<std::string> apply_negation(const std::vector<std::string>& tokens,
                                               const std::unordered_set<std::string>& negators,
                                               int window) {
    if (window < 1) throw config_error("negation window must be >= 1");
    std::vector<int> flips(tokens.size(), 0);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (negators.count(tokens[i]) == 0) continue;
        std::size_t end = std::min(tokens.size(), i + 1 + static_cast<std::size_t>(window));
        for (std::size_t j = i + 1; j < end; ++j) ++flips[j];
    }
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (negators.count(tokens[i]) != 0) continue;
        out.push_back((flips[i] % 2) ? toggle_negation_prefix(tokens[i]) : tokens[i]);
    }
    return out;
}

// All pairs (i, j) with 0 < j - i <= window, kept in positional order,
// duplicates retained.
inline std::vector<WordPair> extract_pairs(const std::vector<WordId>& tokens, int window) {
    if (window < 1) throw config_error("pair window must be >= 1");
    std::vector<WordPair> pairs;
    const std::size_t n = tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t end = std::min(n, i + 1 + static_cast<std::size_t>(window));
        for (std::size_t j = i + 1; j < end; ++j) pairs.emplace_back(tokens[i], tokens[j]);
    }
    return pairs;
}

struct Corpus {
    std::vector<Document> documents; // training set: at least one pair each
    std::vector<Document> dropped;   // zero-pair side list, kept for reporting
    Vocabulary vocabulary;
    PrepOptions options;

    std::size_t doc_count() const { return documents.size(); }
    std::size_t vocab_size() const { return vocabulary.size(); }
    std::size_t pair_count() const {
        std::size_t n = 0;
        for (const auto& d : documents) n += d.pairs.size();
        return n;
    }
};

inline std::optional<Polarity> gold_from(const RawDocument& raw, double threshold) {
    if (raw.label) return raw.label;
    if (raw.rating) return *raw.rating < threshold ? Polarity::negative : Polarity::positive;
    return std::nullopt;
}

// tokenize -> negation -> vocabulary assignment -> pair extraction.
// Zero-pair documents land in the side list; the vocabulary covers every
// document (including later-dropped ones), ordered by first occurrence.
inline Corpus build_corpus(const std::vector<RawDocument>& raws, const PrepOptions& opts) {
    if (raws.empty()) throw input_error("no input documents");
    std::unordered_set<std::string> stop(opts.stopwords.begin(), opts.stopwords.end());
    std::unordered_set<std::string> neg(opts.negators.begin(), opts.negators.end());
    std::unordered_set<std::string> seen_ids;

    Corpus corpus;
    corpus.options = opts;
    for (const auto& raw : raws) {
        if (!seen_ids.insert(raw.id).second)
            throw input_error("duplicate document id: " + raw.id);
        std::vector<std::string> toks = opts.pretokenized
                                            ? split_whitespace(raw.text, opts.lowercase, stop)
                                            : tokenize(raw.text, opts.lowercase, stop);
        toks = apply_negation(toks, neg, opts.negation_window);

        Document doc;
        doc.id = raw.id;
        doc.gold = gold_from(raw, opts.rating_threshold);
        doc.tokens.reserve(toks.size());
        for (const auto& t : toks) doc.tokens.push_back(corpus.vocabulary.add(t));
        doc.pairs = extract_pairs(doc.tokens, opts.pair_window);

        if (doc.pairs.empty())
            corpus.dropped.push_back(std::move(doc));
        else
            corpus.documents.push_back(std::move(doc));
    }
    if (corpus.documents.empty())
        throw input_error("empty corpus: no document yields at least one word pair");
    return corpus;
}

// ---- input readers ----------------------------------------------------

struct ReadIssue {
    std::size_t line;
    std::string message;
};

// JSON Lines: {"id": str, "text": str, "label": "pos"|"neg"?, "rating": number?}
inline std::vector<RawDocument> read_jsonl(std::istream& in, bool strict,
                                           std::vector<ReadIssue>* issues = nullptr) {
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        if (strict)
            throw input_error("line " + std::to_string(lineno) + ": " + msg);
        if (issues) issues->push_back({lineno, msg});
        log_warn("skipping line %zu: %s", lineno, msg.c_str());
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            fail("not a JSON object");
            continue;
        }
        RawDocument raw;
        if (j.contains("id") && j["id"].is_string())
            raw.id = j["id"].get<std::string>();
        else if (j.contains("id") && j["id"].is_number())
            raw.id = j["id"].dump();
        else {
            fail("missing or non-string \"id\"");
            continue;
        }
        if (!j.contains("text") || !j["text"].is_string()) {
            fail("missing or non-string \"text\"");
            continue;
        }
        raw.text = j["text"].get<std::string>();
        if (raw.text.find_first_not_of(" \t\r\n") == std::string::npos) {
            fail("empty text");
            continue;
        }
        if (j.contains("label") && !j["label"].is_null()) {
            if (!j["label"].is_string()) {
                fail("non-string \"label\"");
                continue;
            }
            auto p = polarity_from_string(j["label"].get<std::string>());
            if (!p) {
                fail("label must be \"pos\" or \"neg\"");
                continue;
            }
            raw.label = p;
        }
        if (j.contains("rating") && !j["rating"].is_null()) {
            if (!j["rating"].is_number()) {
                fail("non-numeric \"rating\"");
                continue;
            }
            raw.rating = j["rating"].get<double>();
        }
        docs.push_back(std::move(raw));
    }
    return docs;
}

// plain text: one pre-tokenized document per line, ids are 1-based line numbers
inline std::vector<RawDocument> read_plain(std::istream& in) {
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        RawDocument raw;
        raw.id = std::to_string(lineno);
        raw.text = line;
        docs.push_back(std::move(raw));
    }
    return docs;
}

// ---- corpus file ------------------------------------------------------

inline nlohmann::json options_to_json(const PrepOptions& o) {
    return nlohmann::json{{"lowercase", o.lowercase},
                          {"pretokenized", o.pretokenized},
                          {"stopwords", o.stopwords},
                          {"negators", o.negators},
                          {"negation_window", o.negation_window},
                          {"pair_window", o.pair_window},
                          {"rating_threshold", o.rating_threshold}};
}

inline PrepOptions options_from_json(const nlohmann::json& j) {
    PrepOptions o;
    o.lowercase = j.at("lowercase").get<bool>();
    o.pretokenized = j.at("pretokenized").get<bool>();
    o.stopwords = j.at("stopwords").get<std::vector<std::string>>();
    o.negators = j.at("negators").get<std::vector<std::string>>();
    o.negation_window = j.at("negation_window").get<int>();
    o.pair_window = j.at("pair_window").get<int>();
    o.rating_threshold = j.at("rating_threshold").get<double>();
    return o;
}

inline nlohmann::json document_to_json(const Document& d) {
    nlohmann::json pj = nlohmann::json::array();
    for (const auto& p : d.pairs) pj.push_back({p.first, p.second});
    nlohmann::json j{{"id", d.id}, {"tokens", d.tokens}, {"pairs", pj}};
    j["gold"] = d.gold ? nlohmann::json(to_string(*d.gold)) : nlohmann::json(nullptr);
    return j;
}

inline Document document_from_json(const nlohmann::json& j) {
    Document d;
    d.id = j.at("id").get<std::string>();
    d.tokens = j.at("tokens").get<std::vector<WordId>>();
    for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2) throw input_error("malformed pair in document " + d.id);
        d.pairs.emplace_back(p[0].get<WordId>(), p[1].get<WordId>());
    }
    if (!j.at("gold").is_null()) d.gold = polarity_from_string(j.at("gold").get<std::string>());
    return d;
}

inline nlohmann::json corpus_to_json(const Corpus& c) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : c.documents) docs.push_back(document_to_json(d));
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& d : c.dropped) dropped.push_back(document_to_json(d));
    return nlohmann::json{{"version", kCorpusFileVersion},
                          {"options", options_to_json(c.options)},
                          {"vocabulary", c.vocabulary.words()},
                          {"documents", docs},
                          {"dropped", dropped}};
}

inline Corpus corpus_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version")) throw input_error("not a corpus file");
    int version = j.at("version").get<int>();
    if (version != kCorpusFileVersion)
        throw version_error("unsupported corpus file version " + std::to_string(version));
    Corpus c;
    c.options = options_from_json(j.at("options"));
    for (const auto& w : j.at("vocabulary")) c.vocabulary.add(w.get<std::string>());
    for (const auto& dj : j.at("documents")) c.documents.push_back(document_from_json(dj));
    if (j.contains("dropped"))
        for (const auto& dj : j.at("dropped")) c.dropped.push_back(document_from_json(dj));
    const auto V = static_cast<WordId>(c.vocabulary.size());
    auto check = [V](const Document& d) {
        for (WordId t : d.tokens)
            if (t < 0 || t >= V) throw input_error("token id out of range in document " + d.id);
        for (const auto& p : d.pairs)
            if (p.first < 0 || p.first >= V || p.second < 0 || p.second >= V)
                throw input_error("pair word id out of range in document " + d.id);
    };
    for (const auto& d : c.documents) check(d);
    for (const auto& d : c.dropped) check(d);
    return c;
}

inline std::string corpus_to_string(const Corpus& c) { return corpus_to_json(c).dump(); }

inline void save_corpus(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write corpus file: " + path);
    out << corpus_to_string(c) << '\n';
}

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read corpus file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw input_error("corpus file is not valid JSON: " + path);
    return corpus_from_json(j);
}

} // namespace microasm
