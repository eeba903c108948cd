#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "microasm/corpus.hpp"

using namespace microasm;

namespace {

std::unordered_set<std::string> default_negator_set() {
    return {default_negators().begin(), default_negators().end()};
}

std::vector<std::string> surface_tokens(const Corpus& c, const Document& d) {
    std::vector<std::string> out;
    for (WordId t : d.tokens) out.push_back(c.vocabulary.word(t));
    return out;
}

} // namespace

TEST_CASE("tokenize splits on whitespace and punctuation") {
    CHECK(tokenize("Great food!") == std::vector<std::string>{"great", "food"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t  ").empty());
    CHECK(tokenize("The pasta was bad", true, {"the", "was"}) ==
          std::vector<std::string>{"pasta", "bad"});
}

TEST_CASE("tokenize keeps case when asked and preserves token-internal marks") {
    CHECK(tokenize("Great Food", false) == std::vector<std::string>{"Great", "Food"});
    CHECK(tokenize("don't worry") == std::vector<std::string>{"don't", "worry"});
    CHECK(tokenize("not_good vibes") == std::vector<std::string>{"not_good", "vibes"});
}

TEST_CASE("tokenize keeps multi-byte UTF-8 words whole") {
    auto toks = tokenize("좋다 영화!");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0] == "좋다");
    CHECK(toks[1] == "영화");
}

TEST_CASE("negation prefixes the following window and drops the negator") {
    auto neg = default_negator_set();
    CHECK(apply_negation({"not", "like", "movie"}, neg, 5) ==
          std::vector<std::string>{"not_like", "not_movie"});
    CHECK(apply_negation({"good"}, neg, 5) == std::vector<std::string>{"good"});
    CHECK(apply_negation({"not", "not", "good"}, neg, 5) == std::vector<std::string>{"good"});
}

TEST_CASE("negation window is bounded") {
    auto neg = default_negator_set();
    CHECK(apply_negation({"not", "a", "b", "c"}, neg, 1) ==
          std::vector<std::string>{"not_a", "b", "c"});
    CHECK(apply_negation({"a", "not", "b"}, neg, 2) == std::vector<std::string>{"a", "not_b"});
}

TEST_CASE("negation toggles an existing prefix") {
    auto neg = default_negator_set();
    CHECK(apply_negation({"not", "not_good"}, neg, 5) == std::vector<std::string>{"good"});
}

TEST_CASE("negation is identity on negator-free input") {
    auto neg = default_negator_set();
    // property: arbitrary negator-free token streams pass through unchanged
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::string> toks;
        const int n = static_cast<int>(gen() % 12);
        for (int i = 0; i < n; ++i) toks.push_back("w" + std::to_string(gen() % 20));
        CHECK(apply_negation(toks, neg, 5) == toks);
    }
}

TEST_CASE("pair extraction respects the window and keeps duplicates") {
    using P = std::vector<WordPair>;
    CHECK(extract_pairs({0, 1, 2}, 5) == P{{0, 1}, {0, 2}, {1, 2}});
    CHECK(extract_pairs({0, 1, 2}, 1) == P{{0, 1}, {1, 2}});
    CHECK(extract_pairs({0}, 3).empty());
    CHECK(extract_pairs({}, 3).empty());
    CHECK(extract_pairs({1, 1, 1}, 2) == P{{1, 1}, {1, 1}, {1, 1}});
}

TEST_CASE("pair count bounds") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = static_cast<int>(gen() % 30);
        const int window = 1 + static_cast<int>(gen() % 8);
        std::vector<WordId> toks;
        for (int i = 0; i < n; ++i) toks.push_back(static_cast<WordId>(gen() % 50));
        const auto pairs = extract_pairs(toks, window);
        CHECK(pairs.size() <= static_cast<std::size_t>(n) * static_cast<std::size_t>(window));
        if (n <= window + 1)
            CHECK(pairs.size() == static_cast<std::size_t>(n) * (n - 1) / 2);
    }
}

TEST_CASE("build_corpus wires the pipeline together") {
    std::vector<RawDocument> raws = {
        {"a", "Great food great value", std::nullopt, std::nullopt},
        {"b", "The food was not good", std::nullopt, std::nullopt},
        {"c", "ok", std::nullopt, std::nullopt},
    };
    PrepOptions opts;
    Corpus c = build_corpus(raws, opts);
    REQUIRE(c.documents.size() == 2);
    REQUIRE(c.dropped.size() == 1);
    CHECK(c.dropped[0].id == "c");

    // vocabulary is shared across documents, assigned by first occurrence
    CHECK(surface_tokens(c, c.documents[0]) ==
          std::vector<std::string>{"great", "food", "great", "value"});
    CHECK(surface_tokens(c, c.documents[1]) ==
          std::vector<std::string>{"the", "food", "was", "not_good"});
    REQUIRE(c.vocabulary.find("food").has_value());
    // the shared word carries one id in both documents
    CHECK(c.documents[0].tokens[1] == *c.vocabulary.find("food"));
    CHECK(c.documents[1].tokens[1] == *c.vocabulary.find("food"));
}

TEST_CASE("vocabulary indices round-trip to unique surface words") {
    std::vector<RawDocument> raws = {
        {"a", "alpha beta gamma alpha", std::nullopt, std::nullopt},
        {"b", "beta delta", std::nullopt, std::nullopt},
    };
    Corpus c = build_corpus(raws, PrepOptions{});
    for (const auto& d : c.documents)
        for (WordId t : d.tokens) {
            const std::string& w = c.vocabulary.word(t);
            REQUIRE(c.vocabulary.find(w).has_value());
            CHECK(*c.vocabulary.find(w) == t);
        }
    CHECK(c.vocab_size() == 4);
}

TEST_CASE("gold labels come from explicit labels or rating thresholds") {
    std::vector<RawDocument> raws = {
        {"r2", "food was fine really", std::nullopt, 2.0},
        {"r7", "food was fine really", std::nullopt, 7.0},
        {"rx", "food was fine really", Polarity::negative, 9.0},
    };
    PrepOptions opts;
    opts.rating_threshold = 3.0;
    Corpus c = build_corpus(raws, opts);
    CHECK(c.documents[0].gold == Polarity::negative);
    CHECK(c.documents[1].gold == Polarity::positive);
    // explicit label wins over the rating
    CHECK(c.documents[2].gold == Polarity::negative);

    opts.rating_threshold = 5.0;
    Corpus c5 = build_corpus(raws, opts);
    CHECK(c5.documents[1].gold == Polarity::positive);
}

TEST_CASE("build_corpus failure modes") {
    CHECK_THROWS_AS(build_corpus({}, PrepOptions{}), input_error);
    std::vector<RawDocument> dup = {
        {"a", "one two", std::nullopt, std::nullopt},
        {"a", "three four", std::nullopt, std::nullopt},
    };
    CHECK_THROWS_AS(build_corpus(dup, PrepOptions{}), input_error);
    std::vector<RawDocument> single = {{"a", "word", std::nullopt, std::nullopt}};
    CHECK_THROWS_WITH(build_corpus(single, PrepOptions{}),
                      Catch::Matchers::ContainsSubstring("empty corpus"));
}

TEST_CASE("pre-tokenized input splits on whitespace only") {
    std::vector<RawDocument> raws = {{"1", "nice_view good food.", std::nullopt, std::nullopt}};
    PrepOptions opts;
    opts.pretokenized = true;
    Corpus c = build_corpus(raws, opts);
    CHECK(surface_tokens(c, c.documents[0]) ==
          std::vector<std::string>{"nice_view", "good", "food."});
}

TEST_CASE("jsonl reader accepts the documented schema and reports bad lines") {
    std::stringstream in;
    in << R"({"id": "1", "text": "good food", "rating": 4})" << "\n"
       << "not json\n"
       << R"({"id": "2", "text": "bad service", "label": "neg"})" << "\n"
       << R"({"id": "3", "text": "   "})" << "\n";
    std::vector<ReadIssue> issues;
    auto docs = read_jsonl(in, false, &issues);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "1");
    CHECK(docs[0].rating == 4.0);
    CHECK(docs[1].label == Polarity::negative);
    REQUIRE(issues.size() == 2);
    CHECK(issues[0].line == 2);
    CHECK(issues[1].line == 4);

    std::stringstream strict_in;
    strict_in << "not json\n";
    CHECK_THROWS_AS(read_jsonl(strict_in, true), input_error);
}

TEST_CASE("plain reader numbers documents by line") {
    std::stringstream in;
    in << "good food\n\nbad service here\n";
    auto docs = read_plain(in);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "1");
    CHECK(docs[1].id == "3");
}

TEST_CASE("corpus serialization round-trips byte for byte") {
    std::vector<RawDocument> raws = {
        {"a", "Great food, great not value!", std::nullopt, 4.0},
        {"b", "terrible", std::nullopt, std::nullopt},
        {"c", "The pasta was not good at all", Polarity::negative, std::nullopt},
    };
    Corpus c = build_corpus(raws, PrepOptions{});
    const std::string once = corpus_to_string(c);
    Corpus again = corpus_from_json(nlohmann::json::parse(once));
    CHECK(corpus_to_string(again) == once);

    // determinism: rebuilding from the same input gives identical bytes
    Corpus c2 = build_corpus(raws, PrepOptions{});
    CHECK(corpus_to_string(c2) == once);
}

TEST_CASE("corpus loader rejects unknown versions") {
    nlohmann::json j = corpus_to_json(
        build_corpus({{"a", "one two", std::nullopt, std::nullopt}}, PrepOptions{}));
    j["version"] = 99;
    CHECK_THROWS_AS(corpus_from_json(j), version_error);
}
