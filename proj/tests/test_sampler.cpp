#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "microasm/enumeration.hpp"
#include "microasm/metrics.hpp"
#include "microasm/posterior.hpp"
#include "microasm/sampler.hpp"
#include "microasm/synthetic.hpp"
#include "test_support.hpp"

using namespace microasm;
using microasm::testing::micro_corpus;
using microasm::testing::micro_hyperparams;
using microasm::testing::seeded_micro_hyperparams;

namespace {

FullAssignment random_assignment(const Corpus& corpus, const Hyperparams& hp, std::mt19937_64& gen,
                                 bool respect_beta) {
    FullAssignment a;
    a.cluster_of_doc.resize(corpus.documents.size());
    a.pair_assign.resize(corpus.documents.size());
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        a.cluster_of_doc[d] = static_cast<std::int32_t>(gen() % static_cast<std::uint64_t>(hp.clusters));
        for (const auto& p : corpus.documents[d].pairs) {
            std::int32_t s;
            if (respect_beta) {
                std::vector<std::int32_t> allowed;
                for (std::int32_t cand = 0; cand < hp.sentiments; ++cand)
                    if (hp.beta.at(cand, p.first) > 0.0 && hp.beta.at(cand, p.second) > 0.0)
                        allowed.push_back(cand);
                s = allowed.empty()
                        ? static_cast<std::int32_t>(gen() % static_cast<std::uint64_t>(hp.sentiments))
                        : allowed[gen() % allowed.size()];
            } else {
                s = static_cast<std::int32_t>(gen() % static_cast<std::uint64_t>(hp.sentiments));
            }
            a.pair_assign[d].emplace_back(
                s, static_cast<std::int32_t>(gen() % static_cast<std::uint64_t>(hp.topics)));
        }
    }
    return a;
}

void load_assignment(GibbsSampler& sampler, const Corpus& corpus, const FullAssignment& a) {
    ModelState& st = sampler.state();
    st.cluster_of_doc = a.cluster_of_doc;
    for (std::size_t d = 0; d < corpus.documents.size(); ++d)
        for (std::size_t i = 0; i < corpus.documents[d].pairs.size(); ++i) {
            st.sent_of_pair[d][i] = a.pair_assign[d][i].first;
            st.topic_of_pair[d][i] = a.pair_assign[d][i].second;
        }
    st.recompute_counts(corpus);
}

std::vector<double> oracle_cluster_conditional(const Corpus& corpus, const Hyperparams& hp,
                                               FullAssignment a, std::int32_t d) {
    std::vector<double> logj(static_cast<std::size_t>(hp.clusters));
    for (std::int32_t l = 0; l < hp.clusters; ++l) {
        a.cluster_of_doc[static_cast<std::size_t>(d)] = l;
        logj[static_cast<std::size_t>(l)] = collapsed_joint_logprob(corpus, hp, a);
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logj) mx = std::max(mx, v);
    std::vector<double> p(logj.size(), 0.0);
    if (!(mx > -std::numeric_limits<double>::infinity())) return p;
    double total = 0.0;
    for (std::size_t i = 0; i < logj.size(); ++i) {
        p[i] = std::isinf(logj[i]) ? 0.0 : std::exp(logj[i] - mx);
        total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
}

std::vector<double> oracle_pair_conditional(const Corpus& corpus, const Hyperparams& hp,
                                            FullAssignment a, std::int32_t d, std::size_t i) {
    const std::size_t n = static_cast<std::size_t>(hp.sentiments) * static_cast<std::size_t>(hp.topics);
    std::vector<double> logj(n);
    for (std::int32_t s = 0; s < hp.sentiments; ++s)
        for (std::int32_t z = 0; z < hp.topics; ++z) {
            a.pair_assign[static_cast<std::size_t>(d)][i] = {s, z};
            logj[static_cast<std::size_t>(s) * static_cast<std::size_t>(hp.topics) +
                 static_cast<std::size_t>(z)] = collapsed_joint_logprob(corpus, hp, a);
        }
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logj) mx = std::max(mx, v);
    std::vector<double> p(n, 0.0);
    if (!(mx > -std::numeric_limits<double>::infinity())) return p;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = std::isinf(logj[k]) ? 0.0 : std::exp(logj[k] - mx);
        total += p[k];
    }
    for (auto& v : p) v /= total;
    return p;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double rel) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (want[i] == 0.0) {
            CHECK(got[i] == 0.0);
        } else {
            CHECK(std::abs(got[i] - want[i]) <= rel * want[i]);
        }
    }
}

} // namespace

TEST_CASE("initialization honors the seed constraint and builds exact counts") {
    // w0 positive seed, w1 negative seed, w2/w3 neutral
    Corpus c = micro_corpus(4, {{{0, 2}, {2, 3}}, {{0, 1}, {1, 3}}});
    Hyperparams hp = seeded_micro_hyperparams(c, 3, 2);
    hp.rng_seed = 99;
    Rng rng(hp.rng_seed);
    ModelState st = initialize_state(c, hp, rng);

    // (w0, w2): only the positive row has mass for both words
    CHECK(st.sent_of_pair[0][0] == 0);
    CHECK(st.unconstrained[0][0] == 0);
    // (w0, w1): seeds of both polarities, no admissible sentiment
    CHECK(st.unconstrained[1][0] == 1);
    // (w1, w3): negative seed forces the negative row
    CHECK(st.sent_of_pair[1][1] == 1);
    CHECK(st.unconstrained_pairs == 1);

    st.verify_counts(c); // throws on any inconsistency
}

TEST_CASE("initialization rejects a beta prior of the wrong shape") {
    Corpus c = micro_corpus(4, {{{0, 1}}});
    Hyperparams hp = micro_hyperparams(c, 2, 2);
    Corpus other = micro_corpus(9, {{{0, 1}}});
    hp.beta = build_beta(SeedLexicon{}, other.vocabulary, 2);
    Rng rng(1);
    CHECK_THROWS_AS(initialize_state(c, hp, rng), config_error);
}

TEST_CASE("single cluster is always chosen with probability one") {
    Corpus c = micro_corpus(3, {{{0, 1}, {1, 2}}});
    Hyperparams hp = micro_hyperparams(c, 1, 2);
    GibbsSampler sampler(c, hp);
    auto cond = sampler.cluster_conditional(0);
    REQUIRE(cond.size() == 1);
    CHECK(cond[0] == Catch::Approx(1.0));
    CHECK(sampler.sample_document_cluster(0) == 0);
}

TEST_CASE("zero-pair document reduces the cluster kernel to the cluster-size factor") {
    Corpus c = micro_corpus(3, {{{0, 1}}, {}, {{1, 2}, {0, 2}}});
    Hyperparams hp = micro_hyperparams(c, 2, 2);
    hp.rng_seed = 5;
    GibbsSampler sampler(c, hp);
    ModelState& st = sampler.state();

    auto cond = sampler.cluster_conditional(1);
    // with doc 1 detached, candidate weights are n_cluster + delta
    std::vector<double> expect(2);
    const double d0 = st.n_cluster[0] - (st.cluster_of_doc[1] == 0 ? 1 : 0) + hp.delta;
    const double d1 = st.n_cluster[1] - (st.cluster_of_doc[1] == 1 ? 1 : 0) + hp.delta;
    expect[0] = d0 / (d0 + d1);
    expect[1] = d1 / (d0 + d1);
    check_close(cond, expect, 1e-12);
}

TEST_CASE("degenerate S=1, T=1 pair kernel returns the single outcome") {
    Corpus c = micro_corpus(3, {{{0, 1}, {1, 2}}});
    Hyperparams hp = micro_hyperparams(c, 2, 1, 1);
    GibbsSampler sampler(c, hp);
    auto cond = sampler.pair_conditional(0, 0);
    REQUIRE(cond.size() == 1);
    CHECK(cond[0] == Catch::Approx(1.0));
    CHECK(sampler.sample_pair_assignment(0, 0) == std::pair<std::int32_t, std::int32_t>{0, 0});
}

TEST_CASE("kernel conditionals equal collapsed-joint ratios on micro instances") {
    std::mt19937_64 gen(2024);
    // flat prior: fully random assignments
    Corpus c1 = micro_corpus(5, {{{0, 1}, {2, 3}}, {{1, 4}}, {{0, 4}, {3, 3}, {2, 0}}});
    Hyperparams hp1 = micro_hyperparams(c1, 2, 2);
    // seeded prior: w0 positive seed, w1 negative seed; assignments respect mass
    Corpus c2 = micro_corpus(5, {{{0, 2}, {2, 3}}, {{1, 4}, {4, 4}}, {{3, 2}}});
    Hyperparams hp2 = seeded_micro_hyperparams(c2, 2, 2);

    auto run_case = [&](const Corpus& corpus, const Hyperparams& hp, bool respect) {
        GibbsSampler sampler(corpus, hp);
        for (int rep = 0; rep < 25; ++rep) {
            FullAssignment a = random_assignment(corpus, hp, gen, respect);
            load_assignment(sampler, corpus, a);
            for (std::int32_t d = 0; d < static_cast<std::int32_t>(corpus.documents.size()); ++d) {
                check_close(sampler.cluster_conditional(d),
                            oracle_cluster_conditional(corpus, hp, a, d), 1e-9);
                for (std::size_t i = 0;
                     i < corpus.documents[static_cast<std::size_t>(d)].pairs.size(); ++i)
                    check_close(sampler.pair_conditional(d, i),
                                oracle_pair_conditional(corpus, hp, a, d, i), 1e-9);
            }
        }
    };
    run_case(c1, hp1, false);
    run_case(c2, hp2, true);
}

TEST_CASE("kernels never produce NaN or infinite normalized probabilities") {
    std::mt19937_64 gen(77);
    Corpus c = micro_corpus(4, {{{0, 1}, {1, 2}}, {{2, 3}}, {{3, 0}, {0, 0}}});
    Hyperparams hp = seeded_micro_hyperparams(c, 3, 2);
    GibbsSampler sampler(c, hp);
    for (int rep = 0; rep < 40; ++rep) {
        FullAssignment a = random_assignment(c, hp, gen, true);
        load_assignment(sampler, c, a);
        for (std::int32_t d = 0; d < 3; ++d) {
            for (double v : sampler.cluster_conditional(d)) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
            }
            for (std::size_t i = 0; i < c.documents[static_cast<std::size_t>(d)].pairs.size(); ++i)
                for (double v : sampler.pair_conditional(d, i)) {
                    CHECK(std::isfinite(v));
                    CHECK(v >= 0.0);
                }
        }
    }
}

TEST_CASE("a sentiment row with zero total prior mass carries zero weight") {
    // single-word vocabulary consisting of one negative seed: the positive
    // row sums to zero
    Corpus c = micro_corpus(1, {{{0, 0}}});
    SeedLexicon lex;
    lex.negative = {"w0"};
    Hyperparams hp = micro_hyperparams(c, 1, 2, 2, 0.01);
    hp.beta = build_beta(expand_lexicon(lex), c.vocabulary, 2, 0.01, 0.1);
    REQUIRE(hp.beta.row_sum[0] == 0.0);

    GibbsSampler sampler(c, hp);
    auto cond = sampler.pair_conditional(0, 0);
    CHECK(cond[0] == 0.0);
    CHECK(cond[1] == 0.0);
    CHECK(cond[2] + cond[3] == Catch::Approx(1.0));
    for (double v : cond) CHECK(std::isfinite(v));
    CHECK(sampler.sample_pair_assignment(0, 0).first == 1);
}

TEST_CASE("a pair of opposite seeds falls back to a uniform conditional") {
    Corpus c = micro_corpus(3, {{{0, 1}, {2, 2}}});
    Hyperparams hp = seeded_micro_hyperparams(c, 1, 2);
    GibbsSampler sampler(c, hp);
    REQUIRE(sampler.state().unconstrained[0][0] == 1);
    auto oracle = oracle_pair_conditional(c, hp, assignment_from_state(sampler.state()), 0, 0);
    for (double v : oracle) CHECK(v == 0.0); // joint carries no mass anywhere
    auto cond = sampler.pair_conditional(0, 0);
    for (double v : cond) CHECK(v == Catch::Approx(0.25));
    const auto before = sampler.state().pair_fallbacks;
    sampler.sample_pair_assignment(0, 0);
    CHECK(sampler.state().pair_fallbacks == before + 1);
}

TEST_CASE("training is deterministic in the seed") {
    Corpus c = micro_corpus(6, {{{0, 1}, {2, 3}}, {{1, 4}, {5, 0}}, {{3, 3}}, {{2, 5}, {4, 1}}});
    Hyperparams hp = micro_hyperparams(c, 3, 2);
    hp.iterations = 40;
    hp.burn_in = 20;
    hp.rng_seed = 1234;

    auto [st1, rep1] = train(c, hp);
    auto [st2, rep2] = train(c, hp);
    CHECK(st1.cluster_of_doc == st2.cluster_of_doc);
    CHECK(st1.sent_of_pair == st2.sent_of_pair);
    CHECK(st1.topic_of_pair == st2.topic_of_pair);
    CHECK(st1.counts_checksum() == st2.counts_checksum());
    CHECK(st1.acc_doc_sent == st2.acc_doc_sent);
    REQUIRE(rep1.sweeps.size() == rep2.sweeps.size());
    for (std::size_t i = 0; i < rep1.sweeps.size(); ++i)
        CHECK(rep1.sweeps[i].log_joint == rep2.sweeps[i].log_joint);

    hp.rng_seed = 4321;
    auto [st3, rep3] = train(c, hp);
    CHECK(st1.sent_of_pair != st3.sent_of_pair); // overwhelmingly likely
}

TEST_CASE("zero iterations return the initialized state and an empty report") {
    Corpus c = micro_corpus(4, {{{0, 1}}, {{2, 3}}});
    Hyperparams hp = micro_hyperparams(c, 2, 2);
    hp.iterations = 0;
    auto [st, report] = train(c, hp);
    CHECK(report.sweeps.empty());
    CHECK(st.completed_sweeps == 0);
    CHECK(st.acc_sweeps == 0);
    st.verify_counts(c);
}

TEST_CASE("count tensors stay exactly consistent across sweeps") {
    Corpus c = micro_corpus(
        6, {{{0, 1}, {2, 3}, {1, 1}}, {{1, 4}, {5, 0}}, {{3, 3}}, {{2, 5}, {4, 1}}, {{0, 5}}});
    Hyperparams hp = seeded_micro_hyperparams(c, 3, 2);
    hp.iterations = 50;
    hp.burn_in = 25;
    int checked = 0;
    train(c, hp, [&](const ModelState& st, std::int32_t) {
        st.verify_counts(c);
        ++checked;
    });
    CHECK(checked == 50);
}

TEST_CASE("seed-consistent states are absorbing for seeded pairs") {
    // every pair contains at most one polarity of seed
    Corpus c = micro_corpus(6, {{{0, 2}, {2, 3}}, {{1, 4}, {4, 5}}, {{0, 3}, {5, 2}}, {{1, 5}}});
    Hyperparams hp = seeded_micro_hyperparams(c, 2, 2);
    hp.iterations = 200;
    hp.burn_in = 100;
    hp.rng_seed = 7;

    GibbsSampler sampler(c, hp);
    REQUIRE(sampler.state().unconstrained_pairs == 0);
    sampler.run([&](const ModelState& st, std::int32_t) {
        for (std::size_t d = 0; d < c.documents.size(); ++d)
            for (std::size_t i = 0; i < c.documents[d].pairs.size(); ++i) {
                const auto [w1, w2] = c.documents[d].pairs[i];
                const std::int32_t s = st.sent_of_pair[d][i];
                CHECK(hp.beta.at(s, w1) > 0.0);
                CHECK(hp.beta.at(s, w2) > 0.0);
            }
    });
}

TEST_CASE("sweeps preserve the exact posterior over many short chains") {
    // draw full assignments from the enumerated posterior, advance each a few
    // sweeps, and check the pooled frequencies still match the exact marginals
    Corpus c = micro_corpus(3, {{{0, 1}, {1, 2}}, {{2, 0}, {1, 1}}});
    Hyperparams hp = micro_hyperparams(c, 2, 2, 2, 0.05);

    std::vector<FullAssignment> states;
    std::vector<double> weights;
    double max_logp = -std::numeric_limits<double>::infinity();
    for_each_assignment(c, hp, [&](const FullAssignment& a, double logp) {
        states.push_back(a);
        weights.push_back(logp);
        max_logp = std::max(max_logp, logp);
    });
    double total = 0.0;
    for (auto& w : weights) {
        w = std::exp(w - max_logp);
        total += w;
    }
    ExactMarginals exact = exact_marginals(c, hp);

    Rng rng(314159);
    GibbsSampler sampler(c, hp);
    const int chains = 4000;
    std::vector<double> cluster_freq(2, 0.0), pair_freq(4, 0.0);
    for (int chain = 0; chain < chains; ++chain) {
        const int pick = rng.categorical(weights.data(), static_cast<int>(weights.size()), total);
        load_assignment(sampler, c, states[static_cast<std::size_t>(pick)]);
        sampler.sweep();
        sampler.sweep();
        const ModelState& st = sampler.state();
        cluster_freq[static_cast<std::size_t>(st.cluster_of_doc[0])] += 1.0;
        pair_freq[static_cast<std::size_t>(st.sent_of_pair[0][0] * 2 + st.topic_of_pair[0][0])] +=
            1.0;
    }
    for (auto& v : cluster_freq) v /= chains;
    for (auto& v : pair_freq) v /= chains;

    // 3-sigma multinomial bounds per marginal entry
    for (std::size_t l = 0; l < 2; ++l) {
        const double p = exact.cluster[0][l];
        CHECK(std::abs(cluster_freq[l] - p) <= 3.0 * std::sqrt(p * (1.0 - p) / chains) + 1e-12);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const double p = exact.pair[0][0][k];
        CHECK(std::abs(pair_freq[k] - p) <= 3.0 * std::sqrt(p * (1.0 - p) / chains) + 1e-12);
    }
}

TEST_CASE("document order does not shift the final joint beyond seed noise") {
    SeparatedConfig cfg;
    cfg.docs = 60;
    cfg.vocab = 40;
    cfg.clusters = 2;
    cfg.topics = 2;
    cfg.seeds_per_polarity = 4;
    cfg.pairs_min = 4;
    cfg.pairs_max = 8;
    cfg.rng_seed = 3;
    SyntheticData data = generate_synthetic(make_separated_spec(cfg).spec);

    Corpus reversed;
    reversed.vocabulary = data.corpus.vocabulary;
    reversed.options = data.corpus.options;
    reversed.documents.assign(data.corpus.documents.rbegin(), data.corpus.documents.rend());

    Hyperparams hp = micro_hyperparams(data.corpus, 2, 2);
    hp.iterations = 30;
    hp.burn_in = 15;

    auto final_joint = [&](const Corpus& corpus, std::uint64_t seed) {
        Hyperparams h = hp;
        h.rng_seed = seed;
        auto [st, rep] = train(corpus, h);
        return rep.sweeps.back().log_joint;
    };
    std::vector<double> a, b;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        a.push_back(final_joint(data.corpus, s));
        b.push_back(final_joint(reversed, 1000 + s));
    }
    auto mean = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        return m / static_cast<double>(v.size());
    };
    auto se = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    };
    const double gap = std::abs(mean(a) - mean(b));
    const double bound = 2.0 * std::sqrt(se(a) * se(a) + se(b) * se(b));
    CHECK(gap <= bound);
}

TEST_CASE("two well-separated clusters are recovered almost perfectly") {
    SeparatedConfig cfg;
    cfg.docs = 200;
    cfg.vocab = 60;
    cfg.clusters = 2;
    cfg.topics = 2;
    cfg.seeds_per_polarity = 5;
    cfg.pairs_min = 8;
    cfg.pairs_max = 14;
    cfg.rng_seed = 11;
    SeparatedSynthetic synth = make_separated_spec(cfg);
    SyntheticData data = generate_synthetic(synth.spec);

    Hyperparams hp;
    hp.clusters = 2;
    hp.topics = 2;
    hp.sentiments = 2;
    hp.iterations = 120;
    hp.burn_in = 80;
    hp.rng_seed = 17;
    hp.beta = build_beta(planted_lexicon(synth.spec), data.corpus.vocabulary, 2);

    auto [st, report] = train(data.corpus, hp);
    CHECK(nmi(st.cluster_of_doc, data.truth.cluster_of_doc) >= 0.9);
}

TEST_CASE("fold-in leaves the trained state untouched and matches training estimates") {
    SeparatedConfig cfg;
    cfg.docs = 80;
    cfg.vocab = 50;
    cfg.clusters = 2;
    cfg.topics = 2;
    cfg.seeds_per_polarity = 4;
    cfg.pairs_min = 6;
    cfg.pairs_max = 10;
    cfg.rng_seed = 23;
    SeparatedSynthetic synth = make_separated_spec(cfg);
    SyntheticData data = generate_synthetic(synth.spec);

    Hyperparams hp;
    hp.clusters = 2;
    hp.topics = 2;
    hp.sentiments = 2;
    hp.iterations = 150;
    hp.burn_in = 100;
    hp.rng_seed = 31;
    hp.beta = build_beta(planted_lexicon(synth.spec), data.corpus.vocabulary, 2);

    auto [st, report] = train(data.corpus, hp);
    const std::uint64_t checksum_before = st.counts_checksum();
    const auto acc_before = st.acc_doc_sent;

    Posterior post(st, hp);
    FoldOptions fo;
    fo.rng_seed = 5;
    for (std::int32_t d = 0; d < 10; ++d) {
        FoldResult fold =
            fold_in(st, hp, data.corpus.documents[static_cast<std::size_t>(d)].pairs, fo);
        REQUIRE_FALSE(fold.unclassifiable);
        auto folded = smoothed_distribution(fold.doc_sent, hp.gamma);
        auto trained = post.doc_sentiment(d);
        double tv = 0.0;
        for (std::size_t s = 0; s < folded.size(); ++s) tv += std::abs(folded[s] - trained[s]);
        CHECK(tv / 2.0 <= 0.1);
    }
    CHECK(st.counts_checksum() == checksum_before);
    CHECK(st.acc_doc_sent == acc_before);
}

TEST_CASE("fold-in degenerate inputs") {
    Corpus c = micro_corpus(4, {{{0, 1}}, {{2, 3}}});
    Hyperparams hp = micro_hyperparams(c, 2, 2);
    hp.iterations = 10;
    hp.burn_in = 5;
    auto [st, report] = train(c, hp);

    CHECK(fold_in_tokens(st, hp, {}, 5).unclassifiable);
    FoldResult self = fold_in_tokens(st, hp, {2}, 5);
    CHECK_FALSE(self.unclassifiable);
    CHECK(self.n_pairs == 1); // self-pair fallback
    CHECK(self.doc_sent[0] + self.doc_sent[1] == Catch::Approx(1.0));
}

TEST_CASE("strict printed-formula mode stays normalized and zeroes empty clusters") {
    Corpus c = micro_corpus(5, {{{0, 1}, {2, 3}}, {{1, 4}}, {{0, 4}, {3, 3}}});
    Hyperparams hp = micro_hyperparams(c, 4, 2);
    hp.strict_paper_eq3 = true;
    GibbsSampler strict(c, hp);
    std::mt19937_64 gen(5);
    FullAssignment a = random_assignment(c, hp, gen, false);
    a.cluster_of_doc = {0, 0, 1}; // clusters 2 and 3 stay empty
    load_assignment(strict, c, a);

    auto cond = strict.cluster_conditional(1);
    double total = 0.0;
    for (double v : cond) {
        CHECK(std::isfinite(v));
        total += v;
    }
    CHECK(total == Catch::Approx(1.0));
    CHECK(cond[2] == 0.0);
    CHECK(cond[3] == 0.0);

    // the derived kernel keeps empty clusters reachable
    hp.strict_paper_eq3 = false;
    GibbsSampler derived(c, hp);
    load_assignment(derived, c, a);
    auto dcond = derived.cluster_conditional(1);
    CHECK(dcond[2] > 0.0);
    CHECK(dcond[3] > 0.0);
}
