#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "microasm/corpus.hpp"
#include "microasm/enumeration.hpp"
#include "microasm/hyperparams.hpp"
#include "microasm/rng.hpp"
#include "microasm/state.hpp"

namespace microasm {

struct SweepStats {
    std::int32_t sweep = 0;
    double log_joint = 0.0;
    std::int32_t nonempty_clusters = 0;
    double wall_ms = 0.0;
    std::uint64_t cluster_fallbacks = 0; // cumulative
    std::uint64_t pair_fallbacks = 0;    // cumulative
};

struct TrainReport {
    std::vector<SweepStats> sweeps;
    std::int64_t unconstrained_pairs = 0;
};

namespace detail {

// per-document assignment statistics feeding the cluster kernel
struct DocStats {
    std::int32_t total_pairs = 0;
    std::vector<std::int32_t> per_sent;                              // [s]
    std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> per_sent_topic; // nonzero (s,z,m)
};

// Candidate-cluster log weights. `counts` must exclude the document whose
// stats are passed in; factors constant across candidates are dropped.
// Numerator and denominator run as separate scaled products so each
// candidate costs a single division.
inline void cluster_log_weights(const ModelState& st, const Hyperparams& hp, const DocStats& doc,
                                std::vector<double>& out) {
    const std::int32_t C = st.C, S = st.S, T = st.T;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    out.resize(static_cast<std::size_t>(C));
    for (std::int32_t l = 0; l < C; ++l) {
        ScaledProduct num, den;
        if (hp.strict_paper_eq3) {
            num.mul(static_cast<double>(st.n_cluster[static_cast<std::size_t>(l)]));
        } else {
            num.mul(st.n_cluster[static_cast<std::size_t>(l)] + hp.delta);
        }

        for (std::int32_t s = 0; s < S; ++s) {
            const std::int32_t m = doc.per_sent[static_cast<std::size_t>(s)];
            if (m == 0) continue;
            const double base = st.n_cluster_sent[st.cs(l, s)] + hp.gamma;
            for (std::int32_t x = 0; x < m; ++x) num.mul(base + x);
        }
        {
            const double base = static_cast<double>(st.n_cluster_pairs[static_cast<std::size_t>(l)]) +
                                hp.gamma * S;
            // the printed form starts its denominator products one term early
            const std::int32_t from = hp.strict_paper_eq3 ? -1 : 0;
            for (std::int32_t y = from; y < doc.total_pairs; ++y) den.mul(base + y);
        }

        for (const auto& [s, z, m] : doc.per_sent_topic) {
            const double base = st.n_cluster_sent_topic[st.cst(l, s, z)] + hp.alpha;
            for (std::int32_t x = 0; x < m; ++x) num.mul(base + x);
        }
        if (hp.strict_paper_eq3) {
            const double base = static_cast<double>(st.n_cluster_pairs[static_cast<std::size_t>(l)]) +
                                hp.alpha * T;
            for (std::int32_t y = -1; y < doc.total_pairs; ++y) den.mul(base + y);
        } else {
            for (std::int32_t s = 0; s < S; ++s) {
                const std::int32_t m = doc.per_sent[static_cast<std::size_t>(s)];
                if (m == 0) continue;
                const double base = st.n_cluster_sent[st.cs(l, s)] + hp.alpha * T;
                for (std::int32_t y = 0; y < m; ++y) den.mul(base + y);
            }
        }
        // the printed-form denominator can cross zero for small priors
        out[static_cast<std::size_t>(l)] =
            (num.mantissa > 0.0 && den.mantissa > 0.0) ? num.log() - den.log() : neg_inf;
    }
}

} // namespace detail

// Seed-respecting random initialization: clusters uniform; a pair is
// started only in sentiments where both words carry prior mass, and is
// marked unconstrained when no such sentiment exists.
inline ModelState initialize_state(const Corpus& corpus, const Hyperparams& hp, Rng& rng) {
    hp.validate(corpus.vocab_size());
    if (corpus.documents.empty()) throw input_error("empty corpus");

    ModelState st;
    st.allocate(static_cast<std::int32_t>(corpus.documents.size()), hp.clusters, hp.sentiments,
                hp.topics, static_cast<std::int32_t>(corpus.vocab_size()));

    std::vector<std::int32_t> allowed;
    for (std::int32_t d = 0; d < st.D; ++d) {
        const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
        st.cluster_of_doc[static_cast<std::size_t>(d)] = rng.uniform_int(hp.clusters);
        st.n_doc_pairs[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(doc.pairs.size());
        auto& ss = st.sent_of_pair[static_cast<std::size_t>(d)];
        auto& zz = st.topic_of_pair[static_cast<std::size_t>(d)];
        auto& uu = st.unconstrained[static_cast<std::size_t>(d)];
        ss.resize(doc.pairs.size());
        zz.resize(doc.pairs.size());
        uu.assign(doc.pairs.size(), 0);
        for (std::size_t i = 0; i < doc.pairs.size(); ++i) {
            allowed.clear();
            for (std::int32_t s = 0; s < hp.sentiments; ++s)
                if (hp.beta.at(s, doc.pairs[i].first) > 0.0 &&
                    hp.beta.at(s, doc.pairs[i].second) > 0.0)
                    allowed.push_back(s);
            if (allowed.empty()) {
                ss[i] = rng.uniform_int(hp.sentiments);
                uu[i] = 1;
                st.unconstrained_pairs += 1;
            } else {
                ss[i] = allowed[static_cast<std::size_t>(
                    rng.uniform_int(static_cast<int>(allowed.size())))];
            }
            zz[i] = rng.uniform_int(hp.topics);
        }
    }
    st.recompute_counts(corpus);
    return st;
}

class GibbsSampler {
public:
    GibbsSampler(const Corpus& corpus, Hyperparams hp)
        : corpus_(corpus), hp_(std::move(hp)), rng_(hp_.rng_seed) {
        hp_.validate(corpus.vocab_size());
        st_ = initialize_state(corpus_, hp_, rng_);
    }

    const ModelState& state() const { return st_; }
    ModelState& state() { return st_; }
    const Hyperparams& hyperparams() const { return hp_; }
    Rng& rng() { return rng_; }

    void set_check_invariants(bool on) { check_invariants_ = on; }

    std::int32_t sample_document_cluster(std::int32_t d) {
        st_.detach_doc_from_cluster(d);
        gather_doc_stats(d);
        detail::cluster_log_weights(st_, hp_, doc_stats_, logw_);
        std::int32_t l = rng_.categorical_log(logw_.data(), st_.C, expw_);
        if (l < 0) {
            l = rng_.uniform_int(st_.C);
            st_.cluster_fallbacks += 1;
        }
        st_.attach_doc_to_cluster(d, l);
        return l;
    }

    std::pair<std::int32_t, std::int32_t> sample_pair_assignment(std::int32_t d, std::size_t i) {
        const auto& doc = corpus_.documents[static_cast<std::size_t>(d)];
        const WordId w1 = doc.pairs[i].first, w2 = doc.pairs[i].second;
        auto& ss = st_.sent_of_pair[static_cast<std::size_t>(d)];
        auto& zz = st_.topic_of_pair[static_cast<std::size_t>(d)];
        st_.remove_pair_counts(d, w1, w2, ss[i], zz[i]);
        const double total = pair_weights(d, w1, w2);
        std::int32_t idx;
        if (total > 0.0) {
            idx = rng_.categorical(pairw_.data(), st_.S * st_.T, total);
        } else {
            idx = rng_.uniform_int(st_.S * st_.T);
            st_.pair_fallbacks += 1;
        }
        const std::int32_t s = idx / st_.T, z = idx % st_.T;
        st_.add_pair_counts(d, w1, w2, s, z);
        ss[i] = s;
        zz[i] = z;
        return {s, z};
    }

    // Normalized conditional over clusters for document d; the state is
    // restored before returning. Uniform when every candidate has zero mass.
    std::vector<double> cluster_conditional(std::int32_t d) {
        const std::int32_t original = st_.cluster_of_doc[static_cast<std::size_t>(d)];
        st_.detach_doc_from_cluster(d);
        gather_doc_stats(d);
        detail::cluster_log_weights(st_, hp_, doc_stats_, logw_);
        st_.attach_doc_to_cluster(d, original);
        return normalize_log(logw_);
    }

    // Normalized conditional over (sentiment*T + topic) for pair i of doc d.
    std::vector<double> pair_conditional(std::int32_t d, std::size_t i) {
        const auto& doc = corpus_.documents[static_cast<std::size_t>(d)];
        const WordId w1 = doc.pairs[i].first, w2 = doc.pairs[i].second;
        const std::int32_t s0 = st_.sent_of_pair[static_cast<std::size_t>(d)][i];
        const std::int32_t z0 = st_.topic_of_pair[static_cast<std::size_t>(d)][i];
        st_.remove_pair_counts(d, w1, w2, s0, z0);
        const double total = pair_weights(d, w1, w2);
        st_.add_pair_counts(d, w1, w2, s0, z0);
        const std::size_t n = static_cast<std::size_t>(st_.S) * static_cast<std::size_t>(st_.T);
        std::vector<double> probs(n, 1.0 / static_cast<double>(n));
        if (total > 0.0)
            for (std::size_t k = 0; k < n; ++k) probs[k] = pairw_[k] / total;
        return probs;
    }

    void sweep() {
        for (std::int32_t d = 0; d < st_.D; ++d) sample_document_cluster(d);
        for (std::int32_t d = 0; d < st_.D; ++d) {
            const std::size_t n = corpus_.documents[static_cast<std::size_t>(d)].pairs.size();
            for (std::size_t i = 0; i < n; ++i) sample_pair_assignment(d, i);
        }
    }

    TrainReport run(const std::function<void(const ModelState&, std::int32_t)>& per_sweep = {}) {
        TrainReport report;
        report.unconstrained_pairs = st_.unconstrained_pairs;
        report.sweeps.reserve(static_cast<std::size_t>(hp_.iterations));
        for (std::int32_t it = 1; it <= hp_.iterations; ++it) {
            const auto t0 = std::chrono::steady_clock::now();
            sweep();
            st_.completed_sweeps += 1;
            if (it > hp_.burn_in) accumulate();
            const auto t1 = std::chrono::steady_clock::now();
            SweepStats stats;
            stats.sweep = it;
            stats.log_joint = collapsed_joint_logprob(st_, hp_);
            stats.nonempty_clusters = st_.nonempty_clusters();
            stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            stats.cluster_fallbacks = st_.cluster_fallbacks;
            stats.pair_fallbacks = st_.pair_fallbacks;
            report.sweeps.push_back(stats);
            if (check_invariants_) st_.verify_counts(corpus_);
            if (per_sweep) per_sweep(st_, it);
        }
        return report;
    }

private:
    void gather_doc_stats(std::int32_t d) {
        doc_stats_.total_pairs = st_.n_doc_pairs[static_cast<std::size_t>(d)];
        doc_stats_.per_sent.assign(static_cast<std::size_t>(st_.S), 0);
        doc_stats_.per_sent_topic.clear();
        for (std::int32_t s = 0; s < st_.S; ++s) {
            doc_stats_.per_sent[static_cast<std::size_t>(s)] = st_.n_doc_sent[st_.ds(d, s)];
            if (st_.n_doc_sent[st_.ds(d, s)] == 0) continue;
            for (std::int32_t z = 0; z < st_.T; ++z) {
                const std::int32_t m = st_.n_doc_sent_topic[st_.dst(d, s, z)];
                if (m > 0) doc_stats_.per_sent_topic.emplace_back(s, z, m);
            }
        }
    }

    // candidate weights over (s*T + z); counts must exclude the pair.
    // Returns the total mass.
    double pair_weights(std::int32_t d, WordId w1, WordId w2) {
        const std::int32_t c = st_.cluster_of_doc[static_cast<std::size_t>(d)];
        const std::int32_t S = st_.S, T = st_.T;
        pairw_.resize(static_cast<std::size_t>(S) * static_cast<std::size_t>(T));
        const double same = (w1 == w2) ? 1.0 : 0.0;
        const std::int32_t* nw1 = st_.n_word_sent_topic.data() +
                                  static_cast<std::size_t>(w1) * S * static_cast<std::size_t>(T);
        const std::int32_t* nw2 = st_.n_word_sent_topic.data() +
                                  static_cast<std::size_t>(w2) * S * static_cast<std::size_t>(T);
        double total = 0.0;
        for (std::int32_t j = 0; j < S; ++j) {
            const double b1 = hp_.beta.at(j, w1);
            const double b2 = hp_.beta.at(j, w2);
            const double row = hp_.beta.row_sum[static_cast<std::size_t>(j)];
            if (row == 0.0) { // the whole sentiment row carries no prior mass
                const std::size_t off = static_cast<std::size_t>(j) * static_cast<std::size_t>(T);
                for (std::int32_t k = 0; k < T; ++k) pairw_[off + static_cast<std::size_t>(k)] = 0.0;
                continue;
            }
            const double sent_factor = st_.n_cluster_sent[st_.cs(c, j)] + hp_.gamma;
            const double aspect_den = st_.n_cluster_sent[st_.cs(c, j)] + hp_.alpha * T;
            const std::int32_t* ncst = st_.n_cluster_sent_topic.data() + st_.cst(c, j, 0);
            const std::int32_t* nst = st_.n_sent_topic.data() + st_.st(j, 0);
            const std::size_t off = static_cast<std::size_t>(j) * static_cast<std::size_t>(T);
            for (std::int32_t k = 0; k < T; ++k) {
                const double word_den = nst[k] + row;
                const double w = sent_factor * (ncst[k] + hp_.alpha) *
                                 (nw1[off + static_cast<std::size_t>(k)] + b1) *
                                 (nw2[off + static_cast<std::size_t>(k)] + same + b2) /
                                 (aspect_den * word_den * (word_den + 1.0));
                pairw_[off + static_cast<std::size_t>(k)] = w;
                total += w;
            }
        }
        return total;
    }

    std::vector<double> normalize_log(const std::vector<double>& logw) const {
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : logw) mx = std::max(mx, v);
        std::vector<double> probs(logw.size(), 0.0);
        if (!(mx > -std::numeric_limits<double>::infinity())) {
            std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(logw.size()));
            return probs;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < logw.size(); ++i) {
            probs[i] = std::exp(logw[i] - mx);
            total += probs[i];
        }
        for (auto& v : probs) v /= total;
        return probs;
    }

    void accumulate() {
        for (std::size_t i = 0; i < st_.acc_doc_sent.size(); ++i)
            st_.acc_doc_sent[i] += st_.n_doc_sent[i];
        for (std::size_t i = 0; i < st_.acc_doc_sent_topic.size(); ++i)
            st_.acc_doc_sent_topic[i] += st_.n_doc_sent_topic[i];
        for (std::size_t i = 0; i < st_.acc_word_sent_topic.size(); ++i)
            st_.acc_word_sent_topic[i] += st_.n_word_sent_topic[i];
        for (std::size_t i = 0; i < st_.acc_sent_topic.size(); ++i)
            st_.acc_sent_topic[i] += st_.n_sent_topic[i];
        st_.acc_sweeps += 1;
    }

    const Corpus& corpus_;
    Hyperparams hp_;
    Rng rng_;
    ModelState st_;
    bool check_invariants_ = false;

    detail::DocStats doc_stats_;
    std::vector<double> logw_, expw_, pairw_;
};

inline std::pair<ModelState, TrainReport> train(
    const Corpus& corpus, const Hyperparams& hp,
    const std::function<void(const ModelState&, std::int32_t)>& per_sweep = {},
    bool check_invariants = false) {
    GibbsSampler sampler(corpus, hp);
    sampler.set_check_invariants(check_invariants);
    TrainReport report = sampler.run(per_sweep);
    return {std::move(sampler.state()), std::move(report)};
}

// ---- fold-in for held-out documents ------------------------------------

struct FoldOptions {
    std::int32_t burn_in = 50;
    std::int32_t samples = 20;
    std::uint64_t rng_seed = 1;
};

struct FoldResult {
    bool unclassifiable = false;
    std::vector<double> doc_sent;       // averaged pair counts per sentiment
    std::vector<double> doc_sent_topic; // averaged pair counts per (s*T + z)
    std::int32_t n_pairs = 0;
};

// Gibbs over one held-out document against frozen global tensors. The
// document's own transient counts enter every conditional; the trained
// state is never written. Words must already be mapped to the model
// vocabulary (OOV dropped by the caller).
inline FoldResult fold_in(const ModelState& st, const Hyperparams& hp,
                          const std::vector<WordPair>& pairs, const FoldOptions& fo = {}) {
    FoldResult res;
    res.doc_sent.assign(static_cast<std::size_t>(st.S), 0.0);
    res.doc_sent_topic.assign(static_cast<std::size_t>(st.S) * static_cast<std::size_t>(st.T), 0.0);
    if (pairs.empty()) {
        res.unclassifiable = true;
        return res;
    }
    res.n_pairs = static_cast<std::int32_t>(pairs.size());

    const std::int32_t S = st.S, T = st.T, C = st.C;
    Rng rng(fo.rng_seed);

    // transient document state
    std::int32_t cluster = rng.uniform_int(C);
    std::vector<std::int32_t> sent(pairs.size()), topic(pairs.size());
    std::vector<std::int32_t> t_ds(static_cast<std::size_t>(S), 0);
    std::vector<std::int32_t> t_dst(static_cast<std::size_t>(S) * T, 0);
    std::vector<std::int32_t> t_st(static_cast<std::size_t>(S) * T, 0);
    std::unordered_map<std::size_t, std::int32_t> t_w; // wst index -> count

    std::vector<std::int32_t> allowed;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        allowed.clear();
        for (std::int32_t s = 0; s < S; ++s)
            if (hp.beta.at(s, pairs[i].first) > 0.0 && hp.beta.at(s, pairs[i].second) > 0.0)
                allowed.push_back(s);
        sent[i] = allowed.empty()
                      ? rng.uniform_int(S)
                      : allowed[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(allowed.size())))];
        topic[i] = rng.uniform_int(T);
    }
    auto add_pair = [&](std::size_t i) {
        const auto [s, z] = std::pair(sent[i], topic[i]);
        t_ds[static_cast<std::size_t>(s)] += 1;
        t_dst[static_cast<std::size_t>(s) * T + z] += 1;
        t_st[static_cast<std::size_t>(s) * T + z] += 2;
        t_w[st.wst(pairs[i].first, s, z)] += 1;
        t_w[st.wst(pairs[i].second, s, z)] += 1;
    };
    auto remove_pair = [&](std::size_t i) {
        const auto [s, z] = std::pair(sent[i], topic[i]);
        t_ds[static_cast<std::size_t>(s)] -= 1;
        t_dst[static_cast<std::size_t>(s) * T + z] -= 1;
        t_st[static_cast<std::size_t>(s) * T + z] -= 2;
        t_w[st.wst(pairs[i].first, s, z)] -= 1;
        t_w[st.wst(pairs[i].second, s, z)] -= 1;
    };
    for (std::size_t i = 0; i < pairs.size(); ++i) add_pair(i);

    auto transient_word = [&](std::size_t key) -> std::int32_t {
        auto it = t_w.find(key);
        return it == t_w.end() ? 0 : it->second;
    };

    detail::DocStats stats;
    std::vector<double> logw, expw, pairw(static_cast<std::size_t>(S) * T);
    const std::int32_t total_sweeps = fo.burn_in + fo.samples;
    std::int64_t taken = 0;

    for (std::int32_t it = 0; it < total_sweeps; ++it) {
        // cluster step: global counts already exclude this document
        stats.total_pairs = res.n_pairs;
        stats.per_sent.assign(static_cast<std::size_t>(S), 0);
        stats.per_sent_topic.clear();
        for (std::int32_t s = 0; s < S; ++s) {
            stats.per_sent[static_cast<std::size_t>(s)] = t_ds[static_cast<std::size_t>(s)];
            if (t_ds[static_cast<std::size_t>(s)] == 0) continue;
            for (std::int32_t z = 0; z < T; ++z)
                if (t_dst[static_cast<std::size_t>(s) * T + z] > 0)
                    stats.per_sent_topic.emplace_back(s, z, t_dst[static_cast<std::size_t>(s) * T + z]);
        }
        detail::cluster_log_weights(st, hp, stats, logw);
        std::int32_t l = rng.categorical_log(logw.data(), C, expw);
        cluster = l >= 0 ? l : rng.uniform_int(C);

        // pair steps
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            remove_pair(i);
            const WordId w1 = pairs[i].first, w2 = pairs[i].second;
            const double same = (w1 == w2) ? 1.0 : 0.0;
            double total = 0.0;
            for (std::int32_t j = 0; j < S; ++j) {
                const double b1 = hp.beta.at(j, w1);
                const double b2 = hp.beta.at(j, w2);
                const double row = hp.beta.row_sum[static_cast<std::size_t>(j)];
                const double cs = st.n_cluster_sent[st.cs(cluster, j)] +
                                  t_ds[static_cast<std::size_t>(j)];
                const double sent_factor = cs + hp.gamma;
                const double aspect_den = cs + hp.alpha * T;
                for (std::int32_t k = 0; k < T; ++k) {
                    const std::size_t sk = static_cast<std::size_t>(j) * T + static_cast<std::size_t>(k);
                    const double ncst = st.n_cluster_sent_topic[st.cst(cluster, j, k)] + t_dst[sk];
                    const double nst = st.n_sent_topic[st.st(j, k)] + t_st[sk];
                    const double nw1 = st.n_word_sent_topic[st.wst(w1, j, k)] +
                                       transient_word(st.wst(w1, j, k)) + b1;
                    const double nw2 = st.n_word_sent_topic[st.wst(w2, j, k)] +
                                       transient_word(st.wst(w2, j, k)) + same + b2;
                    const double w = sent_factor * ((ncst + hp.alpha) / aspect_den) *
                                     (nw1 / (nst + row)) * (nw2 / (nst + row + 1.0));
                    pairw[sk] = w;
                    total += w;
                }
            }
            std::int32_t idx = total > 0.0
                                   ? rng.categorical(pairw.data(), S * T, total)
                                   : rng.uniform_int(S * T);
            sent[i] = idx / T;
            topic[i] = idx % T;
            add_pair(i);
        }

        if (it >= fo.burn_in) {
            for (std::int32_t s = 0; s < S; ++s)
                res.doc_sent[static_cast<std::size_t>(s)] += t_ds[static_cast<std::size_t>(s)];
            for (std::size_t k = 0; k < t_dst.size(); ++k) res.doc_sent_topic[k] += t_dst[k];
            ++taken;
        }
    }
    if (taken > 0) {
        for (auto& v : res.doc_sent) v /= static_cast<double>(taken);
        for (auto& v : res.doc_sent_topic) v /= static_cast<double>(taken);
    }
    return res;
}

// Convenience path for raw token sequences: extracts windowed pairs, and a
// single surviving token falls back to the self-pair (w, w).
inline FoldResult fold_in_tokens(const ModelState& st, const Hyperparams& hp,
                                 const std::vector<WordId>& tokens, int pair_window,
                                 const FoldOptions& fo = {}) {
    if (tokens.empty()) {
        FoldResult res;
        res.doc_sent.assign(static_cast<std::size_t>(st.S), 0.0);
        res.doc_sent_topic.assign(static_cast<std::size_t>(st.S) * static_cast<std::size_t>(st.T),
                                  0.0);
        res.unclassifiable = true;
        return res;
    }
    std::vector<WordPair> pairs = extract_pairs(tokens, pair_window);
    if (pairs.empty()) pairs.emplace_back(tokens.front(), tokens.front());
    return fold_in(st, hp, pairs, fo);
}

} // namespace microasm
