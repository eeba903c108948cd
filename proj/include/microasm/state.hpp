#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"
#include "microasm/hyperparams.hpp"

namespace microasm {

// Assignment state plus every count tensor the kernels read. Counts are
// maintained incrementally; recompute_counts rebuilds them from scratch so
// tests and debug sweeps can verify the incremental path exactly.
struct ModelState {
    std::int32_t D = 0, C = 0, T = 0, S = 0;
    std::int32_t V = 0;

    // assignments
    std::vector<std::int32_t> cluster_of_doc;             // [d]
    std::vector<std::vector<std::int32_t>> sent_of_pair;  // [d][i]
    std::vector<std::vector<std::int32_t>> topic_of_pair; // [d][i]
    std::vector<std::vector<std::uint8_t>> unconstrained; // [d][i] zero-mass-at-init marker

    // counts over cluster structure
    std::vector<std::int32_t> n_cluster;            // [c] documents in cluster
    std::vector<std::int64_t> n_cluster_pairs;      // [c] pairs in cluster
    std::vector<std::int32_t> n_cluster_sent;       // [c*S + s] pairs
    std::vector<std::int32_t> n_cluster_sent_topic; // [(c*S + s)*T + z] pairs

    // counts over words (word-major so the pair kernel scans contiguously)
    std::vector<std::int32_t> n_word_sent_topic; // [(w*S + s)*T + z] word tokens
    std::vector<std::int32_t> n_sent_topic;      // [s*T + z] word tokens (2 per pair)

    // per-document counts
    std::vector<std::int32_t> n_doc_sent;       // [d*S + s] pairs
    std::vector<std::int32_t> n_doc_sent_topic; // [(d*S + s)*T + z] pairs
    std::vector<std::int32_t> n_doc_pairs;      // [d]

    // post-burn-in accumulators for averaged posterior estimates
    std::vector<double> acc_doc_sent;        // [d*S + s]
    std::vector<double> acc_doc_sent_topic;  // [(d*S + s)*T + z]
    std::vector<double> acc_word_sent_topic; // [(w*S + s)*T + z]
    std::vector<double> acc_sent_topic;      // [s*T + z]
    std::int64_t acc_sweeps = 0;

    std::int64_t completed_sweeps = 0;
    std::uint64_t cluster_fallbacks = 0;
    std::uint64_t pair_fallbacks = 0;
    std::int64_t unconstrained_pairs = 0;

    // ---- index helpers ----
    std::size_t cs(std::int32_t c, std::int32_t s) const {
        return static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s);
    }
    std::size_t cst(std::int32_t c, std::int32_t s, std::int32_t z) const {
        return (static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s)) * T +
               static_cast<std::size_t>(z);
    }
    std::size_t wst(WordId w, std::int32_t s, std::int32_t z) const {
        return (static_cast<std::size_t>(w) * S + static_cast<std::size_t>(s)) * T +
               static_cast<std::size_t>(z);
    }
    std::size_t st(std::int32_t s, std::int32_t z) const {
        return static_cast<std::size_t>(s) * T + static_cast<std::size_t>(z);
    }
    std::size_t ds(std::int32_t d, std::int32_t s) const {
        return static_cast<std::size_t>(d) * S + static_cast<std::size_t>(s);
    }
    std::size_t dst(std::int32_t d, std::int32_t s, std::int32_t z) const {
        return (static_cast<std::size_t>(d) * S + static_cast<std::size_t>(s)) * T +
               static_cast<std::size_t>(z);
    }

    void allocate(std::int32_t docs, std::int32_t clusters, std::int32_t sentiments,
                  std::int32_t topics, std::int32_t vocab) {
        D = docs;
        C = clusters;
        S = sentiments;
        T = topics;
        V = vocab;
        cluster_of_doc.assign(static_cast<std::size_t>(D), -1);
        sent_of_pair.assign(static_cast<std::size_t>(D), {});
        topic_of_pair.assign(static_cast<std::size_t>(D), {});
        unconstrained.assign(static_cast<std::size_t>(D), {});
        n_cluster.assign(static_cast<std::size_t>(C), 0);
        n_cluster_pairs.assign(static_cast<std::size_t>(C), 0);
        n_cluster_sent.assign(static_cast<std::size_t>(C) * S, 0);
        n_cluster_sent_topic.assign(static_cast<std::size_t>(C) * S * T, 0);
        n_word_sent_topic.assign(static_cast<std::size_t>(V) * S * T, 0);
        n_sent_topic.assign(static_cast<std::size_t>(S) * T, 0);
        n_doc_sent.assign(static_cast<std::size_t>(D) * S, 0);
        n_doc_sent_topic.assign(static_cast<std::size_t>(D) * S * T, 0);
        n_doc_pairs.assign(static_cast<std::size_t>(D), 0);
        acc_doc_sent.assign(static_cast<std::size_t>(D) * S, 0.0);
        acc_doc_sent_topic.assign(static_cast<std::size_t>(D) * S * T, 0.0);
        acc_word_sent_topic.assign(static_cast<std::size_t>(V) * S * T, 0.0);
        acc_sent_topic.assign(static_cast<std::size_t>(S) * T, 0.0);
        acc_sweeps = 0;
    }

    // remove/add a document's contribution to the cluster-side tensors;
    // word-side and per-document tensors do not depend on the cluster.
    void detach_doc_from_cluster(std::int32_t d) {
        const std::int32_t c = cluster_of_doc[static_cast<std::size_t>(d)];
        n_cluster[static_cast<std::size_t>(c)] -= 1;
        n_cluster_pairs[static_cast<std::size_t>(c)] -= n_doc_pairs[static_cast<std::size_t>(d)];
        for (std::int32_t s = 0; s < S; ++s) {
            n_cluster_sent[cs(c, s)] -= n_doc_sent[ds(d, s)];
            for (std::int32_t z = 0; z < T; ++z)
                n_cluster_sent_topic[cst(c, s, z)] -= n_doc_sent_topic[dst(d, s, z)];
        }
        cluster_of_doc[static_cast<std::size_t>(d)] = -1;
    }

    void attach_doc_to_cluster(std::int32_t d, std::int32_t c) {
        cluster_of_doc[static_cast<std::size_t>(d)] = c;
        n_cluster[static_cast<std::size_t>(c)] += 1;
        n_cluster_pairs[static_cast<std::size_t>(c)] += n_doc_pairs[static_cast<std::size_t>(d)];
        for (std::int32_t s = 0; s < S; ++s) {
            n_cluster_sent[cs(c, s)] += n_doc_sent[ds(d, s)];
            for (std::int32_t z = 0; z < T; ++z)
                n_cluster_sent_topic[cst(c, s, z)] += n_doc_sent_topic[dst(d, s, z)];
        }
    }

    void remove_pair_counts(std::int32_t d, WordId w1, WordId w2, std::int32_t s, std::int32_t z) {
        const std::int32_t c = cluster_of_doc[static_cast<std::size_t>(d)];
        n_doc_sent[ds(d, s)] -= 1;
        n_doc_sent_topic[dst(d, s, z)] -= 1;
        n_cluster_sent[cs(c, s)] -= 1;
        n_cluster_sent_topic[cst(c, s, z)] -= 1;
        n_word_sent_topic[wst(w1, s, z)] -= 1;
        n_word_sent_topic[wst(w2, s, z)] -= 1;
        n_sent_topic[st(s, z)] -= 2;
    }

    void add_pair_counts(std::int32_t d, WordId w1, WordId w2, std::int32_t s, std::int32_t z) {
        const std::int32_t c = cluster_of_doc[static_cast<std::size_t>(d)];
        n_doc_sent[ds(d, s)] += 1;
        n_doc_sent_topic[dst(d, s, z)] += 1;
        n_cluster_sent[cs(c, s)] += 1;
        n_cluster_sent_topic[cst(c, s, z)] += 1;
        n_word_sent_topic[wst(w1, s, z)] += 1;
        n_word_sent_topic[wst(w2, s, z)] += 1;
        n_sent_topic[st(s, z)] += 2;
    }

    std::int32_t nonempty_clusters() const {
        std::int32_t n = 0;
        for (std::int32_t c : n_cluster) n += (c > 0);
        return n;
    }

    // rebuild every count tensor from the assignment arrays
    void recompute_counts(const Corpus& corpus) {
        std::fill(n_cluster.begin(), n_cluster.end(), 0);
        std::fill(n_cluster_pairs.begin(), n_cluster_pairs.end(), 0);
        std::fill(n_cluster_sent.begin(), n_cluster_sent.end(), 0);
        std::fill(n_cluster_sent_topic.begin(), n_cluster_sent_topic.end(), 0);
        std::fill(n_word_sent_topic.begin(), n_word_sent_topic.end(), 0);
        std::fill(n_sent_topic.begin(), n_sent_topic.end(), 0);
        std::fill(n_doc_sent.begin(), n_doc_sent.end(), 0);
        std::fill(n_doc_sent_topic.begin(), n_doc_sent_topic.end(), 0);
        for (std::int32_t d = 0; d < D; ++d) {
            const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
            const std::int32_t c = cluster_of_doc[static_cast<std::size_t>(d)];
            n_doc_pairs[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(doc.pairs.size());
            n_cluster[static_cast<std::size_t>(c)] += 1;
            n_cluster_pairs[static_cast<std::size_t>(c)] +=
                static_cast<std::int64_t>(doc.pairs.size());
            for (std::size_t i = 0; i < doc.pairs.size(); ++i) {
                const std::int32_t s = sent_of_pair[static_cast<std::size_t>(d)][i];
                const std::int32_t z = topic_of_pair[static_cast<std::size_t>(d)][i];
                n_doc_sent[ds(d, s)] += 1;
                n_doc_sent_topic[dst(d, s, z)] += 1;
                n_cluster_sent[cs(c, s)] += 1;
                n_cluster_sent_topic[cst(c, s, z)] += 1;
                n_word_sent_topic[wst(doc.pairs[i].first, s, z)] += 1;
                n_word_sent_topic[wst(doc.pairs[i].second, s, z)] += 1;
                n_sent_topic[st(s, z)] += 2;
            }
        }
    }

    bool counts_equal(const ModelState& other) const {
        return n_cluster == other.n_cluster && n_cluster_pairs == other.n_cluster_pairs &&
               n_cluster_sent == other.n_cluster_sent &&
               n_cluster_sent_topic == other.n_cluster_sent_topic &&
               n_word_sent_topic == other.n_word_sent_topic &&
               n_sent_topic == other.n_sent_topic && n_doc_sent == other.n_doc_sent &&
               n_doc_sent_topic == other.n_doc_sent_topic && n_doc_pairs == other.n_doc_pairs;
    }

    // integer-exact consistency check of the incremental tensors
    void verify_counts(const Corpus& corpus) const {
        ModelState fresh = *this;
        fresh.recompute_counts(corpus);
        if (!counts_equal(fresh))
            throw error("count tensors diverged from the assignment state");
    }

    std::uint64_t counts_checksum() const {
        std::uint64_t h = 14695981039346656037ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xffULL;
                h *= 1099511628211ULL;
            }
        };
        auto mix32 = [&](const std::vector<std::int32_t>& v) {
            for (std::int32_t x : v) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
        };
        mix(static_cast<std::uint64_t>(D));
        mix(static_cast<std::uint64_t>(C));
        mix(static_cast<std::uint64_t>(S));
        mix(static_cast<std::uint64_t>(T));
        mix(static_cast<std::uint64_t>(V));
        mix32(n_cluster);
        for (std::int64_t x : n_cluster_pairs) mix(static_cast<std::uint64_t>(x));
        mix32(n_cluster_sent);
        mix32(n_cluster_sent_topic);
        mix32(n_word_sent_topic);
        mix32(n_sent_topic);
        mix32(n_doc_sent);
        mix32(n_doc_sent_topic);
        mix32(n_doc_pairs);
        return h;
    }
};

} // namespace microasm
