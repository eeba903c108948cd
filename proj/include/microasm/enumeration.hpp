#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"
#include "microasm/hyperparams.hpp"
#include "microasm/state.hpp"

namespace microasm {

inline constexpr std::uint64_t kDefaultEnumerationCap = 50000;

// A complete latent configuration: one cluster per document, one
// (sentiment, topic) per pair.
struct FullAssignment {
    std::vector<std::int32_t> cluster_of_doc;
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pair_assign;
};

inline FullAssignment assignment_from_state(const ModelState& st) {
    FullAssignment a;
    a.cluster_of_doc = st.cluster_of_doc;
    a.pair_assign.resize(static_cast<std::size_t>(st.D));
    for (std::int32_t d = 0; d < st.D; ++d) {
        const auto& ss = st.sent_of_pair[static_cast<std::size_t>(d)];
        const auto& zz = st.topic_of_pair[static_cast<std::size_t>(d)];
        auto& out = a.pair_assign[static_cast<std::size_t>(d)];
        out.reserve(ss.size());
        for (std::size_t i = 0; i < ss.size(); ++i) out.emplace_back(ss[i], zz[i]);
    }
    return a;
}

namespace detail {

// lgamma(base + n) - lgamma(base) as a cumulative sum of logs, cached per
// base value. Counts repeat heavily, so this avoids most lgamma calls.
class AscendingFactorial {
public:
    double diff(double base, std::int64_t n) {
        if (n <= 0) return 0.0;
        if (n > 4096) return std::lgamma(base + static_cast<double>(n)) - std::lgamma(base);
        auto& table = tables_[base];
        if (table.empty()) table.push_back(0.0);
        while (static_cast<std::int64_t>(table.size()) <= n) {
            double k = static_cast<double>(table.size() - 1);
            table.push_back(table.back() + std::log(base + k));
        }
        return table[static_cast<std::size_t>(n)];
    }

private:
    std::unordered_map<double, std::vector<double>> tables_;
};

struct JointCounts {
    std::vector<std::int32_t> n_cluster;            // [c]
    std::vector<std::int64_t> n_cluster_pairs;      // [c]
    std::vector<std::int32_t> n_cluster_sent;       // [c*S+s]
    std::vector<std::int32_t> n_cluster_sent_topic; // [(c*S+s)*T+z]
    std::vector<std::int32_t> n_word_sent_topic;    // [(w*S+s)*T+z]
    std::vector<std::int32_t> n_sent_topic;         // [s*T+z]
};

// exact log of the collapsed joint, all multinomial parameters integrated
// out under their Dirichlet priors
inline double joint_from_counts(const JointCounts& n, std::int32_t D, std::int32_t C,
                                std::int32_t S, std::int32_t T, std::int32_t V,
                                const Hyperparams& hp, AscendingFactorial& af) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double logp = -af.diff(hp.delta * C, D);
    for (std::int32_t c = 0; c < C; ++c)
        logp += af.diff(hp.delta, n.n_cluster[static_cast<std::size_t>(c)]);

    for (std::int32_t c = 0; c < C; ++c) {
        const std::int64_t pc = n.n_cluster_pairs[static_cast<std::size_t>(c)];
        if (pc == 0) continue;
        logp -= af.diff(hp.gamma * S, pc);
        for (std::int32_t s = 0; s < S; ++s) {
            const std::int32_t ncs = n.n_cluster_sent[static_cast<std::size_t>(c) * S + s];
            logp += af.diff(hp.gamma, ncs);
            if (ncs == 0) continue;
            logp -= af.diff(hp.alpha * T, ncs);
            const std::size_t row = (static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s)) *
                                    static_cast<std::size_t>(T);
            for (std::int32_t z = 0; z < T; ++z)
                logp += af.diff(hp.alpha, n.n_cluster_sent_topic[row + static_cast<std::size_t>(z)]);
        }
    }

    for (std::int32_t s = 0; s < S; ++s)
        for (std::int32_t z = 0; z < T; ++z) {
            const std::int32_t nsz = n.n_sent_topic[static_cast<std::size_t>(s) * T + z];
            if (nsz == 0) continue;
            if (hp.beta.row_sum[static_cast<std::size_t>(s)] == 0.0) return neg_inf;
            logp -= af.diff(hp.beta.row_sum[static_cast<std::size_t>(s)], nsz);
        }
    for (std::int32_t w = 0; w < V; ++w) {
        const std::size_t base = static_cast<std::size_t>(w) * S * static_cast<std::size_t>(T);
        for (std::int32_t s = 0; s < S; ++s)
            for (std::int32_t z = 0; z < T; ++z) {
                const std::int32_t c =
                    n.n_word_sent_topic[base + static_cast<std::size_t>(s) * T + z];
                if (c == 0) continue;
                const double b = hp.beta.at(s, static_cast<WordId>(w));
                if (b == 0.0) return neg_inf; // word forced where the prior carries no mass
                logp += af.diff(b, c);
            }
    }
    return logp;
}

inline void count_assignment(const Corpus& corpus, const Hyperparams& hp,
                             const FullAssignment& a, JointCounts& n) {
    const std::int32_t C = hp.clusters, S = hp.sentiments, T = hp.topics;
    const auto V = static_cast<std::int32_t>(corpus.vocab_size());
    n.n_cluster.assign(static_cast<std::size_t>(C), 0);
    n.n_cluster_pairs.assign(static_cast<std::size_t>(C), 0);
    n.n_cluster_sent.assign(static_cast<std::size_t>(C) * S, 0);
    n.n_cluster_sent_topic.assign(static_cast<std::size_t>(C) * S * T, 0);
    n.n_word_sent_topic.assign(static_cast<std::size_t>(V) * S * T, 0);
    n.n_sent_topic.assign(static_cast<std::size_t>(S) * T, 0);
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        const auto& doc = corpus.documents[d];
        const std::int32_t c = a.cluster_of_doc[d];
        n.n_cluster[static_cast<std::size_t>(c)] += 1;
        n.n_cluster_pairs[static_cast<std::size_t>(c)] +=
            static_cast<std::int64_t>(doc.pairs.size());
        for (std::size_t i = 0; i < doc.pairs.size(); ++i) {
            const auto [s, z] = a.pair_assign[d][i];
            n.n_cluster_sent[static_cast<std::size_t>(c) * S + s] += 1;
            n.n_cluster_sent_topic[(static_cast<std::size_t>(c) * S + static_cast<std::size_t>(s)) *
                                       T +
                                   static_cast<std::size_t>(z)] += 1;
            n.n_word_sent_topic[(static_cast<std::size_t>(doc.pairs[i].first) * S +
                                 static_cast<std::size_t>(s)) *
                                    T +
                                static_cast<std::size_t>(z)] += 1;
            n.n_word_sent_topic[(static_cast<std::size_t>(doc.pairs[i].second) * S +
                                 static_cast<std::size_t>(s)) *
                                    T +
                                static_cast<std::size_t>(z)] += 1;
            n.n_sent_topic[static_cast<std::size_t>(s) * T + z] += 2;
        }
    }
}

} // namespace detail

// Exact log joint of a full assignment, computed from scratch by counting.
// Returns -infinity when a word is assigned where its prior mass is zero.
inline double collapsed_joint_logprob(const Corpus& corpus, const Hyperparams& hp,
                                      const FullAssignment& a) {
    hp.validate(corpus.vocab_size());
    if (a.cluster_of_doc.size() != corpus.documents.size() ||
        a.pair_assign.size() != corpus.documents.size())
        throw input_error("assignment shape does not match the corpus");
    detail::JointCounts n;
    detail::count_assignment(corpus, hp, a, n);
    thread_local detail::AscendingFactorial af;
    return detail::joint_from_counts(n, static_cast<std::int32_t>(corpus.documents.size()),
                                     hp.clusters, hp.sentiments, hp.topics,
                                     static_cast<std::int32_t>(corpus.vocab_size()), hp, af);
}

// Same value computed from a sampler state's live tensors (used for
// per-sweep logging; the enumeration path above never reads a ModelState).
inline double collapsed_joint_logprob(const ModelState& st, const Hyperparams& hp) {
    detail::JointCounts n;
    n.n_cluster = st.n_cluster;
    n.n_cluster_pairs = st.n_cluster_pairs;
    n.n_cluster_sent = st.n_cluster_sent;
    n.n_cluster_sent_topic = st.n_cluster_sent_topic;
    n.n_word_sent_topic = st.n_word_sent_topic;
    n.n_sent_topic = st.n_sent_topic;
    thread_local detail::AscendingFactorial af;
    return detail::joint_from_counts(n, st.D, st.C, st.S, st.T, st.V, hp, af);
}

// C^D * (S*T)^P, saturating at uint64 max
inline std::uint64_t assignment_space_size(const Corpus& corpus, const Hyperparams& hp) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t size = 1;
    auto mul = [&](std::uint64_t f) {
        if (f != 0 && size > limit / f)
            size = limit;
        else
            size *= f;
    };
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        mul(static_cast<std::uint64_t>(hp.clusters));
        const std::uint64_t st = static_cast<std::uint64_t>(hp.sentiments) *
                                 static_cast<std::uint64_t>(hp.topics);
        for (std::size_t i = 0; i < corpus.documents[d].pairs.size(); ++i) mul(st);
    }
    return size;
}

// Visit every full assignment in mixed-radix order (documents' clusters
// first, then pair slots document by document). fn(assignment, logp).
template <typename Fn>
inline void for_each_assignment(const Corpus& corpus, const Hyperparams& hp, Fn&& fn,
                                std::uint64_t cap = kDefaultEnumerationCap) {
    const std::uint64_t space = assignment_space_size(corpus, hp);
    if (space > cap)
        throw config_error("assignment space of " + std::to_string(space) +
                           " exceeds the enumeration cap of " + std::to_string(cap));

    const std::size_t D = corpus.documents.size();
    FullAssignment a;
    a.cluster_of_doc.assign(D, 0);
    a.pair_assign.resize(D);
    struct Slot {
        bool is_cluster;
        std::size_t d, i;
        std::int32_t radix;
    };
    std::vector<Slot> slots;
    for (std::size_t d = 0; d < D; ++d) {
        slots.push_back({true, d, 0, hp.clusters});
        a.pair_assign[d].assign(corpus.documents[d].pairs.size(), {0, 0});
        for (std::size_t i = 0; i < corpus.documents[d].pairs.size(); ++i)
            slots.push_back({false, d, i, hp.sentiments * hp.topics});
    }
    std::vector<std::int32_t> digits(slots.size(), 0);
    auto apply = [&](std::size_t k) {
        const Slot& s = slots[k];
        if (s.is_cluster) {
            a.cluster_of_doc[s.d] = digits[k];
        } else {
            a.pair_assign[s.d][s.i] = {digits[k] / hp.topics, digits[k] % hp.topics};
        }
    };
    for (std::size_t k = 0; k < slots.size(); ++k) apply(k);

    while (true) {
        fn(static_cast<const FullAssignment&>(a), collapsed_joint_logprob(corpus, hp, a));
        std::size_t k = slots.size();
        while (k > 0) {
            --k;
            if (++digits[k] < slots[k].radix) {
                apply(k);
                break;
            }
            digits[k] = 0;
            apply(k);
            if (k == 0) return;
        }
    }
}

struct ExactMarginals {
    std::vector<std::vector<double>> cluster;           // [d][c]
    std::vector<std::vector<std::vector<double>>> pair; // [d][i][s*T+z]
    double log_partition = 0.0;
};

// Posterior marginals by exhaustive enumeration: two passes, fixed
// accumulation order, log-sum-exp against the global maximum.
inline ExactMarginals exact_marginals(const Corpus& corpus, const Hyperparams& hp,
                                      std::uint64_t cap = kDefaultEnumerationCap) {
    const std::size_t D = corpus.documents.size();
    double max_logp = -std::numeric_limits<double>::infinity();
    for_each_assignment(
        corpus, hp, [&](const FullAssignment&, double logp) { max_logp = std::max(max_logp, logp); },
        cap);
    if (!(max_logp > -std::numeric_limits<double>::infinity()))
        throw error("every assignment has zero probability");

    ExactMarginals m;
    m.cluster.assign(D, std::vector<double>(static_cast<std::size_t>(hp.clusters), 0.0));
    m.pair.resize(D);
    const std::size_t ST = static_cast<std::size_t>(hp.sentiments) * static_cast<std::size_t>(hp.topics);
    for (std::size_t d = 0; d < D; ++d)
        m.pair[d].assign(corpus.documents[d].pairs.size(), std::vector<double>(ST, 0.0));

    double total = 0.0;
    for_each_assignment(
        corpus, hp,
        [&](const FullAssignment& a, double logp) {
            const double w = std::exp(logp - max_logp);
            if (w == 0.0) return;
            total += w;
            for (std::size_t d = 0; d < D; ++d) {
                m.cluster[d][static_cast<std::size_t>(a.cluster_of_doc[d])] += w;
                for (std::size_t i = 0; i < a.pair_assign[d].size(); ++i) {
                    const auto [s, z] = a.pair_assign[d][i];
                    m.pair[d][i][static_cast<std::size_t>(s) * static_cast<std::size_t>(hp.topics) +
                                 static_cast<std::size_t>(z)] += w;
                }
            }
        },
        cap);

    for (auto& row : m.cluster)
        for (auto& v : row) v /= total;
    for (auto& doc : m.pair)
        for (auto& row : doc)
            for (auto& v : row) v /= total;
    m.log_partition = max_logp + std::log(total);
    return m;
}

} // namespace microasm
