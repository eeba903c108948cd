#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "microasm/errors.hpp"
#include "microasm/hyperparams.hpp"
#include "microasm/sampler.hpp"
#include "microasm/state.hpp"

namespace microasm {

enum class PosteriorSource { point, averaged };

// smoothed probabilities from a count vector; the normalizer is the sum of
// the numerators so each vector sums to one up to rounding
inline std::vector<double> smoothed_distribution(const std::vector<double>& counts, double prior) {
    std::vector<double> num(counts.size());
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        num[i] = counts[i] + prior;
        total += num[i];
    }
    for (auto& v : num) v /= total;
    return num;
}

// Read-only posterior estimates over a trained (or loaded) state. Uses the
// post-burn-in averaged counts when available unless point estimation was
// requested.
class Posterior {
public:
    Posterior(const ModelState& st, const Hyperparams& hp,
              std::optional<PosteriorSource> force = std::nullopt)
        : st_(st), hp_(hp) {
        if (force)
            source_ = *force;
        else
            source_ = (st.acc_sweeps > 0 && !hp.point_estimate) ? PosteriorSource::averaged
                                                                : PosteriorSource::point;
        if (source_ == PosteriorSource::averaged && st.acc_sweeps == 0)
            throw config_error("no averaged counts available; train past burn-in first");
    }

    PosteriorSource source() const { return source_; }

    std::vector<double> doc_sentiment(std::int32_t d) const {
        check_doc(d);
        std::vector<double> counts(static_cast<std::size_t>(st_.S));
        for (std::int32_t s = 0; s < st_.S; ++s) counts[static_cast<std::size_t>(s)] = doc_sent_count(d, s);
        return smoothed_distribution(counts, hp_.gamma);
    }

    std::vector<double> doc_aspect(std::int32_t d, std::int32_t s) const {
        check_doc(d);
        if (s < 0 || s >= st_.S) throw input_error("sentiment index out of range");
        std::vector<double> counts(static_cast<std::size_t>(st_.T));
        for (std::int32_t z = 0; z < st_.T; ++z)
            counts[static_cast<std::size_t>(z)] = doc_sent_topic_count(d, s, z);
        return smoothed_distribution(counts, hp_.alpha);
    }

    std::vector<double> word_distribution(std::int32_t s, std::int32_t z) const {
        if (s < 0 || s >= st_.S || z < 0 || z >= st_.T)
            throw input_error("sentiment/topic index out of range");
        std::vector<double> num(static_cast<std::size_t>(st_.V));
        double total = 0.0;
        for (std::int32_t w = 0; w < st_.V; ++w) {
            const std::size_t idx = st_.wst(w, s, z);
            const double c = source_ == PosteriorSource::averaged
                                 ? st_.acc_word_sent_topic[idx] / static_cast<double>(st_.acc_sweeps)
                                 : static_cast<double>(st_.n_word_sent_topic[idx]);
            num[static_cast<std::size_t>(w)] = c + hp_.beta.at(s, w);
            total += num[static_cast<std::size_t>(w)];
        }
        for (auto& v : num) v /= total;
        return num;
    }

    const ModelState& state() const { return st_; }
    const Hyperparams& hyperparams() const { return hp_; }

private:
    void check_doc(std::int32_t d) const {
        if (d < 0 || d >= st_.D) throw input_error("unknown document index");
    }
    double doc_sent_count(std::int32_t d, std::int32_t s) const {
        return source_ == PosteriorSource::averaged
                   ? st_.acc_doc_sent[st_.ds(d, s)] / static_cast<double>(st_.acc_sweeps)
                   : static_cast<double>(st_.n_doc_sent[st_.ds(d, s)]);
    }
    double doc_sent_topic_count(std::int32_t d, std::int32_t s, std::int32_t z) const {
        return source_ == PosteriorSource::averaged
                   ? st_.acc_doc_sent_topic[st_.dst(d, s, z)] / static_cast<double>(st_.acc_sweeps)
                   : static_cast<double>(st_.n_doc_sent_topic[st_.dst(d, s, z)]);
    }

    const ModelState& st_;
    const Hyperparams& hp_;
    PosteriorSource source_;
};

struct Classification {
    Polarity label = Polarity::positive;
    double p_pos = 0.0;
    double p_neg = 0.0;
    bool tie = false;
};

// positive iff P(pos) > P(neg); an exact tie labels positive with the flag set
inline Classification classify_sentiment(const std::vector<double>& probs) {
    if (probs.size() != 2)
        throw config_error("sentiment classification requires exactly two sentiments");
    Classification c;
    c.p_pos = probs[0];
    c.p_neg = probs[1];
    c.tie = probs[0] == probs[1];
    c.label = probs[0] >= probs[1] ? Polarity::positive : Polarity::negative;
    return c;
}

inline Classification classify_document(const Posterior& post, std::int32_t d) {
    return classify_sentiment(post.doc_sentiment(d));
}

inline std::optional<Classification> classify_folded(const FoldResult& fold, double gamma) {
    if (fold.unclassifiable) return std::nullopt;
    return classify_sentiment(smoothed_distribution(fold.doc_sent, gamma));
}

struct TopTerms {
    std::int32_t sentiments = 0, topics = 0;
    // [s*T + z], each ranked non-increasing by probability, ties by word id
    std::vector<std::vector<std::pair<WordId, double>>> terms;
};

inline TopTerms top_terms(const Posterior& post, std::int32_t k) {
    if (k < 1) throw config_error("top term count must be >= 1");
    const ModelState& st = post.state();
    TopTerms out;
    out.sentiments = st.S;
    out.topics = st.T;
    out.terms.resize(static_cast<std::size_t>(st.S) * static_cast<std::size_t>(st.T));
    const std::int32_t kk = std::min<std::int32_t>(k, st.V);
    for (std::int32_t s = 0; s < st.S; ++s)
        for (std::int32_t z = 0; z < st.T; ++z) {
            const std::vector<double> p = post.word_distribution(s, z);
            std::vector<WordId> order(static_cast<std::size_t>(st.V));
            for (std::int32_t w = 0; w < st.V; ++w) order[static_cast<std::size_t>(w)] = w;
            std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                              [&p](WordId a, WordId b) {
                                  const double pa = p[static_cast<std::size_t>(a)];
                                  const double pb = p[static_cast<std::size_t>(b)];
                                  if (pa != pb) return pa > pb;
                                  return a < b;
                              });
            auto& dst = out.terms[st.st(s, z)];
            dst.reserve(static_cast<std::size_t>(kk));
            for (std::int32_t r = 0; r < kk; ++r)
                dst.emplace_back(order[static_cast<std::size_t>(r)],
                                 p[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
        }
    return out;
}

// cluster-level analogues of the document estimators, from final counts;
// diagnostic output only
inline std::vector<double> cluster_sentiment(const ModelState& st, const Hyperparams& hp,
                                             std::int32_t c) {
    std::vector<double> counts(static_cast<std::size_t>(st.S));
    for (std::int32_t s = 0; s < st.S; ++s)
        counts[static_cast<std::size_t>(s)] = st.n_cluster_sent[st.cs(c, s)];
    return smoothed_distribution(counts, hp.gamma);
}

inline std::vector<double> cluster_aspect(const ModelState& st, const Hyperparams& hp,
                                          std::int32_t c, std::int32_t s) {
    std::vector<double> counts(static_cast<std::size_t>(st.T));
    for (std::int32_t z = 0; z < st.T; ++z)
        counts[static_cast<std::size_t>(z)] = st.n_cluster_sent_topic[st.cst(c, s, z)];
    return smoothed_distribution(counts, hp.alpha);
}

} // namespace microasm
