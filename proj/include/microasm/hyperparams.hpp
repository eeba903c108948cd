#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "microasm/errors.hpp"
#include "microasm/lexicon.hpp"

namespace microasm {

struct Hyperparams {
    double alpha = 0.1;  // prior for per-(cluster, sentiment) aspect distribution
    double gamma = 1.0;  // prior for per-cluster sentiment distribution
    double delta = 0.1;  // prior for the cluster distribution
    BetaPrior beta;      // asymmetric prior for per-(sentiment, aspect) word distribution

    std::int32_t clusters = 500;
    std::int32_t topics = 15;
    std::int32_t sentiments = 2;
    std::int32_t iterations = 1500;
    std::int32_t burn_in = 1000;
    std::uint64_t rng_seed = 1;

    bool strict_paper_eq3 = false; // literal printed cluster kernel, for comparison
    bool point_estimate = false;   // final-sweep posterior instead of the post-burn-in average

    void validate(std::size_t vocab_size) const {
        if (!(alpha > 0.0)) throw config_error("alpha must be > 0");
        if (!(gamma > 0.0)) throw config_error("gamma must be > 0");
        if (!(delta > 0.0)) throw config_error("delta must be > 0");
        if (clusters < 1) throw config_error("cluster count must be >= 1");
        if (topics < 1) throw config_error("topic count must be >= 1");
        if (sentiments < 1) throw config_error("sentiment count must be >= 1");
        if (iterations < 0) throw config_error("iteration count must be >= 0");
        if (burn_in < 0) throw config_error("burn-in must be >= 0");
        if (iterations > 0 && iterations <= burn_in)
            throw config_error("iterations must exceed burn-in (iterations=" +
                               std::to_string(iterations) + ", burn_in=" + std::to_string(burn_in) +
                               ")");
        if (beta.sentiments != sentiments)
            throw config_error("beta prior sentiment dimension does not match sentiment count");
        if (beta.vocab != vocab_size)
            throw config_error("beta prior vocabulary dimension does not match the corpus");
        if (beta.mass.size() != static_cast<std::size_t>(sentiments) * vocab_size)
            throw config_error("beta prior storage is inconsistent");
    }
};

inline nlohmann::json hyperparams_to_json(const Hyperparams& h) {
    return nlohmann::json{{"alpha", h.alpha},
                          {"gamma", h.gamma},
                          {"delta", h.delta},
                          {"beta_base", h.beta.base},
                          {"beta_seed", h.beta.seed_match},
                          {"clusters", h.clusters},
                          {"topics", h.topics},
                          {"sentiments", h.sentiments},
                          {"iterations", h.iterations},
                          {"burn_in", h.burn_in},
                          {"rng_seed", h.rng_seed},
                          {"strict_paper_eq3", h.strict_paper_eq3},
                          {"point_estimate", h.point_estimate}};
}

// beta is rebuilt separately from the stored lexicon + vocabulary
inline Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams h;
    h.alpha = j.at("alpha").get<double>();
    h.gamma = j.at("gamma").get<double>();
    h.delta = j.at("delta").get<double>();
    h.clusters = j.at("clusters").get<std::int32_t>();
    h.topics = j.at("topics").get<std::int32_t>();
    h.sentiments = j.at("sentiments").get<std::int32_t>();
    h.iterations = j.at("iterations").get<std::int32_t>();
    h.burn_in = j.at("burn_in").get<std::int32_t>();
    h.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    h.strict_paper_eq3 = j.at("strict_paper_eq3").get<bool>();
    h.point_estimate = j.at("point_estimate").get<bool>();
    return h;
}

} // namespace microasm
