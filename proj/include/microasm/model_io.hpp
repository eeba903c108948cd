#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"
#include "microasm/hyperparams.hpp"
#include "microasm/lexicon.hpp"
#include "microasm/state.hpp"

namespace microasm {

inline constexpr int kModelFileVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Everything needed to classify, fold in, and inspect topics without the
// training corpus: hyperparameters, lexicon + beta rule, vocabulary, the
// training documents' pair word-ids, assignments, and the averaged
// accumulators. Count tensors are rebuilt from the assignments on load and
// verified against the stored checksum.
struct TrainedModel {
    Hyperparams hp;
    SeedLexicon lexicon;
    Vocabulary vocabulary;
    std::vector<std::string> doc_ids;
    std::vector<std::vector<WordPair>> doc_pairs;
    ModelState state;
    int pair_window = 5;
    nlohmann::json prep_options;
    std::string corpus_checksum; // of the corpus file the model was trained on
};

inline nlohmann::json model_to_json(const ModelState& st, const Hyperparams& hp,
                                    const SeedLexicon& lexicon, const Corpus& corpus,
                                    const std::string& corpus_checksum) {
    nlohmann::json docs = nlohmann::json::array();
    for (std::int32_t d = 0; d < st.D; ++d) {
        const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& p : doc.pairs) pairs.push_back({p.first, p.second});
        docs.push_back(nlohmann::json{
            {"id", doc.id},
            {"pairs", pairs},
            {"sent", st.sent_of_pair[static_cast<std::size_t>(d)]},
            {"topic", st.topic_of_pair[static_cast<std::size_t>(d)]},
            {"unconstrained", st.unconstrained[static_cast<std::size_t>(d)]}});
    }
    nlohmann::json j{
        {"version", kModelFileVersion},
        {"hyperparams", hyperparams_to_json(hp)},
        {"lexicon",
         {{"positive", std::vector<std::string>(lexicon.positive.begin(), lexicon.positive.end())},
          {"negative", std::vector<std::string>(lexicon.negative.begin(), lexicon.negative.end())}}},
        {"vocabulary", corpus.vocabulary.words()},
        {"pair_window", corpus.options.pair_window},
        {"prep_options", options_to_json(corpus.options)},
        {"corpus_checksum", corpus_checksum},
        {"cluster_of_doc", st.cluster_of_doc},
        {"documents", docs},
        {"accumulators",
         {{"doc_sent", st.acc_doc_sent},
          {"doc_sent_topic", st.acc_doc_sent_topic},
          {"word_sent_topic", st.acc_word_sent_topic},
          {"sent_topic", st.acc_sent_topic},
          {"sweeps", st.acc_sweeps}}},
        {"counters",
         {{"completed_sweeps", st.completed_sweeps},
          {"cluster_fallbacks", st.cluster_fallbacks},
          {"pair_fallbacks", st.pair_fallbacks},
          {"unconstrained_pairs", st.unconstrained_pairs}}},
    };
    j["checksums"] = {{"counts", hex64(st.counts_checksum())}, {"content", ""}};
    j["checksums"]["content"] = hex64(fnv1a64(j.dump()));
    return j;
}

inline void save_model(const std::string& path, const ModelState& st, const Hyperparams& hp,
                       const SeedLexicon& lexicon, const Corpus& corpus,
                       const std::string& corpus_checksum) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write model file: " + path);
    out << model_to_json(st, hp, lexicon, corpus, corpus_checksum).dump() << '\n';
}

inline TrainedModel model_from_json(nlohmann::json j) {
    if (!j.is_object() || !j.contains("version")) throw input_error("not a model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFileVersion)
        throw version_error("unsupported model file version " + std::to_string(version));

    // content checksum covers the file with its own digest blanked
    const std::string stored_content = j.at("checksums").at("content").get<std::string>();
    j["checksums"]["content"] = "";
    if (hex64(fnv1a64(j.dump())) != stored_content)
        throw input_error("model file content checksum mismatch");
    j["checksums"]["content"] = stored_content;

    TrainedModel model;
    model.hp = hyperparams_from_json(j.at("hyperparams"));
    for (const auto& w : j.at("lexicon").at("positive"))
        model.lexicon.positive.insert(w.get<std::string>());
    for (const auto& w : j.at("lexicon").at("negative"))
        model.lexicon.negative.insert(w.get<std::string>());
    for (const auto& w : j.at("vocabulary")) model.vocabulary.add(w.get<std::string>());
    model.pair_window = j.at("pair_window").get<int>();
    model.prep_options = j.at("prep_options");
    model.corpus_checksum = j.at("corpus_checksum").get<std::string>();
    model.hp.beta = build_beta(model.lexicon, model.vocabulary, model.hp.sentiments,
                               j.at("hyperparams").at("beta_base").get<double>(),
                               j.at("hyperparams").at("beta_seed").get<double>());

    const auto& docs = j.at("documents");
    const auto D = static_cast<std::int32_t>(docs.size());
    ModelState& st = model.state;
    st.allocate(D, model.hp.clusters, model.hp.sentiments, model.hp.topics,
                static_cast<std::int32_t>(model.vocabulary.size()));
    st.cluster_of_doc = j.at("cluster_of_doc").get<std::vector<std::int32_t>>();
    if (static_cast<std::int32_t>(st.cluster_of_doc.size()) != D)
        throw input_error("model file: cluster assignment length mismatch");

    // shadow corpus carrying only what count recomputation needs
    Corpus shadow;
    for (std::int32_t d = 0; d < D; ++d) {
        const auto& dj = docs[static_cast<std::size_t>(d)];
        Document doc;
        doc.id = dj.at("id").get<std::string>();
        for (const auto& p : dj.at("pairs"))
            doc.pairs.emplace_back(p[0].get<WordId>(), p[1].get<WordId>());
        st.sent_of_pair[static_cast<std::size_t>(d)] =
            dj.at("sent").get<std::vector<std::int32_t>>();
        st.topic_of_pair[static_cast<std::size_t>(d)] =
            dj.at("topic").get<std::vector<std::int32_t>>();
        st.unconstrained[static_cast<std::size_t>(d)] =
            dj.at("unconstrained").get<std::vector<std::uint8_t>>();
        if (st.sent_of_pair[static_cast<std::size_t>(d)].size() != doc.pairs.size() ||
            st.topic_of_pair[static_cast<std::size_t>(d)].size() != doc.pairs.size())
            throw input_error("model file: assignment length mismatch in document " + doc.id);
        model.doc_ids.push_back(doc.id);
        model.doc_pairs.push_back(doc.pairs);
        shadow.documents.push_back(std::move(doc));
    }
    st.recompute_counts(shadow);
    if (hex64(st.counts_checksum()) != j.at("checksums").at("counts").get<std::string>())
        throw input_error("model file: count checksum mismatch after recomputation");

    const auto& acc = j.at("accumulators");
    st.acc_doc_sent = acc.at("doc_sent").get<std::vector<double>>();
    st.acc_doc_sent_topic = acc.at("doc_sent_topic").get<std::vector<double>>();
    st.acc_word_sent_topic = acc.at("word_sent_topic").get<std::vector<double>>();
    st.acc_sent_topic = acc.at("sent_topic").get<std::vector<double>>();
    st.acc_sweeps = acc.at("sweeps").get<std::int64_t>();
    const auto& counters = j.at("counters");
    st.completed_sweeps = counters.at("completed_sweeps").get<std::int64_t>();
    st.cluster_fallbacks = counters.at("cluster_fallbacks").get<std::uint64_t>();
    st.pair_fallbacks = counters.at("pair_fallbacks").get<std::uint64_t>();
    st.unconstrained_pairs = counters.at("unconstrained_pairs").get<std::int64_t>();
    return model;
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read model file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw input_error("model file is not valid JSON: " + path);
    return model_from_json(std::move(j));
}

} // namespace microasm
