// Command-line front end: prep -> train -> topics/classify/eval, plus the
// metrics, synth, and clusters utilities. One binary, one subcommand each.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "microasm/microasm.hpp"

using namespace microasm;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// output sink: "-" writes to stdout
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw input_error("cannot write file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_error(const char* code, const std::string& message) {
    std::fprintf(stderr, "MICROASM_ERROR %s\n%s\n", code, message.c_str());
}

template <typename Fn>
int run_guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const version_error& e) {
        emit_error("version_mismatch", e.what());
        return 4;
    } catch (const config_error& e) {
        emit_error("config", e.what());
        return 3;
    } catch (const input_error& e) {
        emit_error("bad_input", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        emit_error("bad_input", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
}

// ---- prep ----------------------------------------------------------------

struct PrepArgs {
    std::string input;
    std::string output;
    std::string format = "jsonl"; // jsonl | plain
    bool no_lowercase = false;
    std::string stopwords_file;
    std::string negators_file;
    int negation_window = 5;
    int pair_window = 5;
    double rating_threshold = 3.0;
    bool strict = false;
};

std::vector<std::string> file_word_list(const std::string& path) {
    auto set = read_word_list(path);
    return {set.begin(), set.end()};
}

void do_prep(const PrepArgs& args) {
    PrepOptions opts;
    opts.lowercase = !args.no_lowercase;
    opts.pretokenized = args.format == "plain";
    opts.negation_window = args.negation_window;
    opts.pair_window = args.pair_window;
    opts.rating_threshold = args.rating_threshold;
    if (!args.stopwords_file.empty()) opts.stopwords = file_word_list(args.stopwords_file);
    if (!args.negators_file.empty()) opts.negators = file_word_list(args.negators_file);

    std::ifstream in(args.input, std::ios::binary);
    if (!in) throw input_error("cannot read input file: " + args.input);
    std::vector<ReadIssue> issues;
    std::vector<RawDocument> raws;
    if (args.format == "jsonl")
        raws = read_jsonl(in, args.strict, &issues);
    else
        raws = read_plain(in);

    Corpus corpus = build_corpus(raws, opts);
    save_corpus(corpus, args.output);

    std::printf("documents: %zu kept, %zu dropped (zero pairs), %zu skipped lines\n",
                corpus.documents.size(), corpus.dropped.size(), issues.size());
    std::printf("vocabulary: %zu words\n", corpus.vocab_size());
    std::printf("pairs: %zu\n", corpus.pair_count());
    for (const auto& d : corpus.dropped) log_info("dropped zero-pair document %s", d.id.c_str());
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
    std::string corpus_path;
    std::string output;
    std::string report_path;
    double alpha = 0.1, gamma = 1.0, delta = 0.1;
    double beta_base = 0.01, beta_seed = 0.1;
    std::int32_t clusters = 500, topics = 15, sentiments = 2;
    std::int32_t iterations = 1500, burn_in = 1000;
    std::uint64_t seed = 1;
    std::int32_t chains = 1;
    bool strict_eq3 = false;
    bool point_estimate = false;
    bool check_invariants = false;
    std::string lexicon_file;
    std::string pos_seeds_file, neg_seeds_file;
    bool no_seeds = false;
};

SeedLexicon resolve_lexicon(const TrainArgs& args) {
    if (args.no_seeds) return SeedLexicon{};
    if (!args.lexicon_file.empty()) return load_lexicon_json(args.lexicon_file);
    if (!args.pos_seeds_file.empty() || !args.neg_seeds_file.empty()) {
        if (args.pos_seeds_file.empty() || args.neg_seeds_file.empty())
            throw config_error("--pos-seeds and --neg-seeds must be given together");
        return load_lexicon_lists(args.pos_seeds_file, args.neg_seeds_file);
    }
    return default_lexicon();
}

void do_train(const TrainArgs& args) {
    const std::string corpus_bytes = read_file(args.corpus_path);
    nlohmann::json cj = nlohmann::json::parse(corpus_bytes, nullptr, false);
    if (cj.is_discarded()) throw input_error("corpus file is not valid JSON: " + args.corpus_path);
    Corpus corpus = corpus_from_json(cj);
    const std::string corpus_checksum = hex64(fnv1a64(corpus_bytes));

    SeedLexicon lexicon = resolve_lexicon(args);
    Hyperparams hp;
    hp.alpha = args.alpha;
    hp.gamma = args.gamma;
    hp.delta = args.delta;
    hp.clusters = args.clusters;
    hp.topics = args.topics;
    hp.sentiments = args.sentiments;
    hp.iterations = args.iterations;
    hp.burn_in = args.burn_in;
    hp.strict_paper_eq3 = args.strict_eq3;
    hp.point_estimate = args.point_estimate;
    hp.beta =
        build_beta(lexicon, corpus.vocabulary, args.sentiments, args.beta_base, args.beta_seed);
    if (args.chains < 1) throw config_error("chain count must be >= 1");
    hp.rng_seed = derive_seed(args.seed, 0);
    hp.validate(corpus.vocab_size());

    // independent chains; the best final joint wins
    struct ChainResult {
        ModelState state;
        TrainReport report;
        std::uint64_t seed = 0;
        double final_joint = -std::numeric_limits<double>::infinity();
    };
    std::vector<ChainResult> results(static_cast<std::size_t>(args.chains));
    auto run_chain = [&](std::int32_t idx) {
        Hyperparams chain_hp = hp;
        chain_hp.rng_seed = derive_seed(args.seed, static_cast<std::uint64_t>(idx));
        GibbsSampler sampler(corpus, chain_hp);
        sampler.set_check_invariants(args.check_invariants);
        ChainResult& r = results[static_cast<std::size_t>(idx)];
        r.report = sampler.run();
        r.state = std::move(sampler.state());
        r.seed = chain_hp.rng_seed;
        if (!r.report.sweeps.empty()) r.final_joint = r.report.sweeps.back().log_joint;
    };
    if (args.chains == 1) {
        run_chain(0);
    } else {
        std::vector<std::thread> threads;
        for (std::int32_t i = 0; i < args.chains; ++i) threads.emplace_back(run_chain, i);
        for (auto& t : threads) t.join();
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].final_joint > results[best].final_joint) best = i;
    ChainResult& winner = results[best];
    hp.rng_seed = winner.seed;

    save_model(args.output, winner.state, hp, lexicon, corpus, corpus_checksum);

    const std::string report_path =
        args.report_path.empty() ? args.output + ".report.jsonl" : args.report_path;
    std::ofstream rep(report_path, std::ios::binary);
    if (!rep) throw input_error("cannot write report file: " + report_path);
    nlohmann::json cfg = hyperparams_to_json(hp);
    cfg["root_seed"] = args.seed;
    cfg["chains"] = args.chains;
    cfg["chosen_chain"] = best;
    cfg["corpus_checksum"] = corpus_checksum;
    cfg["unconstrained_pairs"] = winner.report.unconstrained_pairs;
    rep << nlohmann::json{{"config", cfg}}.dump() << '\n';
    for (const auto& s : winner.report.sweeps) {
        rep << nlohmann::json{{"sweep", s.sweep},
                              {"log_joint", s.log_joint},
                              {"nonempty_clusters", s.nonempty_clusters},
                              {"wall_ms", s.wall_ms},
                              {"cluster_fallbacks", s.cluster_fallbacks},
                              {"pair_fallbacks", s.pair_fallbacks}}
                   .dump()
            << '\n';
    }

    std::printf("trained %d sweeps on %zu documents (%zu pairs)\n", hp.iterations,
                corpus.documents.size(), corpus.pair_count());
    if (!winner.report.sweeps.empty()) {
        const auto& last = winner.report.sweeps.back();
        std::printf("final log joint: %.4f, nonempty clusters: %d\n", last.log_joint,
                    last.nonempty_clusters);
    }
    std::printf("model: %s\nreport: %s\n", args.output.c_str(), report_path.c_str());
}

// ---- shared model glue -----------------------------------------------------

nlohmann::json model_config_echo(const TrainedModel& model) {
    nlohmann::json cfg = hyperparams_to_json(model.hp);
    cfg["corpus_checksum"] = model.corpus_checksum;
    cfg["pair_window"] = model.pair_window;
    return cfg;
}

// ---- topics ----------------------------------------------------------------

struct TopicsArgs {
    std::string model_path;
    std::string output = "-";
    std::int32_t k = 20;
    bool as_json = false;
    bool point = false;
};

void do_topics(const TopicsArgs& args) {
    TrainedModel model = load_model(args.model_path);
    std::optional<PosteriorSource> force;
    if (args.point) force = PosteriorSource::point;
    Posterior post(model.state, model.hp, force);
    TopTerms top = top_terms(post, args.k);
    const char* source = post.source() == PosteriorSource::averaged ? "averaged" : "point";

    Sink sink(args.output);
    std::ostream& out = sink.stream();
    if (args.as_json) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::int32_t s = 0; s < top.sentiments; ++s)
            for (std::int32_t z = 0; z < top.topics; ++z) {
                nlohmann::json terms = nlohmann::json::array();
                for (const auto& [w, p] : top.terms[model.state.st(s, z)])
                    terms.push_back({{"word", model.vocabulary.word(w)}, {"p", p}});
                rows.push_back({{"sentiment", s}, {"topic", z}, {"terms", terms}});
            }
        nlohmann::json j{
            {"config", model_config_echo(model)}, {"source", source}, {"topics", rows}};
        out << j.dump(2) << '\n';
    } else {
        out << "# config " << model_config_echo(model).dump() << " source=" << source << '\n';
        out << "sentiment\ttopic\trank\tword\tprobability\n";
        char buf[64];
        for (std::int32_t s = 0; s < top.sentiments; ++s)
            for (std::int32_t z = 0; z < top.topics; ++z) {
                const auto& terms = top.terms[model.state.st(s, z)];
                for (std::size_t r = 0; r < terms.size(); ++r) {
                    std::snprintf(buf, sizeof(buf), "%.10g", terms[r].second);
                    out << s << '\t' << z << '\t' << (r + 1) << '\t'
                        << model.vocabulary.word(terms[r].first) << '\t' << buf << '\n';
                }
            }
    }
}

// ---- classify ---------------------------------------------------------------

struct ClassifyArgs {
    std::string model_path;
    std::string corpus_path;
    std::string output = "-";
    std::int32_t fold_burn_in = 50;
    std::int32_t fold_samples = 20;
    std::uint64_t seed = 1;
};

nlohmann::json classification_line(const std::string& id, const Classification& c) {
    return nlohmann::json{{"id", id},
                          {"p_pos", c.p_pos},
                          {"p_neg", c.p_neg},
                          {"label", c.label == Polarity::positive ? "pos" : "neg"},
                          {"tie", c.tie}};
}

nlohmann::json unclassifiable_line(const std::string& id) {
    return nlohmann::json{{"id", id},
                          {"p_pos", nullptr},
                          {"p_neg", nullptr},
                          {"label", "unclassifiable"},
                          {"tie", false}};
}

void do_classify(const ClassifyArgs& args) {
    TrainedModel model = load_model(args.model_path);
    if (model.hp.sentiments != 2)
        throw config_error("classification requires a two-sentiment model");

    Sink sink(args.output);
    std::ostream& out = sink.stream();
    nlohmann::json cfg = model_config_echo(model);
    cfg["fold_burn_in"] = args.fold_burn_in;
    cfg["fold_samples"] = args.fold_samples;
    cfg["seed"] = args.seed;

    FoldOptions fo;
    fo.burn_in = args.fold_burn_in;
    fo.samples = args.fold_samples;

    std::uint64_t stream = 0;
    auto fold_and_classify = [&](const std::string& id, const std::vector<WordPair>& pairs) {
        fo.rng_seed = derive_seed(args.seed, stream++);
        FoldResult fold = fold_in(model.state, model.hp, pairs, fo);
        auto cls = classify_folded(fold, model.hp.gamma);
        out << (cls ? classification_line(id, *cls) : unclassifiable_line(id)).dump() << '\n';
    };

    if (args.corpus_path.empty()) {
        // training documents straight from the stored estimates
        cfg["mode"] = "training";
        out << nlohmann::json{{"config", cfg}}.dump() << '\n';
        Posterior post(model.state, model.hp);
        for (std::int32_t d = 0; d < model.state.D; ++d)
            out << classification_line(model.doc_ids[static_cast<std::size_t>(d)],
                                       classify_document(post, d))
                       .dump()
                << '\n';
        return;
    }

    const std::string corpus_bytes = read_file(args.corpus_path);
    nlohmann::json cj = nlohmann::json::parse(corpus_bytes, nullptr, false);
    if (cj.is_discarded()) throw input_error("corpus file is not valid JSON: " + args.corpus_path);
    Corpus corpus = corpus_from_json(cj);
    const std::string checksum = hex64(fnv1a64(corpus_bytes));

    if (checksum == model.corpus_checksum) {
        // the training corpus: stored estimates for kept documents, fold-in
        // with the self-pair fallback for the zero-pair side list
        cfg["mode"] = "training";
        out << nlohmann::json{{"config", cfg}}.dump() << '\n';
        Posterior post(model.state, model.hp);
        for (std::int32_t d = 0; d < model.state.D; ++d)
            out << classification_line(corpus.documents[static_cast<std::size_t>(d)].id,
                                       classify_document(post, d))
                       .dump()
                << '\n';
        for (const auto& doc : corpus.dropped) {
            std::vector<WordPair> pairs;
            if (!doc.tokens.empty()) pairs.emplace_back(doc.tokens.front(), doc.tokens.front());
            fold_and_classify(doc.id, pairs);
        }
        return;
    }

    // held-out corpus: remap words onto the model vocabulary, drop OOV, fold in
    cfg["mode"] = "fold_in";
    out << nlohmann::json{{"config", cfg}}.dump() << '\n';
    auto remap_and_classify = [&](const Document& doc) {
        std::vector<WordId> tokens;
        for (WordId t : doc.tokens) {
            auto mapped = model.vocabulary.find(corpus.vocabulary.word(t));
            if (mapped) tokens.push_back(*mapped);
        }
        std::vector<WordPair> pairs = extract_pairs(tokens, model.pair_window);
        if (pairs.empty() && !tokens.empty()) pairs.emplace_back(tokens.front(), tokens.front());
        fold_and_classify(doc.id, pairs);
    };
    for (const auto& doc : corpus.documents) remap_and_classify(doc);
    for (const auto& doc : corpus.dropped) remap_and_classify(doc);
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string predictions_path;
    std::string corpus_path;
    std::string output = "-";
};

void do_eval(const EvalArgs& args) {
    std::ifstream in(args.predictions_path, std::ios::binary);
    if (!in) throw input_error("cannot read predictions file: " + args.predictions_path);
    std::map<std::string, std::optional<Polarity>> pred;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw input_error("predictions line " + std::to_string(lineno) + ": not a JSON object");
        if (j.contains("config")) continue;
        if (!j.contains("id") || !j.contains("label"))
            throw input_error("predictions line " + std::to_string(lineno) +
                              ": missing id or label");
        const std::string id = j["id"].get<std::string>();
        const std::string label = j["label"].get<std::string>();
        if (pred.count(id) != 0) throw input_error("duplicate prediction for document " + id);
        if (label == "unclassifiable") {
            pred[id] = std::nullopt;
        } else {
            auto p = polarity_from_string(label);
            if (!p)
                throw input_error("predictions line " + std::to_string(lineno) +
                                  ": label must be pos, neg, or unclassifiable");
            pred[id] = p;
        }
    }
    if (pred.empty()) throw input_error("no predictions found");

    Corpus corpus = load_corpus(args.corpus_path);
    std::map<std::string, std::optional<Polarity>> gold;
    for (const auto& d : corpus.documents) gold[d.id] = d.gold;
    for (const auto& d : corpus.dropped) gold[d.id] = d.gold;

    std::vector<std::optional<Polarity>> preds, golds;
    std::int64_t unknown_ids = 0;
    for (const auto& [id, p] : pred) {
        auto it = gold.find(id);
        if (it == gold.end()) {
            ++unknown_ids;
            continue;
        }
        preds.push_back(p);
        golds.push_back(it->second);
    }
    if (unknown_ids > 0)
        log_warn("%lld predictions refer to unknown document ids",
                 static_cast<long long>(unknown_ids));
    if (preds.empty()) throw input_error("no prediction ids match the corpus");

    AccuracyResult r = accuracy(preds, golds);
    Sink sink(args.output);
    nlohmann::json j{
        {"accuracy", r.value},
        {"evaluated", r.evaluated},
        {"correct", r.correct},
        {"unclassifiable", r.unclassifiable},
        {"missing_gold", r.missing_gold},
        {"unknown_ids", unknown_ids},
        {"config", {{"predictions", args.predictions_path}, {"corpus", args.corpus_path}}}};
    sink.stream() << j.dump(2) << '\n';
}

// ---- metrics ------------------------------------------------------------------

struct MetricsArgs {
    std::string sheet_path;
    std::string output = "-";
    bool paper_kappa = false;
    double log_base = 0.0;
};

void do_metrics(const MetricsArgs& args) {
    std::ifstream in(args.sheet_path, std::ios::binary);
    if (!in) throw input_error("cannot read annotation sheet: " + args.sheet_path);
    AnnotationSheet sheet = load_annotation_csv(in);
    const auto labels = sheet.pooled_labels();

    KappaResult kappa = args.paper_kappa ? paper_agreeability(sheet) : cohen_kappa(sheet);
    nlohmann::json j{{"diversity", shannon_diversity(labels, args.log_base)},
                     {"specificity", specificity(labels)},
                     {"kappa", kappa.value},
                     {"kappa_observed", kappa.observed_agreement},
                     {"kappa_chance", kappa.chance_agreement},
                     {"kappa_degenerate", kappa.degenerate},
                     {"kappa_variant", args.paper_kappa ? "printed" : "standard"},
                     {"n", labels.size()},
                     {"pooled", true},
                     {"config",
                      {{"sheet", args.sheet_path},
                       {"log_base", args.log_base == 0.0 ? "e" : std::to_string(args.log_base)},
                       {"paper_kappa", args.paper_kappa}}}};
    Sink sink(args.output);
    sink.stream() << j.dump(2) << '\n';
}

// ---- synth ---------------------------------------------------------------------

struct SynthArgs {
    std::string output;
    std::string truth_path;
    std::string lexicon_path;
    SeparatedConfig cfg;
};

void do_synth(const SynthArgs& args) {
    SeparatedSynthetic synth = make_separated_spec(args.cfg);
    SyntheticData data = generate_synthetic(synth.spec);
    save_corpus(data.corpus, args.output);

    nlohmann::json cfg{{"docs", args.cfg.docs},
                       {"vocab", args.cfg.vocab},
                       {"clusters", args.cfg.clusters},
                       {"topics", args.cfg.topics},
                       {"seeds_per_polarity", args.cfg.seeds_per_polarity},
                       {"pairs_min", args.cfg.pairs_min},
                       {"pairs_max", args.cfg.pairs_max},
                       {"seed_mass", args.cfg.seed_mass},
                       {"topic_mass", args.cfg.topic_mass},
                       {"cluster_topic_mass", args.cfg.cluster_topic_mass},
                       {"sentiment_skew", args.cfg.sentiment_skew},
                       {"rng_seed", args.cfg.rng_seed}};

    if (!args.truth_path.empty()) {
        nlohmann::json pair_assign = nlohmann::json::array();
        for (const auto& doc : data.truth.pair_assign) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& [s, z] : doc) row.push_back({s, z});
            pair_assign.push_back(row);
        }
        std::vector<std::string> majority;
        for (Polarity p : data.truth.majority_sentiment) majority.push_back(to_string(p));
        nlohmann::json topic_words = nlohmann::json::array();
        for (std::size_t r = 0; r < synth.topic_words.size(); ++r) {
            nlohmann::json words = nlohmann::json::array();
            for (WordId w : synth.topic_words[r]) words.push_back(data.corpus.vocabulary.word(w));
            topic_words.push_back(words);
        }
        SeedLexicon lex = planted_lexicon(synth.spec);
        nlohmann::json truth{
            {"config", cfg},
            {"cluster_of_doc", data.truth.cluster_of_doc},
            {"pair_assign", pair_assign},
            {"majority_sentiment", majority},
            {"topic_words", topic_words},
            {"lexicon",
             {{"positive", std::vector<std::string>(lex.positive.begin(), lex.positive.end())},
              {"negative", std::vector<std::string>(lex.negative.begin(), lex.negative.end())}}}};
        std::ofstream out(args.truth_path, std::ios::binary);
        if (!out) throw input_error("cannot write truth file: " + args.truth_path);
        out << truth.dump() << '\n';
    }
    if (!args.lexicon_path.empty()) {
        // planted seeds in the format `train --lexicon` accepts, so the
        // recovered sentiments stay anchored to the generator's polarity
        SeedLexicon lex = planted_lexicon(synth.spec);
        nlohmann::json lj{
            {"positive", std::vector<std::string>(lex.positive.begin(), lex.positive.end())},
            {"negative", std::vector<std::string>(lex.negative.begin(), lex.negative.end())}};
        std::ofstream out(args.lexicon_path, std::ios::binary);
        if (!out) throw input_error("cannot write lexicon file: " + args.lexicon_path);
        out << lj.dump() << '\n';
    }
    std::printf("synthetic corpus: %d documents, vocabulary %d -> %s\n", args.cfg.docs,
                args.cfg.vocab, args.output.c_str());
    if (!args.truth_path.empty()) std::printf("ground truth: %s\n", args.truth_path.c_str());
    if (!args.lexicon_path.empty()) std::printf("planted lexicon: %s\n", args.lexicon_path.c_str());
}

// ---- clusters ---------------------------------------------------------------------

struct ClustersArgs {
    std::string model_path;
    std::string output = "-";
    std::int32_t top_docs = 5;
    bool cluster_posterior = false;
};

void do_clusters(const ClustersArgs& args) {
    TrainedModel model = load_model(args.model_path);
    const ModelState& st = model.state;
    Posterior post(model.state, model.hp, PosteriorSource::point);

    // cache the point word distributions once: S*T rows over V
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(st.S) *
                                         static_cast<std::size_t>(st.T));
    for (std::int32_t s = 0; s < st.S; ++s)
        for (std::int32_t z = 0; z < st.T; ++z) phi[st.st(s, z)] = post.word_distribution(s, z);

    // per-document mean log probability of its pairs under its cluster
    std::vector<double> scores(static_cast<std::size_t>(st.D), 0.0);
    for (std::int32_t d = 0; d < st.D; ++d) {
        const std::int32_t c = st.cluster_of_doc[static_cast<std::size_t>(d)];
        const auto pi = cluster_sentiment(st, model.hp, c);
        std::vector<std::vector<double>> theta;
        for (std::int32_t s = 0; s < st.S; ++s) theta.push_back(cluster_aspect(st, model.hp, c, s));
        double total = 0.0;
        const auto& pairs = model.doc_pairs[static_cast<std::size_t>(d)];
        for (const auto& [w1, w2] : pairs) {
            double p = 0.0;
            for (std::int32_t s = 0; s < st.S; ++s)
                for (std::int32_t z = 0; z < st.T; ++z) {
                    const auto& row = phi[st.st(s, z)];
                    p += pi[static_cast<std::size_t>(s)] *
                         theta[static_cast<std::size_t>(s)][static_cast<std::size_t>(z)] *
                         row[static_cast<std::size_t>(w1)] * row[static_cast<std::size_t>(w2)];
                }
            total += std::log(std::max(p, 1e-300));
        }
        scores[static_cast<std::size_t>(d)] =
            pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
    }

    nlohmann::json clusters = nlohmann::json::array();
    for (std::int32_t c = 0; c < st.C; ++c) {
        if (st.n_cluster[static_cast<std::size_t>(c)] == 0) continue;
        std::vector<std::int32_t> members;
        for (std::int32_t d = 0; d < st.D; ++d)
            if (st.cluster_of_doc[static_cast<std::size_t>(d)] == c) members.push_back(d);
        std::sort(members.begin(), members.end(), [&](std::int32_t a, std::int32_t b) {
            if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
                return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
            return a < b;
        });
        nlohmann::json top = nlohmann::json::array();
        for (std::size_t r = 0; r < members.size() && r < static_cast<std::size_t>(args.top_docs);
             ++r)
            top.push_back({{"id", model.doc_ids[static_cast<std::size_t>(members[r])]},
                           {"mean_log_prob", scores[static_cast<std::size_t>(members[r])]}});
        nlohmann::json entry{{"cluster", c},
                             {"documents", st.n_cluster[static_cast<std::size_t>(c)]},
                             {"pairs", st.n_cluster_pairs[static_cast<std::size_t>(c)]},
                             {"top_documents", top}};
        if (args.cluster_posterior) {
            entry["sentiment"] = cluster_sentiment(st, model.hp, c);
            nlohmann::json aspects = nlohmann::json::array();
            for (std::int32_t s = 0; s < st.S; ++s)
                aspects.push_back(cluster_aspect(st, model.hp, c, s));
            entry["aspect"] = aspects;
        }
        clusters.push_back(entry);
    }

    nlohmann::json assignments = nlohmann::json::array();
    for (std::int32_t d = 0; d < st.D; ++d)
        assignments.push_back({{"id", model.doc_ids[static_cast<std::size_t>(d)]},
                               {"cluster", st.cluster_of_doc[static_cast<std::size_t>(d)]}});

    nlohmann::json j{{"config", model_config_echo(model)},
                     {"nonempty_clusters", st.nonempty_clusters()},
                     {"clusters", clusters},
                     {"assignments", assignments}};
    Sink sink(args.output);
    sink.stream() << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MicroASM: cluster- and pair-based aspect sentiment model for short reviews"};
    app.require_subcommand(1);

    PrepArgs prep;
    auto* cmd_prep = app.add_subcommand("prep", "preprocess raw reviews into a corpus file");
    cmd_prep->add_option("input", prep.input, "input file (JSON Lines or pre-tokenized text)")
        ->required();
    cmd_prep->add_option("output", prep.output, "corpus file to write")->required();
    cmd_prep->add_option("--format", prep.format, "input format: jsonl|plain")
        ->check(CLI::IsMember({"jsonl", "plain"}));
    cmd_prep->add_flag("--no-lowercase", prep.no_lowercase, "keep the original casing");
    cmd_prep->add_option("--stopwords", prep.stopwords_file, "stopword list, one word per line");
    cmd_prep->add_option("--negators", prep.negators_file, "negator list, one word per line");
    cmd_prep->add_option("--negation-window", prep.negation_window, "negation scope in tokens")
        ->check(CLI::PositiveNumber);
    cmd_prep->add_option("--window", prep.pair_window, "pair co-occurrence window")
        ->check(CLI::PositiveNumber);
    cmd_prep->add_option("--rating-threshold", prep.rating_threshold,
                         "ratings below this are negative");
    cmd_prep->add_flag("--strict", prep.strict, "abort on the first malformed input line");

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train", "train a model on a corpus file");
    cmd_train->add_option("corpus", train_args.corpus_path, "corpus file from prep")->required();
    cmd_train->add_option("output", train_args.output, "model file to write")->required();
    cmd_train->add_option("--alpha", train_args.alpha, "aspect prior");
    cmd_train->add_option("--gamma", train_args.gamma, "sentiment prior");
    cmd_train->add_option("--delta", train_args.delta, "cluster prior");
    cmd_train->add_option("--beta-base", train_args.beta_base, "word prior for neutral words");
    cmd_train->add_option("--beta-seed", train_args.beta_seed, "word prior for matching seeds");
    cmd_train->add_option("--clusters", train_args.clusters, "cluster count");
    cmd_train->add_option("--topics", train_args.topics, "topic count");
    cmd_train->add_option("--sentiments", train_args.sentiments, "sentiment count");
    cmd_train->add_option("--iterations", train_args.iterations, "Gibbs sweeps");
    cmd_train->add_option("--burn-in", train_args.burn_in, "sweeps discarded before averaging");
    cmd_train->add_option("--seed", train_args.seed, "root random seed");
    cmd_train->add_option("--chains", train_args.chains,
                          "independent chains; the best final joint wins");
    cmd_train->add_flag("--strict-paper-eq3", train_args.strict_eq3,
                        "literal printed cluster kernel (diagnostic)");
    cmd_train->add_flag("--point-estimate", train_args.point_estimate,
                        "use the final sweep instead of the post-burn-in average");
    cmd_train->add_flag("--check-invariants", train_args.check_invariants,
                        "recompute counts after every sweep (slow, debug)");
    cmd_train->add_option("--lexicon", train_args.lexicon_file,
                          "seed lexicon JSON {positive:[],negative:[]}");
    cmd_train->add_option("--pos-seeds", train_args.pos_seeds_file, "positive seeds, one per line");
    cmd_train->add_option("--neg-seeds", train_args.neg_seeds_file, "negative seeds, one per line");
    cmd_train->add_flag("--no-seeds", train_args.no_seeds, "train without any seed lexicon");
    cmd_train->add_option("--report", train_args.report_path,
                          "per-sweep report path (default: <output>.report.jsonl)");

    TopicsArgs topics_args;
    auto* cmd_topics = app.add_subcommand("topics", "dump top terms per (sentiment, topic)");
    cmd_topics->add_option("model", topics_args.model_path, "model file")->required();
    cmd_topics->add_option("-k,--top", topics_args.k, "terms per distribution");
    cmd_topics->add_flag("--json", topics_args.as_json, "JSON instead of TSV");
    cmd_topics->add_flag("--point-estimate", topics_args.point,
                         "final-sweep counts instead of the average");
    cmd_topics->add_option("-o,--output", topics_args.output, "output file, - for stdout");

    ClassifyArgs classify_args;
    auto* cmd_classify = app.add_subcommand("classify", "label documents with sentiment");
    cmd_classify->add_option("model", classify_args.model_path, "model file")->required();
    cmd_classify->add_option("--corpus", classify_args.corpus_path,
                             "corpus to classify (defaults to the training documents)");
    cmd_classify->add_option("-o,--output", classify_args.output, "output file, - for stdout");
    cmd_classify->add_option("--fold-burn-in", classify_args.fold_burn_in,
                             "fold-in burn-in sweeps");
    cmd_classify->add_option("--fold-samples", classify_args.fold_samples,
                             "fold-in averaged sweeps");
    cmd_classify->add_option("--seed", classify_args.seed, "fold-in random seed");

    EvalArgs eval_args;
    auto* cmd_eval = app.add_subcommand("eval", "score predictions against gold labels");
    cmd_eval->add_option("predictions", eval_args.predictions_path, "classify output (JSON Lines)")
        ->required();
    cmd_eval->add_option("corpus", eval_args.corpus_path, "corpus file holding gold labels")
        ->required();
    cmd_eval->add_option("-o,--output", eval_args.output, "output file, - for stdout");

    MetricsArgs metrics_args;
    auto* cmd_metrics = app.add_subcommand("metrics", "annotation-sheet quality metrics");
    cmd_metrics
        ->add_option("sheet", metrics_args.sheet_path, "CSV: sentiment,topic,annotator,label")
        ->required();
    cmd_metrics->add_flag("--paper-kappa", metrics_args.paper_kappa,
                          "printed agreeability expression (diagnostic)");
    cmd_metrics->add_option("--log-base", metrics_args.log_base,
                            "diversity log base (default: natural)");
    cmd_metrics->add_option("-o,--output", metrics_args.output, "output file, - for stdout");

    SynthArgs synth_args;
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
    cmd_synth->add_option("output", synth_args.output, "corpus file to write")->required();
    cmd_synth->add_option("--truth", synth_args.truth_path, "ground-truth sidecar JSON");
    cmd_synth->add_option("--lexicon-out", synth_args.lexicon_path,
                          "write the planted seed lexicon for train --lexicon");
    cmd_synth->add_option("--docs", synth_args.cfg.docs, "document count");
    cmd_synth->add_option("--vocab", synth_args.cfg.vocab, "vocabulary size");
    cmd_synth->add_option("--clusters", synth_args.cfg.clusters, "true cluster count");
    cmd_synth->add_option("--topics", synth_args.cfg.topics, "true topic count");
    cmd_synth->add_option("--seeds-per-polarity", synth_args.cfg.seeds_per_polarity,
                          "planted seed words per polarity");
    cmd_synth->add_option("--pairs-min", synth_args.cfg.pairs_min, "min pairs per document");
    cmd_synth->add_option("--pairs-max", synth_args.cfg.pairs_max, "max pairs per document");
    cmd_synth->add_option("--seed-mass", synth_args.cfg.seed_mass, "word mass on own seeds");
    cmd_synth->add_option("--topic-mass", synth_args.cfg.topic_mass,
                          "word mass on the topic block");
    cmd_synth->add_option("--cluster-topic-mass", synth_args.cfg.cluster_topic_mass,
                          "theta mass on the cluster's dominant topic");
    cmd_synth->add_option("--sentiment-skew", synth_args.cfg.sentiment_skew,
                          "dominant sentiment share per cluster");
    cmd_synth->add_option("--seed", synth_args.cfg.rng_seed, "generator seed");

    ClustersArgs clusters_args;
    auto* cmd_clusters = app.add_subcommand("clusters", "dump the document clustering");
    cmd_clusters->add_option("model", clusters_args.model_path, "model file")->required();
    cmd_clusters->add_option("--top", clusters_args.top_docs, "top documents listed per cluster");
    cmd_clusters->add_flag("--cluster-posterior", clusters_args.cluster_posterior,
                           "include per-cluster sentiment/aspect distributions");
    cmd_clusters->add_option("-o,--output", clusters_args.output, "output file, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("config", e.what());
        return 3;
    }

    if (cmd_prep->parsed()) return run_guarded([&] { do_prep(prep); });
    if (cmd_train->parsed()) return run_guarded([&] { do_train(train_args); });
    if (cmd_topics->parsed()) return run_guarded([&] { do_topics(topics_args); });
    if (cmd_classify->parsed()) return run_guarded([&] { do_classify(classify_args); });
    if (cmd_eval->parsed()) return run_guarded([&] { do_eval(eval_args); });
    if (cmd_metrics->parsed()) return run_guarded([&] { do_metrics(metrics_args); });
    if (cmd_synth->parsed()) return run_guarded([&] { do_synth(synth_args); });
    if (cmd_clusters->parsed()) return run_guarded([&] { do_clusters(clusters_args); });
    return 0;
}
