#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "microasm/corpus.hpp"
#include "microasm/errors.hpp"

namespace microasm {

struct AccuracyResult {
    double value = 0.0;
    std::int64_t evaluated = 0;
    std::int64_t correct = 0;
    std::int64_t unclassifiable = 0;
    std::int64_t missing_gold = 0;
};

// index-aligned predictions vs gold labels; unclassifiable predictions and
// documents without gold are excluded and counted separately
inline AccuracyResult accuracy(const std::vector<std::optional<Polarity>>& predictions,
                               const std::vector<std::optional<Polarity>>& gold) {
    if (predictions.size() != gold.size())
        throw input_error("prediction and gold label lists are not aligned");
    AccuracyResult r;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (!gold[i]) {
            r.missing_gold += 1;
            continue;
        }
        if (!predictions[i]) {
            r.unclassifiable += 1;
            continue;
        }
        r.evaluated += 1;
        if (*predictions[i] == *gold[i]) r.correct += 1;
    }
    if (r.evaluated == 0) throw input_error("no evaluable documents");
    r.value = static_cast<double>(r.correct) / static_cast<double>(r.evaluated);
    return r;
}

// Shannon index over label counts; natural log by default
inline double shannon_diversity(const std::vector<std::string>& labels, double log_base = 0.0) {
    if (labels.empty()) throw input_error("empty label list");
    std::map<std::string, std::int64_t> counts;
    for (const auto& l : labels) counts[l] += 1;
    const double n = static_cast<double>(labels.size());
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    if (log_base > 0.0) h /= std::log(log_base);
    return h;
}

inline const std::set<std::string>& nonspecific_labels() {
    static const std::set<std::string> labels = {"general", "other", "none"};
    return labels;
}

inline double specificity(const std::vector<std::string>& labels) {
    if (labels.empty()) throw input_error("empty label list");
    std::int64_t reserved = 0;
    for (const auto& l : labels)
        if (nonspecific_labels().count(l) != 0) reserved += 1;
    return static_cast<double>(labels.size() - reserved) / static_cast<double>(labels.size());
}

// ---- annotation sheets --------------------------------------------------

struct AnnotationRow {
    std::int32_t sentiment = 0;
    std::int32_t topic = 0;
    std::string annotator;
    std::string label;
};

struct AnnotationSheet {
    std::vector<AnnotationRow> rows;

    std::vector<std::string> pooled_labels() const {
        std::vector<std::string> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.label);
        return out;
    }

    std::vector<std::string> annotators() const {
        std::set<std::string> ids;
        for (const auto& r : rows) ids.insert(r.annotator);
        return {ids.begin(), ids.end()};
    }
};

// CSV with header: sentiment,topic,annotator,label
inline AnnotationSheet load_annotation_csv(std::istream& in) {
    AnnotationSheet sheet;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::tuple<std::int32_t, std::int32_t, std::string>> seen;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4)
            throw input_error("annotation sheet line " + std::to_string(lineno) +
                              ": expected 4 comma-separated fields");
        if (!header_done) {
            if (cells[0] != "sentiment" || cells[1] != "topic" || cells[2] != "annotator" ||
                cells[3] != "label")
                throw input_error("annotation sheet header must be sentiment,topic,annotator,label");
            header_done = true;
            continue;
        }
        AnnotationRow row;
        try {
            row.sentiment = std::stoi(cells[0]);
            row.topic = std::stoi(cells[1]);
        } catch (const std::exception&) {
            throw input_error("annotation sheet line " + std::to_string(lineno) +
                              ": sentiment/topic must be integers");
        }
        row.annotator = cells[2];
        row.label = cells[3];
        if (!seen.insert({row.sentiment, row.topic, row.annotator}).second)
            throw input_error("annotation sheet line " + std::to_string(lineno) +
                              ": duplicate (distribution, annotator) entry");
        sheet.rows.push_back(std::move(row));
    }
    if (!header_done) throw input_error("annotation sheet is empty");
    return sheet;
}

struct KappaResult {
    double value = 0.0;
    double observed_agreement = 0.0;
    double chance_agreement = 0.0;
    bool degenerate = false; // both annotators constant and identical
};

namespace detail {

struct PairedLabels {
    std::vector<std::pair<std::string, std::string>> items;
};

inline PairedLabels pair_annotators(const AnnotationSheet& sheet) {
    const auto annotators = sheet.annotators();
    if (annotators.size() != 2)
        throw input_error("inter-annotator agreement requires exactly two annotators, got " +
                          std::to_string(annotators.size()));
    std::map<std::pair<std::int32_t, std::int32_t>, std::pair<std::optional<std::string>, std::optional<std::string>>>
        by_item;
    for (const auto& r : sheet.rows) {
        auto& slot = by_item[{r.sentiment, r.topic}];
        if (r.annotator == annotators[0])
            slot.first = r.label;
        else
            slot.second = r.label;
    }
    PairedLabels out;
    for (const auto& [key, labels] : by_item) {
        if (!labels.first || !labels.second)
            throw input_error("annotators are not aligned: distribution (" +
                              std::to_string(key.first) + ", " + std::to_string(key.second) +
                              ") is missing one annotation");
        out.items.emplace_back(*labels.first, *labels.second);
    }
    return out;
}

inline void agreement_terms(const PairedLabels& paired, double& p_obs, double& p_exp) {
    const double n = static_cast<double>(paired.items.size());
    std::map<std::string, std::int64_t> m1, m2;
    std::int64_t agree = 0;
    for (const auto& [a, b] : paired.items) {
        m1[a] += 1;
        m2[b] += 1;
        if (a == b) agree += 1;
    }
    p_obs = static_cast<double>(agree) / n;
    p_exp = 0.0;
    for (const auto& [label, c1] : m1) {
        auto it = m2.find(label);
        if (it != m2.end())
            p_exp += (static_cast<double>(c1) / n) * (static_cast<double>(it->second) / n);
    }
}

} // namespace detail

// multi-category Cohen's kappa over two aligned annotators
inline KappaResult cohen_kappa(const AnnotationSheet& sheet) {
    const auto paired = detail::pair_annotators(sheet);
    if (paired.items.empty()) throw input_error("no annotated items");
    KappaResult r;
    detail::agreement_terms(paired, r.observed_agreement, r.chance_agreement);
    if (r.chance_agreement == 1.0) {
        r.degenerate = true;
        r.value = 1.0;
        return r;
    }
    r.value = (r.observed_agreement - r.chance_agreement) / (1.0 - r.chance_agreement);
    return r;
}

// literal printed agreeability expression, kept for comparison; it rescales
// kappa by (1 - observed) / (N * (1 - chance)) and is not bounded in [-1, 1]
inline KappaResult paper_agreeability(const AnnotationSheet& sheet) {
    const auto paired = detail::pair_annotators(sheet);
    if (paired.items.empty()) throw input_error("no annotated items");
    KappaResult r;
    detail::agreement_terms(paired, r.observed_agreement, r.chance_agreement);
    if (r.chance_agreement == 1.0) {
        r.degenerate = true;
        r.value = 1.0;
        return r;
    }
    const double n = static_cast<double>(paired.items.size());
    r.value = (r.observed_agreement - r.chance_agreement) / (1.0 - r.chance_agreement) *
              (1.0 - r.observed_agreement) / (n * (1.0 - r.chance_agreement));
    return r;
}

// normalized mutual information, sqrt normalization
inline double nmi(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    if (a.size() != b.size()) throw input_error("partition label lists are not aligned");
    if (a.empty()) throw input_error("empty partitions");
    const double n = static_cast<double>(a.size());
    std::map<std::int32_t, std::int64_t> ca, cb;
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1;
        cb[b[i]] += 1;
        joint[{a[i], b[i]}] += 1;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (const auto& [k, c] : ca) {
        const double p = static_cast<double>(c) / n;
        ha -= p * std::log(p);
    }
    for (const auto& [k, c] : cb) {
        const double p = static_cast<double>(c) / n;
        hb -= p * std::log(p);
    }
    for (const auto& [k, c] : joint) {
        const double pxy = static_cast<double>(c) / n;
        const double px = static_cast<double>(ca[k.first]) / n;
        const double py = static_cast<double>(cb[k.second]) / n;
        mi += pxy * std::log(pxy / (px * py));
    }
    if (ha == 0.0 || hb == 0.0) return (ha == 0.0 && hb == 0.0) ? 1.0 : 0.0;
    return mi / std::sqrt(ha * hb);
}

} // namespace microasm
