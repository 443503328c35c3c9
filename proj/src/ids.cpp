#include "arinc429/ids.hpp"

#include <algorithm>
#include <cmath>

namespace arinc429::ids {

FeatureVector FeatureVector::from_edge(const EdgeFeatures& edge) {
    return {edge.rising_slope, edge.hi_peak, edge.rise_time_10_90};
}

FeatureVector extract_features(const VoltageTrace& trace) {
    return FeatureVector::from_edge(measure_edge(trace));
}

BaselineModel train(std::span<const VoltageTrace> traces, const TrainingOptions& options) {
    if (traces.size() < options.minimum_traces) {
        throw Error(ErrorCode::insufficient_training_data,
                    std::to_string(traces.size()) + " traces, need at least " +
                        std::to_string(options.minimum_traces));
    }
    std::vector<FeatureVector> features;
    features.reserve(traces.size());
    for (const auto& t : traces) {
        features.push_back(extract_features(t));
    }
    return train_features(features, options);
}

BaselineModel train_features(std::span<const FeatureVector> features,
                             const TrainingOptions& options) {
    const std::size_t n = features.size();
    if (n < options.minimum_traces || n < 2) {
        throw Error(ErrorCode::insufficient_training_data,
                    std::to_string(n) + " samples, need at least " +
                        std::to_string(std::max<std::size_t>(options.minimum_traces, 2)));
    }
    BaselineModel model;
    model.training_count = n;
    model.threshold_k = options.threshold_k;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        // Shifted by the first value: exact when every input is identical.
        const double origin = features[0].values()[f];
        double shift = 0.0;
        for (const auto& fv : features) {
            shift += fv.values()[f] - origin;
        }
        const double mean = origin + shift / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& fv : features) {
            const double d = fv.values()[f] - mean;
            ss += d * d;
        }
        const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
        const double floor = std::max(options.relative_floor * std::abs(mean), options.absolute_floor);
        model.stats[f] = {mean, std::max(sigma, floor)};
    }
    return model;
}

Verdict detect_features(const BaselineModel& model, const FeatureVector& features) {
    Verdict v;
    const auto values = features.values();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        v.z[f] = (values[f] - model.stats[f].mean) / model.stats[f].sigma;
        v.score = std::max(v.score, std::abs(v.z[f]));
    }
    v.anomalous = v.score > model.threshold_k;
    return v;
}

Verdict detect(const BaselineModel& model, const VoltageTrace& trace) {
    return detect_features(model, extract_features(trace));
}

Metrics evaluate(const BaselineModel& model, std::span<const LabeledTrace> labeled) {
    Metrics m;
    for (const auto& item : labeled) {
        (item.origin == Origin::rogue ? m.rogue_total : m.legitimate_total)++;
    }
    if (m.rogue_total == 0 || m.legitimate_total == 0) {
        throw Error(ErrorCode::empty_class, m.rogue_total == 0 ? "no rogue traces to rate"
                                                               : "no legitimate traces to rate");
    }
    m.verdicts.reserve(labeled.size());
    for (const auto& item : labeled) {
        Verdict v = detect(model, *item.trace);
        if (v.anomalous) {
            (item.origin == Origin::rogue ? m.rogue_flagged : m.legitimate_flagged)++;
        }
        m.verdicts.push_back(v);
    }
    m.true_positive_rate = static_cast<double>(m.rogue_flagged) / static_cast<double>(m.rogue_total);
    m.false_positive_rate =
        static_cast<double>(m.legitimate_flagged) / static_cast<double>(m.legitimate_total);
    return m;
}

} // namespace arinc429::ids
