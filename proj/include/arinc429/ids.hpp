#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "arinc429/waveform.hpp"

namespace arinc429::ids {

inline constexpr std::size_t kFeatureCount = 3;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "rising_slope", "hi_peak", "rise_time_10_90"};

struct FeatureVector {
    double rising_slope = 0.0;    // V/us
    double hi_peak = 0.0;         // V
    double rise_time_10_90 = 0.0; // s

    static FeatureVector from_edge(const EdgeFeatures& edge);
    std::array<double, kFeatureCount> values() const noexcept {
        return {rising_slope, hi_peak, rise_time_10_90};
    }
};

FeatureVector extract_features(const VoltageTrace& trace);

struct FeatureStats {
    double mean = 0.0;
    double sigma = 0.0;
};

struct BaselineModel {
    std::array<FeatureStats, kFeatureCount> stats{};
    std::size_t training_count = 0;
    double threshold_k = 4.0;
};

struct TrainingOptions {
    std::size_t minimum_traces = 30;
    double threshold_k = 4.0;
    // Sigmas are floored at max(relative_floor * |mean|, absolute_floor).
    double relative_floor = 1e-6;
    double absolute_floor = 1e-12;
};

BaselineModel train(std::span<const VoltageTrace> traces, const TrainingOptions& options = {});
BaselineModel train_features(std::span<const FeatureVector> features,
                             const TrainingOptions& options = {});

struct Verdict {
    bool anomalous = false;
    double score = 0.0; // max |z|
    std::array<double, kFeatureCount> z{};
};

Verdict detect(const BaselineModel& model, const VoltageTrace& trace);
Verdict detect_features(const BaselineModel& model, const FeatureVector& features);

enum class Origin { legitimate, rogue };

struct LabeledTrace {
    const VoltageTrace* trace = nullptr;
    Origin origin = Origin::legitimate;
};

struct Metrics {
    double true_positive_rate = 0.0;
    double false_positive_rate = 0.0;
    std::size_t rogue_total = 0;
    std::size_t rogue_flagged = 0;
    std::size_t legitimate_total = 0;
    std::size_t legitimate_flagged = 0;
    std::vector<Verdict> verdicts; // input order
};

// Throws empty_class unless both origins are present.
Metrics evaluate(const BaselineModel& model, std::span<const LabeledTrace> labeled);

} // namespace arinc429::ids
