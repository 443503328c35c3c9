#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arinc429/bus.hpp"
#include "arinc429/ids.hpp"

namespace arinc429 {

struct WordVerdict {
    std::size_t log_index = 0;
    double time = 0.0;
    std::string source;
    double score = 0.0;
    bool anomalous = false;
};

struct IdsSummary {
    std::vector<WordVerdict> verdicts;
    std::size_t anomalies = 0;
    std::size_t legitimate_words = 0;
    std::size_t rogue_words = 0;
    std::optional<double> true_positive_rate;  // needs rogue words
    std::optional<double> false_positive_rate; // needs legitimate words
    std::optional<double> first_rogue_time;
    bool first_rogue_flagged = false;
    std::optional<double> first_anomaly_time;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    double duration = 0.0;
    std::string log_digest; // FNV-1a 64 of the ground-truth log text

    std::optional<double> trigger_time;
    std::optional<double> trigger_longitude;
    std::optional<double> trigger_latitude;

    std::string mfd; // first MFD receiver, empty when none
    std::vector<MfdTransition> mfd_transitions;
    double attack_window_start = 0.0;
    double attack_window_end = 0.0;
    std::optional<double> terrain_occupancy;

    std::size_t warning_words_after_trigger = 0;
    std::optional<double> cadence_mean;
    std::optional<double> cadence_min;
    std::optional<double> cadence_max;

    std::size_t total_words = 0;
    std::size_t parity_invalid_words = 0;
    std::map<std::string, std::size_t> words_by_source;

    std::optional<IdsSummary> ids;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string log_digest(const BusLog& log);

// Terrain-warning words (label 270, warning bit set, odd parity) at or after `from`.
std::vector<double> warning_word_times(const BusLog& log, int warning_bit, double from);

IdsSummary summarize_ids(const ids::BaselineModel& model, const BusScenario& scenario,
                         const BusLog& log, const std::vector<CapturedTrace>& traces);

RunReport build_report(const BusScenario& scenario, const ScenarioResult& result,
                       std::optional<IdsSummary> ids = std::nullopt);

std::string report_json(const RunReport& report);
std::string report_text(const RunReport& report);

} // namespace arinc429
