#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arinc429/word.hpp"

namespace arinc429 {

inline constexpr double kDefaultSampleRate = 12.5e6;

// Table I differential thresholds, volts.
inline constexpr double kHiMin = 6.5;
inline constexpr double kHiMax = 13.0;
inline constexpr double kNullMax = 2.5;
inline constexpr double kTriggerLevel = 2.5;

inline constexpr double kSlowRateMin = 12'000.0;
inline constexpr double kSlowRateMax = 14'500.0;
inline constexpr double kFastRate = 100'000.0;

// Electrical personality of one bus driver.
struct TransmitterProfile {
    std::string name;
    double hi_level = 10.0;   // V
    double lo_level = -10.0;  // V
    double slew_rate = 5.05;  // V/us, used for rising and falling transitions
    double noise_sigma = 0.0; // V, additive Gaussian per sample
    double bit_rate = 12'500.0;
    double jitter_sigma = 0.0; // s, per bit cell

    double bit_period() const noexcept { return 1.0 / bit_rate; }

    // Throws invalid_profile when a field violates the electrical limits.
    void validate() const;

    // Nominal drivers with the two measured leading-edge slopes.
    static TransmitterProfile egpws();
    static TransmitterProfile altadt();
};

struct Sample {
    double time = 0.0;    // s, relative to trigger
    double voltage = 0.0; // V
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct VoltageTrace {
    double sample_rate = kDefaultSampleRate;
    std::vector<Sample> samples;
    int word_index = 1;
};

struct EdgeFeatures {
    double rising_slope = 0.0;    // V/us
    double hi_peak = 0.0;         // V
    double lo_peak = 0.0;         // V
    double rise_time_10_90 = 0.0; // s
};

// Noiseless line voltage as a function of absolute time for one word whose
// first bit cell starts at t = 0. The driver slews toward the bit level for
// the first half of each cell and back to NULL for the second half.
class LineModel {
public:
    struct Vertex {
        double time;
        double voltage;
    };

    LineModel(RawWord word, const TransmitterProfile& profile,
              std::span<const double> cell_offsets = {});

    double voltage_at(double t) const;
    // First upward crossing of `level`, or the word start when the line never crosses it.
    double first_rising_crossing(double level) const;
    double word_duration() const noexcept { return word_duration_; }
    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }

private:
    std::vector<Vertex> vertices_;
    double word_duration_ = 0.0;
};

// One bit cell of idle NULL is kept on each side of the word.
VoltageTrace synthesize_trace(RawWord word, const TransmitterProfile& profile,
                              double sample_rate = kDefaultSampleRate, std::uint64_t seed = 0,
                              int word_index = 1);

struct TraceDecode {
    RawWord word;
    bool parity_valid = false;
    // Margin of each active half-cell mean beyond the +/-6.5 V threshold, bit 1 first.
    std::array<double, kWordBits> confidence{};
};

TraceDecode decode_trace(const VoltageTrace& trace, double bit_rate);

EdgeFeatures measure_edge(const VoltageTrace& trace);

} // namespace arinc429
