#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "arinc429/random.hpp"
#include "arinc429/word.hpp"

namespace arinc429 {

struct BusLogEntry {
    double timestamp = 0.0;
    RawWord word;
    std::string source; // ground truth, evaluation only
    bool parity_valid = false;

    friend bool operator==(const BusLogEntry&, const BusLogEntry&) = default;
};

using BusLog = std::vector<BusLogEntry>;

struct Position {
    double longitude = 0.0; // degrees, east positive
    double latitude = 0.0;  // degrees, north positive
};

// Bounds use compass notation: west_of = 77.3 means longitude < -77.3,
// south_of = 39.2 means latitude < 39.2.
struct GeoFence {
    std::optional<double> west_of;
    std::optional<double> south_of;

    // Throws invalid_plan when neither bound is present.
    void validate() const;
};

bool geofence_triggered(const GeoFence& fence, Position position);

// Latched evaluation: once a position has tripped the fence it stays tripped.
class GeoFenceTrigger {
public:
    explicit GeoFenceTrigger(GeoFence fence);

    bool update(Position position);
    bool fired() const noexcept { return fired_; }

private:
    GeoFence fence_;
    bool fired_ = false;
};

struct CaptureFilter {
    std::set<Label> labels; // empty = every label
    std::function<bool(const DecodedMessage&)> predicate;

    bool matches(RawWord word) const;
};

// Payload predicate selecting words whose given ARINC bit (11..29) is set.
std::function<bool(const DecodedMessage&)> bit_set_predicate(int arinc_bit);

std::vector<RawWord> record_capture(const BusLog& log, const CaptureFilter& filter);

struct PlaybackPlan {
    std::vector<RawWord> recording;
    double cadence = 0.1; // s between playback bursts
};

struct SpoofPlan {
    DecodedMessage message; // re-encoded, so always structurally valid
    double cadence = 0.1;
};

struct FuzzPlan {
    std::uint64_t seed = 0;
    double rate = 10.0; // words per second
    double parity_valid_fraction = 0.5;
};

using AttackPlan = std::variant<PlaybackPlan, SpoofPlan, FuzzPlan>;

// Maximum word rate a bus can carry: 32 data bits plus the 4-bit inter-word gap.
inline constexpr int kWordSlotBits = 36;
inline double bus_capacity(double bit_rate) { return bit_rate / kWordSlotBits; }

PlaybackPlan build_playback(std::vector<RawWord> recording, double cadence);

// Throws invalid_plan or empty_recording when the plan cannot run at this bit rate.
void validate_plan(const AttackPlan& plan, double bit_rate);

// Seeded generator drawing 32 random bits and then setting bit 32 so the
// word has odd parity with probability parity_valid_fraction.
class FuzzGenerator {
public:
    FuzzGenerator(std::uint64_t seed, double parity_valid_fraction);
    RawWord next();

private:
    Rng rng_;
    double fraction_;
};

std::vector<RawWord> fuzz_stream(std::uint64_t seed, std::size_t count,
                                 double parity_valid_fraction);

// Stateful executor used by the bus engine; one instance per activation.
class AttackRunner {
public:
    explicit AttackRunner(AttackPlan plan);

    // Time between bursts; burst k goes out k * interval() after activation.
    double interval() const noexcept { return interval_; }
    std::vector<RawWord> next_burst();

private:
    AttackPlan plan_;
    double interval_ = 0.0;
    std::optional<FuzzGenerator> fuzz_;
    RawWord spoof_word_;
};

} // namespace arinc429
