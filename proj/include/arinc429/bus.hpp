#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arinc429/attack.hpp"
#include "arinc429/waveform.hpp"
#include "arinc429/word.hpp"

namespace arinc429 {

inline constexpr std::size_t kMaxReceivers = 20;

struct FlightSample {
    double time = 0.0;
    double longitude = 0.0; // degrees east
    double latitude = 0.0;  // degrees north
    double altitude_ft = 0.0;

    Position position() const noexcept { return {longitude, latitude}; }
};

// Linear interpolation over a time-ordered path, clamped at both ends.
FlightSample flight_state_at(const std::vector<FlightSample>& path, double t);

enum class PayloadSource { altitude, gpws_discrete, constant };

struct Emission {
    Label label;
    double period = 0.1; // s
    PayloadSource source = PayloadSource::constant;
    std::uint32_t data = 0; // 19-bit field for constant payloads
    unsigned sdi = 0;
    unsigned ssm = 0;
};

struct EgpwsConfig {
    // Default schedule: 0o270 at 10 Hz and 0o203 at 20 Hz.
    std::vector<Emission> schedule = default_schedule();
    double terrain_elevation_ft = 0.0;
    double warning_threshold_ft = 1000.0; // height above terrain
    int warning_bit = 11;                 // ARINC bit number inside the 0o270 data field

    static std::vector<Emission> default_schedule();
};

bool terrain_warning(const FlightSample& state, const EgpwsConfig& config);
RawWord egpws_word(const Emission& emission, const FlightSample& state, const EgpwsConfig& config);
// One word per schedule entry, in schedule order.
std::vector<RawWord> egpws_emit(const FlightSample& state, const EgpwsConfig& config);

enum class Display { nav_map, terrain_display, config_mode, booting };
std::string_view to_string(Display d) noexcept;

struct MfdConfig {
    double hold_time = 1.0; // s a warning stays active without fresh warning words
    double boot_time = 2.0; // s spent in BOOTING per restart
    bool taws_enabled = true;
    int warning_bit = 11;
};

struct MfdState {
    Display display = Display::nav_map;
    bool terrain_warning_active = false;
    int restart_count = 0;
    bool taws_enabled = true;
    int parity_errors = 0;
    double last_warning_time = 0.0;
    // Where the pending boot lands; meaningful while display == booting.
    Display boot_target = Display::nav_map;

    friend bool operator==(const MfdState&, const MfdState&) = default;
};

MfdState mfd_receive(MfdState state, RawWord word, double now, const MfdConfig& config = {});
// Power cycle: from CONFIG_MODE the unit boots to NAV_MAP, otherwise into CONFIG_MODE.
MfdState mfd_restart(MfdState state);
MfdState mfd_boot_complete(MfdState state);
// Only honoured in CONFIG_MODE.
MfdState mfd_set_taws(MfdState state, bool enabled);
// Restart into CONFIG_MODE, disable TAWS, restart again to NAV_MAP.
MfdState mfd_restart_recovery(MfdState state);

enum class ReceiverKind { mfd, monitor };

struct ReceiverSpec {
    std::string name;
    ReceiverKind kind = ReceiverKind::monitor;
};

struct RelayConfig {
    GeoFence trigger;
    std::string legitimate;
    std::string rogue;
    bool break_before_make = true;
};

// A driver wired straight onto the bus, bypassing the relay.
struct DirectTransmitter {
    std::string name;
    double connect_at = 0.0;
};

enum class MfdActionKind { restart, disable_taws, enable_taws };

struct MfdAction {
    double time = 0.0;
    std::string receiver; // empty = every MFD
    MfdActionKind kind = MfdActionKind::restart;
};

struct TraceCapture {
    std::set<Label> labels; // empty = every label
    std::size_t max_words = 100;
    double sample_rate = kDefaultSampleRate;
    double start_time = 0.0; // words logged before this are skipped
};

struct BusScenario {
    std::string name;
    std::uint64_t seed = 0;
    double duration = 0.0;
    std::map<std::string, TransmitterProfile> profiles;
    std::string legitimate; // used when there is no relay
    std::vector<ReceiverSpec> receivers;
    EgpwsConfig egpws;
    std::optional<RelayConfig> relay;
    std::optional<AttackPlan> attack;
    std::vector<DirectTransmitter> direct_transmitters;
    std::vector<FlightSample> flight_path;
    MfdConfig mfd;
    std::vector<MfdAction> mfd_actions;
    std::optional<TraceCapture> trace_capture;

    const std::string& legitimate_name() const;
    // Throws invalid_scenario; contention is a runtime outcome, not a validation error.
    void validate() const;
};

struct MfdTransition {
    double time = 0.0;
    MfdState state;
};

enum class EventKind { relay_trigger, transmitter_connected, mfd_action, mfd_transition };

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::mfd_transition;
    std::string detail;
};

struct ScenarioResult {
    BusLog log;
    std::map<std::string, std::vector<MfdTransition>> mfd_timelines;
    std::vector<SimEvent> events;
    std::optional<double> trigger_time;
    std::optional<FlightSample> trigger_sample;
};

// Raised when two drivers are connected at the same instant.
class ContentionError : public Error {
public:
    ContentionError(double time, std::vector<std::string> drivers);
    double time() const noexcept { return time_; }
    const std::vector<std::string>& drivers() const noexcept { return drivers_; }

private:
    double time_;
    std::vector<std::string> drivers_;
};

ScenarioResult run_scenario(const BusScenario& scenario);

struct CapturedTrace {
    std::size_t log_index = 0;
    std::string source;
    VoltageTrace trace;
};

// Synthesizes traces for logged words selected by the scenario's capture
// settings, each with a seed derived from the scenario seed and log index.
std::vector<CapturedTrace> capture_traces(const BusScenario& scenario, const BusLog& log);

// Fraction of [t0, t1) a timeline spends in `display`.
double display_occupancy(const std::vector<MfdTransition>& timeline, Display display, double t0,
                         double t1);

} // namespace arinc429
