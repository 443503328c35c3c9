#include "arinc429/bus.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace arinc429 {

FlightSample flight_state_at(const std::vector<FlightSample>& path, double t) {
    if (path.empty()) {
        throw Error(ErrorCode::invalid_scenario, "empty flight path");
    }
    if (t <= path.front().time) {
        return path.front();
    }
    if (t >= path.back().time) {
        return path.back();
    }
    auto it = std::upper_bound(path.begin(), path.end(), t,
                               [](double x, const FlightSample& s) { return x < s.time; });
    const FlightSample& b = *it;
    const FlightSample& a = *(it - 1);
    const double w = (t - a.time) / (b.time - a.time);
    return {t, a.longitude + w * (b.longitude - a.longitude),
            a.latitude + w * (b.latitude - a.latitude),
            a.altitude_ft + w * (b.altitude_ft - a.altitude_ft)};
}

std::vector<Emission> EgpwsConfig::default_schedule() {
    return {
        {kLabelGpwsDiscrete, 0.1, PayloadSource::gpws_discrete, 0, 0, 0},
        {kLabelAltitude, 0.05, PayloadSource::altitude, 0, 0, 3},
    };
}

bool terrain_warning(const FlightSample& state, const EgpwsConfig& config) {
    return state.altitude_ft - config.terrain_elevation_ft < config.warning_threshold_ft;
}

RawWord egpws_word(const Emission& emission, const FlightSample& state, const EgpwsConfig& config) {
    std::uint32_t bits = emission.data & kDataMask;
    switch (emission.source) {
    case PayloadSource::altitude: {
        constexpr double max_ft = (1u << (kDataBits - 1)) - 1;
        const auto feet = static_cast<std::uint32_t>(std::lround(std::clamp(state.altitude_ft, 0.0, max_ft)));
        return encode_word(emission.label, emission.sdi, Bnr{feet, 1, 0, "ft MSL"}, emission.ssm);
    }
    case PayloadSource::gpws_discrete: {
        const std::uint32_t mask = 1u << (config.warning_bit - 11);
        bits = terrain_warning(state, config) ? (bits | mask) : (bits & ~mask);
        break;
    }
    case PayloadSource::constant:
        break;
    }
    return encode_word(emission.label, emission.sdi, Opaque{bits}, emission.ssm);
}

std::vector<RawWord> egpws_emit(const FlightSample& state, const EgpwsConfig& config) {
    std::vector<RawWord> out;
    out.reserve(config.schedule.size());
    for (const auto& e : config.schedule) {
        out.push_back(egpws_word(e, state, config));
    }
    return out;
}

std::string_view to_string(Display d) noexcept {
    switch (d) {
    case Display::nav_map: return "NAV_MAP";
    case Display::terrain_display: return "TERRAIN_DISPLAY";
    case Display::config_mode: return "CONFIG_MODE";
    case Display::booting: return "BOOTING";
    }
    return "UNKNOWN";
}

MfdState mfd_receive(MfdState state, RawWord word, double now, const MfdConfig& config) {
    if (!parity_valid(word)) {
        ++state.parity_errors;
        return state;
    }
    if (state.display == Display::booting || state.display == Display::config_mode) {
        return state;
    }
    if (Label::from_raw_byte(word.label_byte()) != kLabelGpwsDiscrete) {
        return state;
    }
    const bool warning = word.bit(config.warning_bit);
    if (warning) {
        if (state.taws_enabled) {
            state.display = Display::terrain_display;
            state.terrain_warning_active = true;
            state.last_warning_time = now;
        }
    } else if (state.terrain_warning_active && now - state.last_warning_time >= config.hold_time) {
        state.terrain_warning_active = false;
    }
    return state;
}

MfdState mfd_restart(MfdState state) {
    ++state.restart_count;
    if (state.display != Display::booting) {
        state.boot_target =
            state.display == Display::config_mode ? Display::nav_map : Display::config_mode;
    }
    state.display = Display::booting;
    state.terrain_warning_active = false;
    return state;
}

MfdState mfd_boot_complete(MfdState state) {
    if (state.display == Display::booting) {
        state.display = state.boot_target;
    }
    return state;
}

MfdState mfd_set_taws(MfdState state, bool enabled) {
    if (state.display == Display::config_mode) {
        state.taws_enabled = enabled;
    }
    return state;
}

MfdState mfd_restart_recovery(MfdState state) {
    state = mfd_boot_complete(mfd_restart(state));
    state = mfd_set_taws(state, false);
    return mfd_boot_complete(mfd_restart(state));
}

const std::string& BusScenario::legitimate_name() const {
    return relay ? relay->legitimate : legitimate;
}

void BusScenario::validate() const {
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::invalid_scenario, "scenario \"" + name + "\": " + why);
    };
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        fail("duration must be positive");
    }
    for (const auto& [key, profile] : profiles) {
        try {
            profile.validate();
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    auto require_profile = [&](const std::string& who, const char* role) {
        if (!profiles.contains(who)) {
            fail(std::string(role) + " \"" + who + "\" has no profile");
        }
    };
    require_profile(legitimate_name(), "legitimate transmitter");
    if (relay) {
        require_profile(relay->rogue, "rogue transmitter");
        if (relay->rogue == relay->legitimate) {
            fail("relay must switch between two different transmitters");
        }
        try {
            relay->trigger.validate();
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    if (attack) {
        if (!relay) {
            fail("an attack plan needs a relay to connect the rogue transmitter");
        }
        try {
            validate_plan(*attack, profiles.at(relay->rogue).bit_rate);
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    for (const auto& d : direct_transmitters) {
        require_profile(d.name, "direct transmitter");
        if (!(d.connect_at >= 0.0)) {
            fail("direct transmitter connect_at must be >= 0");
        }
    }
    if (receivers.size() > kMaxReceivers) {
        fail(std::to_string(receivers.size()) + " receivers exceeds the limit of 20");
    }
    std::set<std::string> names;
    for (const auto& r : receivers) {
        if (!names.insert(r.name).second) {
            fail("duplicate receiver \"" + r.name + "\"");
        }
    }
    if (flight_path.empty()) {
        fail("flight path is empty");
    }
    for (std::size_t i = 1; i < flight_path.size(); ++i) {
        if (!(flight_path[i].time > flight_path[i - 1].time)) {
            fail("flight path times must be strictly increasing");
        }
    }
    if (egpws.warning_bit < 11 || egpws.warning_bit > 29 || mfd.warning_bit < 11 ||
        mfd.warning_bit > 29) {
        fail("warning bit must be an ARINC data bit (11..29)");
    }
    const double legit_rate = profiles.at(legitimate_name()).bit_rate;
    double load = 0.0;
    for (const auto& e : egpws.schedule) {
        if (!(e.period > 0.0) || e.sdi > 3 || e.ssm > 3 || e.data > kDataMask) {
            fail("emission for label " + label_octal_string(e.label) + " is malformed");
        }
        load += kWordSlotBits / legit_rate / e.period;
    }
    if (load > 1.0) {
        fail("emission schedule exceeds bus capacity");
    }
    if (!(mfd.hold_time >= 0.0) || !(mfd.boot_time >= 0.0)) {
        fail("MFD hold_time and boot_time must be >= 0");
    }
    for (const auto& a : mfd_actions) {
        if (!a.receiver.empty()) {
            auto it = std::find_if(receivers.begin(), receivers.end(),
                                   [&](const ReceiverSpec& r) { return r.name == a.receiver; });
            if (it == receivers.end() || it->kind != ReceiverKind::mfd) {
                fail("MFD action targets unknown MFD \"" + a.receiver + "\"");
            }
        }
    }
    if (trace_capture) {
        for (const auto& [key, profile] : profiles) {
            if (trace_capture->sample_rate < 20.0 * profile.bit_rate) {
                fail("trace capture sample rate below 20x the bit rate of " + key);
            }
        }
    }
}

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += out.empty() ? n : ", " + n;
    }
    return out;
}

std::string describe(double t) {
    std::ostringstream os;
    os << "t=" << t << " s";
    return os.str();
}

enum class EvType {
    connect,
    flight_sample,
    boot_complete,
    mfd_action,
    legit_tick,
    rogue_tick,
    delivery,
};

struct Event {
    double time;
    EvType type;
    std::uint64_t seq;
    std::size_t index; // type-specific
    std::uint64_t tick = 0;
    RawWord word{};
    std::string source;
};

Event make_event(double time, EvType type, std::size_t index = 0, std::uint64_t tick = 0) {
    Event ev{};
    ev.time = time;
    ev.type = type;
    ev.index = index;
    ev.tick = tick;
    return ev;
}

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.type != b.type) return a.type > b.type;
        return a.seq > b.seq;
    }
};

bool same_visible_state(const MfdState& a, const MfdState& b) {
    return a.display == b.display && a.terrain_warning_active == b.terrain_warning_active &&
           a.taws_enabled == b.taws_enabled && a.restart_count == b.restart_count;
}

class Engine {
public:
    explicit Engine(const BusScenario& s) : s_(s) {
        for (const auto& r : s_.receivers) {
            if (r.kind == ReceiverKind::mfd) {
                MfdState init;
                init.taws_enabled = s_.mfd.taws_enabled;
                mfds_[r.name] = init;
                result_.mfd_timelines[r.name].push_back({0.0, init});
            }
        }
    }

    ScenarioResult run() {
        connected_.push_back(s_.legitimate_name());

        for (std::size_t i = 0; i < s_.direct_transmitters.size(); ++i) {
            push(make_event(s_.direct_transmitters[i].connect_at, EvType::connect, i));
        }
        for (std::size_t i = 0; i < s_.flight_path.size(); ++i) {
            push(make_event(s_.flight_path[i].time, EvType::flight_sample, i));
        }
        for (std::size_t i = 0; i < s_.mfd_actions.size(); ++i) {
            push(make_event(s_.mfd_actions[i].time, EvType::mfd_action, i));
        }
        for (std::size_t i = 0; i < s_.egpws.schedule.size(); ++i) {
            push(make_event(0.0, EvType::legit_tick, i, 0));
        }

        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.time >= s_.duration) {
                continue;
            }
            dispatch(ev);
        }
        return std::move(result_);
    }

private:
    void push(Event ev) {
        ev.seq = seq_++;
        queue_.push(std::move(ev));
    }

    bool is_connected(const std::string& name) const {
        return std::find(connected_.begin(), connected_.end(), name) != connected_.end();
    }

    void connect(const std::string& name, double t) {
        connected_.push_back(name);
        result_.events.push_back({t, EventKind::transmitter_connected, name});
        if (connected_.size() > 1) {
            throw ContentionError(t, connected_);
        }
    }

    void disconnect(const std::string& name) {
        connected_.erase(std::remove(connected_.begin(), connected_.end(), name), connected_.end());
    }

    void transmit(const std::string& source, RawWord word, double t) {
        const double slot = kWordSlotBits / s_.profiles.at(source).bit_rate;
        double& busy = busy_until_[source];
        const double start = std::max(t, busy);
        busy = start + slot;
        Event ev = make_event(start, EvType::delivery);
        ev.word = word;
        ev.source = source;
        push(std::move(ev));
    }

    void dispatch(const Event& ev) {
        switch (ev.type) {
        case EvType::connect:
            connect(s_.direct_transmitters[ev.index].name, ev.time);
            break;
        case EvType::flight_sample:
            on_flight_sample(ev);
            break;
        case EvType::boot_complete:
            update_mfd(ev.source, ev.time, mfd_boot_complete(mfds_.at(ev.source)));
            break;
        case EvType::mfd_action:
            on_mfd_action(ev);
            break;
        case EvType::legit_tick: {
            const Emission& e = s_.egpws.schedule[ev.index];
            const std::string& legit = s_.legitimate_name();
            if (is_connected(legit)) {
                transmit(legit, egpws_word(e, flight_state_at(s_.flight_path, ev.time), s_.egpws),
                         ev.time);
            }
            push(make_event(static_cast<double>(ev.tick + 1) * e.period, EvType::legit_tick, ev.index,
                            ev.tick + 1));
            break;
        }
        case EvType::rogue_tick: {
            for (RawWord w : runner_->next_burst()) {
                transmit(s_.relay->rogue, w, ev.time);
            }
            push(make_event(*result_.trigger_time +
                                static_cast<double>(ev.tick + 1) * runner_->interval(),
                            EvType::rogue_tick, 0, ev.tick + 1));
            break;
        }
        case EvType::delivery:
            on_delivery(ev);
            break;
        }
    }

    void on_flight_sample(const Event& ev) {
        if (!s_.relay || result_.trigger_time) {
            return;
        }
        if (!trigger_) {
            trigger_.emplace(s_.relay->trigger);
        }
        const FlightSample& sample = s_.flight_path[ev.index];
        if (!trigger_->update(sample.position())) {
            return;
        }
        result_.trigger_time = ev.time;
        result_.trigger_sample = sample;
        std::ostringstream os;
        os << "relay switched " << s_.relay->legitimate << " -> " << s_.relay->rogue << " at lon "
           << sample.longitude << ", lat " << sample.latitude;
        result_.events.push_back({ev.time, EventKind::relay_trigger, os.str()});
        if (s_.relay->break_before_make) {
            disconnect(s_.relay->legitimate);
            connect(s_.relay->rogue, ev.time);
        } else {
            connect(s_.relay->rogue, ev.time);
            disconnect(s_.relay->legitimate);
        }
        if (s_.attack) {
            runner_.emplace(*s_.attack);
            push(make_event(ev.time, EvType::rogue_tick));
        }
    }

    void on_mfd_action(const Event& ev) {
        const MfdAction& a = s_.mfd_actions[ev.index];
        static constexpr const char* names[] = {"restart", "disable_taws", "enable_taws"};
        for (auto& [name, state] : mfds_) {
            if (!a.receiver.empty() && a.receiver != name) {
                continue;
            }
            result_.events.push_back(
                {ev.time, EventKind::mfd_action, name + ": " + names[static_cast<int>(a.kind)]});
            switch (a.kind) {
            case MfdActionKind::restart: {
                update_mfd(name, ev.time, mfd_restart(state));
                Event boot = make_event(ev.time + s_.mfd.boot_time, EvType::boot_complete);
                boot.source = name;
                push(std::move(boot));
                break;
            }
            case MfdActionKind::disable_taws:
                update_mfd(name, ev.time, mfd_set_taws(state, false));
                break;
            case MfdActionKind::enable_taws:
                update_mfd(name, ev.time, mfd_set_taws(state, true));
                break;
            }
        }
    }

    void on_delivery(const Event& ev) {
        if (!is_connected(ev.source)) {
            return;
        }
        result_.log.push_back({ev.time, ev.word, ev.source, parity_valid(ev.word)});
        for (auto& [name, state] : mfds_) {
            update_mfd(name, ev.time, mfd_receive(state, ev.word, ev.time, s_.mfd));
        }
    }

    void update_mfd(const std::string& name, double t, const MfdState& next) {
        MfdState& cur = mfds_.at(name);
        const bool visible = !same_visible_state(cur, next);
        cur = next;
        if (visible) {
            result_.mfd_timelines[name].push_back({t, next});
            std::string detail = name + ": " + std::string(to_string(next.display));
            if (next.terrain_warning_active) {
                detail += " (warning)";
            }
            result_.events.push_back({t, EventKind::mfd_transition, std::move(detail)});
        }
    }

    const BusScenario& s_;
    ScenarioResult result_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::vector<std::string> connected_;
    std::map<std::string, double> busy_until_;
    std::map<std::string, MfdState> mfds_;
    std::optional<GeoFenceTrigger> trigger_;
    std::optional<AttackRunner> runner_;
};

} // namespace

ContentionError::ContentionError(double time, std::vector<std::string> drivers)
    : Error(ErrorCode::bus_contention,
            "transmitters " + join(drivers) + " simultaneously connected at " + describe(time)),
      time_(time), drivers_(std::move(drivers)) {}

ScenarioResult run_scenario(const BusScenario& scenario) {
    scenario.validate();
    return Engine(scenario).run();
}

std::vector<CapturedTrace> capture_traces(const BusScenario& scenario, const BusLog& log) {
    std::vector<CapturedTrace> out;
    if (!scenario.trace_capture) {
        return out;
    }
    const TraceCapture& cap = *scenario.trace_capture;
    for (std::size_t i = 0; i < log.size() && out.size() < cap.max_words; ++i) {
        const BusLogEntry& entry = log[i];
        if (entry.timestamp < cap.start_time) {
            continue;
        }
        if (!cap.labels.empty() &&
            !cap.labels.contains(Label::from_raw_byte(entry.word.label_byte()))) {
            continue;
        }
        const int word_index = static_cast<int>(out.size()) + 1;
        out.push_back({i, entry.source,
                       synthesize_trace(entry.word, scenario.profiles.at(entry.source),
                                        cap.sample_rate, derive_seed(scenario.seed, i), word_index)});
    }
    return out;
}

double display_occupancy(const std::vector<MfdTransition>& timeline, Display display, double t0,
                         double t1) {
    if (!(t1 > t0) || timeline.empty()) {
        return 0.0;
    }
    double inside = 0.0;
    for (std::size_t i = 0; i < timeline.size(); ++i) {
        const double a = std::max(t0, timeline[i].time);
        const double b = std::min(t1, i + 1 < timeline.size() ? timeline[i + 1].time : t1);
        if (b > a && timeline[i].state.display == display) {
            inside += b - a;
        }
    }
    return inside / (t1 - t0);
}

} // namespace arinc429
