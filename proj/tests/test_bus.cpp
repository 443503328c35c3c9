#include "doctest.h"

#include <random>

#include "arinc429/bus.hpp"
#include "arinc429/report.hpp"
#include "oracles.hpp"

using namespace arinc429;

namespace {

constexpr RawWord kWarning(0x0000041D);
constexpr RawWord kClear(0x8000001D);

BusScenario base_scenario() {
    BusScenario s;
    s.name = "unit";
    s.seed = 1;
    s.duration = 5.0;
    s.profiles = {{"EGPWS", TransmitterProfile::egpws()}, {"ROGUE", TransmitterProfile::altadt()}};
    s.legitimate = "EGPWS";
    s.receivers = {{"MFD", ReceiverKind::mfd}, {"RECORDER", ReceiverKind::monitor}};
    s.flight_path = {{0.0, -76.65, 39.243, 20'000.0}, {1.0, -76.70, 39.243, 20'000.0},
                     {2.0, -76.75, 39.243, 20'000.0}, {5.0, -76.80, 39.243, 20'000.0}};
    return s;
}

BusScenario relay_scenario() {
    BusScenario s = base_scenario();
    s.duration = 6.0;
    s.flight_path = {{0.0, -77.0, 39.243, 3000.0}, {1.0, -77.1, 39.243, 3000.0},
                     {2.0, -77.2, 39.243, 3000.0}, {3.0, -77.31, 39.243, 3000.0},
                     {4.0, -77.4, 39.243, 3000.0}, {6.0, -77.5, 39.243, 3000.0}};
    s.relay = RelayConfig{{77.3, 39.2}, "EGPWS", "ROGUE", true};
    s.attack = PlaybackPlan{{kWarning}, 0.1};
    return s;
}

Display last_display(const ScenarioResult& r, const std::string& mfd) {
    return r.mfd_timelines.at(mfd).back().state.display;
}

} // namespace

TEST_CASE("warning word constants come from the codec") {
    CHECK(encode_word(kLabelGpwsDiscrete, 0, Discrete{1}, 0) == kWarning);
    CHECK(encode_word(kLabelGpwsDiscrete, 0, Discrete{0}, 0) == kClear);
    CHECK(oracle::label_octal_by_string(kWarning.value()) == 0270);
}

TEST_CASE("egpws_emit") {
    const EgpwsConfig cfg;
    SUBCASE("20,000 ft over flat terrain leaves the warning bit clear") {
        const auto words = egpws_emit({0.0, -76.65, 39.243, 20'000.0}, cfg);
        REQUIRE(words.size() == 2);
        CHECK(Label::from_raw_byte(words[0].label_byte()) == kLabelGpwsDiscrete);
        CHECK_FALSE(words[0].bit(11));
        CHECK(parity_valid(words[0]));
    }
    SUBCASE("12,597 ft encodes the worked example") {
        const auto words = egpws_emit({0.0, -76.65, 39.243, 12'597.0}, cfg);
        CHECK(words[1] == RawWord(0xE189A8C1));
    }
    SUBCASE("crossing the threshold sets the bit") {
        CHECK_FALSE(egpws_emit({0.0, 0.0, 0.0, 1000.0}, cfg)[0].bit(11));
        CHECK(egpws_emit({0.0, 0.0, 0.0, 999.0}, cfg)[0].bit(11));
        EgpwsConfig hill = cfg;
        hill.terrain_elevation_ft = 2500.0;
        CHECK(egpws_emit({0.0, 0.0, 0.0, 3000.0}, hill)[0] == kWarning);
    }
}

TEST_CASE("MFD state machine examples") {
    const MfdConfig cfg;
    MfdState s;
    CHECK(s.display == Display::nav_map);

    s = mfd_receive(s, kWarning, 0.0, cfg);
    CHECK(s.display == Display::terrain_display);
    CHECK(s.terrain_warning_active);

    const MfdState before = s;
    MfdState after = mfd_receive(s, RawWord(kWarning.value() ^ 0x80000000u), 0.05, cfg);
    CHECK(after.parity_errors == before.parity_errors + 1);
    after.parity_errors = before.parity_errors;
    CHECK(after == before);

    SUBCASE("warnings every 100 ms with a 1 s hold keep TERRAIN_DISPLAY") {
        MfdState m;
        for (int k = 0; k < 300; ++k) {
            m = mfd_receive(m, kWarning, 0.1 * k, cfg);
            m = mfd_receive(m, kClear, 0.1 * k + 0.05, cfg);
            CHECK(m.display == Display::terrain_display);
            CHECK(m.terrain_warning_active);
        }
    }
    SUBCASE("hold time clears the warning flag but never restores the map") {
        MfdState m = mfd_receive({}, kWarning, 0.0, cfg);
        m = mfd_receive(m, kClear, 0.5, cfg);
        CHECK(m.terrain_warning_active);
        m = mfd_receive(m, kClear, 1.0, cfg);
        CHECK_FALSE(m.terrain_warning_active);
        CHECK(m.display == Display::terrain_display);
    }
    SUBCASE("double restart with TAWS disabled") {
        MfdState m = mfd_restart(s);
        CHECK(m.display == Display::booting);
        CHECK(m.restart_count == 1);
        m = mfd_boot_complete(m);
        CHECK(m.display == Display::config_mode);
        m = mfd_set_taws(m, false);
        m = mfd_restart(m);
        CHECK(m.restart_count == 2);
        m = mfd_boot_complete(m);
        CHECK(m.display == Display::nav_map);
        CHECK_FALSE(m.taws_enabled);
        for (int k = 0; k < 50; ++k) {
            m = mfd_receive(m, kWarning, 10.0 + 0.1 * k, cfg);
            CHECK(m.display == Display::nav_map);
        }
        CHECK(mfd_restart_recovery(s).display == Display::nav_map);
        CHECK_FALSE(mfd_restart_recovery(s).taws_enabled);
        CHECK(mfd_restart_recovery(s).restart_count == s.restart_count + 2);
    }
    SUBCASE("restarting with TAWS left on re-triggers") {
        MfdState m = mfd_boot_complete(mfd_restart(s));
        m = mfd_boot_complete(mfd_restart(m));
        CHECK(m.display == Display::nav_map);
        CHECK(m.taws_enabled);
        m = mfd_receive(m, kWarning, 20.0, cfg);
        CHECK(m.display == Display::terrain_display);
    }
    SUBCASE("TAWS can only be changed in CONFIG_MODE; words are ignored while booting") {
        CHECK(mfd_set_taws(s, false).taws_enabled);
        MfdState m = mfd_restart(MfdState{});
        CHECK(mfd_receive(m, kWarning, 1.0, cfg).display == Display::booting);
    }
}

TEST_CASE("flight path interpolation") {
    const std::vector<FlightSample> path = {{0.0, -76.0, 39.0, 1000.0}, {10.0, -77.0, 38.0, 2000.0}};
    const FlightSample mid = flight_state_at(path, 5.0);
    CHECK(mid.longitude == doctest::Approx(-76.5));
    CHECK(mid.latitude == doctest::Approx(38.5));
    CHECK(mid.altitude_ft == doctest::Approx(1500.0));
    CHECK(flight_state_at(path, -1.0).longitude == -76.0);
    CHECK(flight_state_at(path, 99.0).longitude == -77.0);
}

TEST_CASE("no trigger: every word comes from the EGPWS and the map stays up") {
    BusScenario s = base_scenario();
    s.relay = RelayConfig{{77.3, 39.2}, "EGPWS", "ROGUE", true};
    s.attack = PlaybackPlan{{kWarning}, 0.1};
    const ScenarioResult r = run_scenario(s);
    CHECK_FALSE(r.trigger_time);
    REQUIRE_FALSE(r.log.empty());
    // 270 at 10 Hz and 203 at 20 Hz over 5 s.
    CHECK(r.log.size() == 150);
    for (const auto& e : r.log) {
        CHECK(e.source == "EGPWS");
        CHECK(e.parity_valid);
    }
    CHECK(r.mfd_timelines.at("MFD").size() == 1);
    CHECK(last_display(r, "MFD") == Display::nav_map);
}

TEST_CASE("log ordering and message-rate fidelity") {
    for (double rate : {12'500.0, kFastRate}) {
        BusScenario s = base_scenario();
        s.profiles["EGPWS"].bit_rate = rate;
        for (auto& e : s.egpws.schedule) {
            e.period = 0.001;
        }
        s.duration = 0.5;
        if (rate < kFastRate) {
            // 2 words per ms exceeds a slow bus; thin the schedule.
            for (auto& e : s.egpws.schedule) {
                e.period = 0.01;
            }
        }
        const ScenarioResult r = run_scenario(s);
        for (std::size_t i = 1; i < r.log.size(); ++i) {
            CHECK(r.log[i].timestamp - r.log[i - 1].timestamp >= 32.0 / rate - 1e-12);
        }
        if (rate == kFastRate) {
            for (std::size_t i = 1; i < r.log.size(); ++i) {
                CHECK(r.log[i].timestamp - r.log[i - 1].timestamp >= 320e-6 - 1e-12);
            }
        }
    }
}

TEST_CASE("relay fires at the first sample past the fence") {
    const BusScenario s = relay_scenario();
    const ScenarioResult r = run_scenario(s);
    REQUIRE(r.trigger_time);
    CHECK(*r.trigger_time == 3.0);
    CHECK(r.trigger_sample->longitude == -77.31);
    for (const auto& e : r.log) {
        CHECK(e.source == (e.timestamp < 3.0 ? "EGPWS" : "ROGUE"));
    }
    const auto times = warning_word_times(r.log, 11, 3.0);
    REQUIRE(times.size() == 30);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(times[i] == doctest::Approx(3.0 + 0.1 * static_cast<double>(i)).epsilon(1e-12));
    }
    CHECK(last_display(r, "MFD") == Display::terrain_display);
    CHECK(display_occupancy(r.mfd_timelines.at("MFD"), Display::terrain_display, 3.0, 6.0) == 1.0);
}

TEST_CASE("latitude bound also fires") {
    BusScenario s = relay_scenario();
    for (auto& p : s.flight_path) {
        p.longitude = -77.0;
    }
    s.flight_path[4].latitude = 39.19;
    CHECK(*run_scenario(s).trigger_time == 4.0);
}

TEST_CASE("recovery actions inside a scenario") {
    BusScenario s = relay_scenario();
    s.duration = 12.0;
    s.flight_path.push_back({12.0, -77.6, 39.243, 3000.0});
    s.mfd_actions = {{5.0, "MFD", MfdActionKind::restart},
                     {7.5, "MFD", MfdActionKind::disable_taws},
                     {8.0, "MFD", MfdActionKind::restart}};
    const ScenarioResult r = run_scenario(s);
    const auto& tl = r.mfd_timelines.at("MFD");
    std::vector<Display> seq;
    for (const auto& t : tl) {
        if (seq.empty() || seq.back() != t.state.display) {
            seq.push_back(t.state.display);
        }
    }
    CHECK(seq == std::vector<Display>{Display::nav_map, Display::terrain_display, Display::booting,
                                      Display::config_mode, Display::booting, Display::nav_map});
    CHECK(tl.back().time == 10.0);
    CHECK_FALSE(tl.back().state.taws_enabled);
    CHECK(tl.back().state.restart_count == 2);
    CHECK(display_occupancy(tl, Display::nav_map, 10.0, 12.0) == 1.0);
}

TEST_CASE("identical scenarios give identical logs") {
    BusScenario s = relay_scenario();
    s.attack = FuzzPlan{7, 100.0, 0.5};
    const auto a = run_scenario(s);
    const auto b = run_scenario(s);
    CHECK(a.log == b.log);
    CHECK(log_digest(a.log) == log_digest(b.log));
    s.attack = FuzzPlan{8, 100.0, 0.5};
    CHECK(log_digest(run_scenario(s).log) != log_digest(a.log));
}

TEST_CASE("contention: randomized scenarios with two active drivers always halt") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int halted = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
        BusScenario s = (rng() & 1) ? relay_scenario() : base_scenario();
        s.seed = rng();
        const int mode = static_cast<int>(rng() % 3);
        if (mode == 0 || !s.relay) {
            s.profiles["ROGUE2"] = TransmitterProfile::altadt();
            s.direct_transmitters.push_back({"ROGUE2", unit(rng) * s.duration * 0.99});
        } else if (mode == 1) {
            s.relay->break_before_make = false;
        } else {
            s.relay->break_before_make = false;
            s.profiles["ROGUE2"] = TransmitterProfile::egpws();
            s.direct_transmitters.push_back({"ROGUE2", unit(rng) * s.duration * 0.99});
        }
        try {
            run_scenario(s);
        } catch (const ContentionError& e) {
            CHECK(e.code() == ErrorCode::bus_contention);
            CHECK(e.drivers().size() >= 2);
            CHECK(std::string(e.what()).find("bus-contention") != std::string::npos);
            ++halted;
        }
    }
    CHECK(halted == trials);
}

TEST_CASE("a direct driver connecting after the end never contends") {
    BusScenario s = base_scenario();
    s.direct_transmitters.push_back({"ROGUE", s.duration + 1.0});
    CHECK_NOTHROW(run_scenario(s));
}

TEST_CASE("scenario validation") {
    BusScenario s = base_scenario();
    for (int i = 0; i < 20; ++i) {
        s.receivers.push_back({"R" + std::to_string(i), ReceiverKind::monitor});
    }
    CHECK_THROWS_WITH(run_scenario(s), doctest::Contains("exceeds the limit of 20"));

    s = base_scenario();
    s.attack = PlaybackPlan{{kWarning}, 0.1};
    CHECK_THROWS_WITH(s.validate(), doctest::Contains("invalid-scenario"));

    s = base_scenario();
    s.legitimate = "NOBODY";
    CHECK_THROWS_AS(s.validate(), Error);

    s = base_scenario();
    s.flight_path.clear();
    CHECK_THROWS_AS(s.validate(), Error);

    s = relay_scenario();
    s.attack = PlaybackPlan{{kWarning}, 0.0};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("captured traces decode back to the logged words") {
    BusScenario s = relay_scenario();
    s.trace_capture = TraceCapture{{kLabelGpwsDiscrete}, 40, kDefaultSampleRate};
    const auto r = run_scenario(s);
    const auto traces = capture_traces(s, r.log);
    REQUIRE(traces.size() == 40);
    for (const auto& ct : traces) {
        const auto& entry = r.log.at(ct.log_index);
        CHECK(Label::from_raw_byte(entry.word.label_byte()) == kLabelGpwsDiscrete);
        CHECK(ct.source == entry.source);
        CHECK(decode_trace(ct.trace, s.profiles.at(ct.source).bit_rate).word == entry.word);
    }
    const auto again = capture_traces(s, r.log);
    CHECK(again.front().trace.samples == traces.front().trace.samples);
}

TEST_CASE("display occupancy") {
    MfdState nav;
    MfdState terr;
    terr.display = Display::terrain_display;
    const std::vector<MfdTransition> tl = {{0.0, nav}, {2.0, terr}, {6.0, nav}};
    CHECK(display_occupancy(tl, Display::terrain_display, 0.0, 8.0) == doctest::Approx(0.5));
    CHECK(display_occupancy(tl, Display::terrain_display, 2.0, 6.0) == 1.0);
    CHECK(display_occupancy(tl, Display::nav_map, 1.0, 3.0) == doctest::Approx(0.5));
}
