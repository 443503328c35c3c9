// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "arinc429/bus.hpp"
#include "arinc429/data_io.hpp"
#include "arinc429/ids.hpp"
#include "arinc429/random.hpp"
#include "arinc429/report.hpp"
#include "arinc429/waveform.hpp"
#include "arinc429/word.hpp"
#include "../oracles.hpp"

using namespace arinc429;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void criterion(int n, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0.0 && secs >= limit_s) {
        o.require(false, "runtime " + io::format_double(secs) + " s over limit");
    }
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", n, title, secs,
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
}

TransmitterProfile profile(double slew, double sigma, double rate = 12'500.0) {
    TransmitterProfile p = TransmitterProfile::egpws();
    p.slew_rate = slew;
    p.noise_sigma = sigma;
    p.bit_rate = rate;
    return p;
}

Outcome golden_vector() {
    Outcome o;
    const DecodedMessage m = decode_word(RawWord(0xE189A8C1));
    const auto* bnr = std::get_if<Bnr>(&m.data);
    o.require(label_octal_string(m.label) == "203", "label");
    o.require(m.sdi == 0, "SDI");
    o.require(m.ssm == 3, "SSM");
    o.require(bnr && bnr->magnitude == 12597 && bnr->units == "ft MSL", "altitude");
    o.require(m.parity_valid, "parity");
    o.require(encode_word(kLabelAltitude, 0, Bnr{12597, 1, 0, "ft MSL"}, 3) == RawWord(0xE189A8C1),
              "encode");
    return o;
}

Outcome codec_properties() {
    Outcome o;
    std::mt19937_64 rng(0xA429);
    std::size_t mismatches = 0;
    std::size_t even = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) {
        const Label label = Label::from_octal(static_cast<unsigned>(rng() & 0xFF));
        const unsigned sdi = rng() & 3u;
        const unsigned ssm = rng() & 3u;
        const std::uint32_t data = rng() & kDataMask;
        const RawWord w = encode_word(label, sdi, Opaque{data}, ssm);
        if (oracle::popcount_loop(w.value()) % 2 == 0) {
            ++even;
        }
        const DecodedMessage d = decode_word(w);
        if (d.label != label || d.sdi != sdi || d.ssm != ssm || payload_bits(d.data) != data ||
            !d.parity_valid || encode_word(d) != w ||
            oracle::label_octal_by_string(w.value()) != label.octal_value()) {
            ++mismatches;
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");
    o.require(even == 0, std::to_string(even) + " even-parity encodings");
    o.detail = o.pass ? "100000 round trips, all odd parity" : o.detail;
    return o;
}

Outcome waveform_round_trip() {
    Outcome o;
    std::mt19937 rng(0x3);
    for (double rate : {12'500.0, kFastRate}) {
        for (double sigma : {0.0, 0.25}) {
            const TransmitterProfile p = profile(5.05, sigma, rate);
            int wrong = 0;
            for (int i = 0; i < 1000; ++i) {
                const RawWord w = with_odd_parity(RawWord(rng()));
                const VoltageTrace t = synthesize_trace(w, p, kDefaultSampleRate, rng());
                if (decode_trace(t, rate).word != w) {
                    ++wrong;
                }
            }
            o.require(wrong == 0, std::to_string(wrong) + " errors at " + io::format_double(rate) +
                                      " bps, sigma " + io::format_double(sigma));
        }
    }
    return o;
}

Outcome slope_recovery() {
    Outcome o;
    std::ostringstream d;
    for (double slew : {5.05, 0.937}) {
        const double noiseless =
            measure_edge(synthesize_trace(RawWord(0x0000041D), profile(slew, 0.0))).rising_slope;
        o.require(std::abs(noiseless - slew) <= 0.01 * slew,
                  "noiseless " + io::format_double(noiseless) + " vs " + io::format_double(slew));
        double worst = 0.0;
        for (std::uint64_t trial = 0; trial < 100; ++trial) {
            const VoltageTrace t = synthesize_trace(RawWord(0x0000041D), profile(slew, 0.1),
                                                    kDefaultSampleRate, derive_seed(4, trial));
            worst = std::max(worst, std::abs(measure_edge(t).rising_slope - slew) / slew);
        }
        o.require(worst <= 0.10, "noisy worst error " + io::format_double(worst));
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%.3f: noiseless %.4f, worst noisy err %.2f%%",
                      d.str().empty() ? "" : "; ", slew, noiseless, 100 * worst);
        d << buf;
    }
    if (o.pass) {
        o.detail = d.str();
    }
    return o;
}

std::vector<VoltageTrace> traces(const TransmitterProfile& p, int n, std::uint64_t seed) {
    std::vector<VoltageTrace> out;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const RawWord w = with_odd_parity(RawWord(rng.next_u32() | 1u));
        out.push_back(synthesize_trace(w, p, kDefaultSampleRate, derive_seed(seed, i)));
    }
    return out;
}

Outcome ids_separation() {
    Outcome o;
    const auto base = profile(5.05, 0.1);
    const auto rogue = profile(0.937, 0.1);
    const auto model = ids::train(traces(base, 100, 51));
    const auto legit = traces(base, 1000, 52);
    const auto bad = traces(rogue, 1000, 53);
    std::vector<ids::LabeledTrace> labeled;
    for (const auto& t : legit) {
        labeled.push_back({&t, ids::Origin::legitimate});
    }
    for (const auto& t : bad) {
        labeled.push_back({&t, ids::Origin::rogue});
    }
    const auto m = ids::evaluate(model, labeled);
    o.require(model.threshold_k == 4.0, "k");
    o.require(m.true_positive_rate == 1.0, "TPR " + io::format_double(m.true_positive_rate));
    o.require(m.false_positive_rate <= 0.01, "FPR " + io::format_double(m.false_positive_rate));
    if (o.pass) {
        o.detail = "TPR " + io::format_double(m.true_positive_rate) + ", FPR " +
                   io::format_double(m.false_positive_rate);
    }
    return o;
}

Outcome attack_reproduction() {
    Outcome o;
    const BusScenario s = io::load_scenario(ARINC429_ATTACK_SCENARIO);
    const ScenarioResult r = run_scenario(s);

    // (a) independent scan of the flight path
    std::optional<double> expected;
    for (const auto& p : s.flight_path) {
        if (p.longitude < -77.3 || p.latitude < 39.2) {
            expected = p.time;
            break;
        }
    }
    o.require(expected && r.trigger_time && *r.trigger_time == *expected, "(a) trigger time");
    for (const auto& e : r.log) {
        if (e.timestamp < *expected && e.source != s.relay->legitimate) {
            o.require(false, "(a) rogue word before trigger");
            break;
        }
    }

    const RunReport rep = build_report(s, r);
    // (b) cadence of 270 warning words within the attack window
    const auto times = warning_word_times(r.log, s.mfd.warning_bit, *expected);
    double worst = 0.0;
    std::size_t in_window = 0;
    for (std::size_t i = 1; i < times.size() && times[i] < rep.attack_window_end; ++i) {
        worst = std::max(worst, std::abs(times[i] - times[i - 1] - 0.1));
        ++in_window;
    }
    o.require(in_window > 10, "(b) too few warning words");
    o.require(worst <= 0.001, "(b) cadence error " + io::format_double(worst));

    // (c)
    const auto& tl = r.mfd_timelines.at(rep.mfd);
    const double occ = display_occupancy(tl, Display::terrain_display, *expected, rep.attack_window_end);
    o.require(occ == 1.0, "(c) occupancy " + io::format_double(occ));

    // (d) after the last scripted action plus boot time: NAV_MAP, TAWS off, warnings still arriving
    double recovered = 0.0;
    for (const auto& a : s.mfd_actions) {
        recovered = std::max(recovered, a.time + s.mfd.boot_time);
    }
    const MfdState end = tl.back().state;
    o.require(end.display == Display::nav_map && !end.taws_enabled && end.restart_count == 2,
              "(d) final state");
    o.require(display_occupancy(tl, Display::nav_map, recovered, s.duration) == 1.0,
              "(d) map not held after recovery");
    o.require(!warning_word_times(r.log, s.mfd.warning_bit, recovered).empty(),
              "(d) no warnings after recovery to ignore");

    if (o.pass) {
        o.detail = "trigger t=" + io::format_double(*r.trigger_time) + " s, " +
                   std::to_string(in_window + 1) + " warnings, max cadence error " +
                   io::format_double(worst) + " s, occupancy 1";
    }
    return o;
}

Outcome contention_safety() {
    Outcome o;
    const BusScenario base = io::load_scenario(ARINC429_ATTACK_SCENARIO);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int trials = 60;
    int halted = 0;
    for (int i = 0; i < trials; ++i) {
        BusScenario s = base;
        s.seed = rng();
        s.trace_capture.reset();
        s.duration = 20.0 + 120.0 * unit(rng);
        const double when = unit(rng) * s.duration * 0.99;
        switch (rng() % 3) {
        case 0:
            s.direct_transmitters.push_back({"ALTADT", when});
            s.relay.reset();
            s.attack.reset();
            s.legitimate = "EGPWS";
            s.mfd_actions.clear();
            break;
        case 1:
            s.relay->break_before_make = false;
            for (auto& p : s.flight_path) {
                p.longitude = p.time < when ? -76.9 : -77.4;
            }
            break;
        default:
            s.profiles["EXTRA"] = s.profiles.at("ALTADT");
            s.direct_transmitters.push_back({"EXTRA", when});
            break;
        }
        try {
            run_scenario(s);
        } catch (const ContentionError& e) {
            halted += e.code() == ErrorCode::bus_contention ? 1 : 0;
        }
    }
    o.require(halted == trials, std::to_string(trials - halted) + " scenarios did not halt");
    if (o.pass) {
        o.detail = std::to_string(trials) + " randomized scenarios halted with bus-contention";
    }
    return o;
}

Outcome format_fidelity() {
    Outcome o;
    const std::filesystem::path dir = ARINC429_FIXTURE_DIR;
    const auto egpws = io::read_trace_csv(dir / "egpws_like.csv");
    const auto altadt = io::read_trace_csv(dir / "altadt_like.csv");
    o.require(egpws.size() == 10, std::to_string(egpws.size()) + " EGPWS traces");
    o.require(altadt.size() == 3, std::to_string(altadt.size()) + " AltaDT traces");
    for (const auto* set : {&egpws, &altadt}) {
        std::ostringstream a;
        io::write_trace_csv(a, *set);
        std::istringstream in(a.str());
        const auto back = io::read_trace_csv(in);
        std::ostringstream b;
        io::write_trace_csv(b, back);
        o.require(a.str() == b.str(), "write-read-write not byte identical");
    }
    return o;
}

} // namespace

int main() {
    criterion(1, "golden vector E189A8C1 decodes and re-encodes bit-exactly", 1.0, golden_vector);
    criterion(2, "codec round-trip and parity closure", 10.0, codec_properties);
    criterion(3, "waveform round-trip at both bit rates, noiseless and sigma 0.25 V", 30.0,
              waveform_round_trip);
    criterion(4, "slope fingerprint recovery within 1% / 10%", 0.0, slope_recovery);
    criterion(5, "IDS separation TPR 1.0, FPR <= 0.01 at k = 4", 60.0, ids_separation);
    criterion(6, "geo-fenced playback attack and double-restart recovery", 0.0, attack_reproduction);
    criterion(7, "contention safety over randomized scenarios", 0.0, contention_safety);
    criterion(8, "stacked trace CSV fidelity", 0.0, format_fidelity);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
