#include "arinc429/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "arinc429/data_io.hpp"
#include "json.hpp"

namespace arinc429 {

using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string log_digest(const BusLog& log) {
    std::ostringstream os;
    io::write_ground_truth(os, log);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
    return buf;
}

std::vector<double> warning_word_times(const BusLog& log, int warning_bit, double from) {
    std::vector<double> out;
    for (const auto& e : log) {
        if (e.timestamp >= from && e.parity_valid &&
            Label::from_raw_byte(e.word.label_byte()) == kLabelGpwsDiscrete &&
            e.word.bit(warning_bit)) {
            out.push_back(e.timestamp);
        }
    }
    return out;
}

IdsSummary summarize_ids(const ids::BaselineModel& model, const BusScenario& scenario,
                         const BusLog& log, const std::vector<CapturedTrace>& traces) {
    IdsSummary s;
    std::size_t rogue_flagged = 0;
    std::size_t legit_flagged = 0;
    const std::string& legit = scenario.legitimate_name();
    for (const auto& ct : traces) {
        // The verdict sees only the trace; the source is attached afterwards for scoring.
        const ids::Verdict v = ids::detect(model, ct.trace);
        const double t = log.at(ct.log_index).timestamp;
        s.verdicts.push_back({ct.log_index, t, ct.source, v.score, v.anomalous});
        const bool rogue = ct.source != legit;
        (rogue ? s.rogue_words : s.legitimate_words)++;
        if (v.anomalous) {
            ++s.anomalies;
            (rogue ? rogue_flagged : legit_flagged)++;
            if (!s.first_anomaly_time) {
                s.first_anomaly_time = t;
            }
        }
        if (rogue && !s.first_rogue_time) {
            s.first_rogue_time = t;
            s.first_rogue_flagged = v.anomalous;
        }
    }
    if (s.rogue_words > 0) {
        s.true_positive_rate = static_cast<double>(rogue_flagged) / static_cast<double>(s.rogue_words);
    }
    if (s.legitimate_words > 0) {
        s.false_positive_rate =
            static_cast<double>(legit_flagged) / static_cast<double>(s.legitimate_words);
    }
    return s;
}

RunReport build_report(const BusScenario& scenario, const ScenarioResult& result,
                       std::optional<IdsSummary> ids) {
    RunReport r;
    r.scenario = scenario.name;
    r.seed = scenario.seed;
    r.duration = scenario.duration;
    r.log_digest = log_digest(result.log);
    r.trigger_time = result.trigger_time;
    if (result.trigger_sample) {
        r.trigger_longitude = result.trigger_sample->longitude;
        r.trigger_latitude = result.trigger_sample->latitude;
    }

    for (const auto& rs : scenario.receivers) {
        if (rs.kind == ReceiverKind::mfd) {
            r.mfd = rs.name;
            break;
        }
    }
    if (!r.mfd.empty()) {
        r.mfd_transitions = result.mfd_timelines.at(r.mfd);
    }

    if (r.trigger_time) {
        r.attack_window_start = *r.trigger_time;
        r.attack_window_end = scenario.duration;
        for (const auto& a : scenario.mfd_actions) {
            if (a.time >= *r.trigger_time && (a.receiver.empty() || a.receiver == r.mfd)) {
                r.attack_window_end = std::min(r.attack_window_end, a.time);
            }
        }
        if (!r.mfd.empty()) {
            r.terrain_occupancy = display_occupancy(r.mfd_transitions, Display::terrain_display,
                                                    r.attack_window_start, r.attack_window_end);
        }
        std::vector<double> times =
            warning_word_times(result.log, scenario.mfd.warning_bit, *r.trigger_time);
        std::erase_if(times, [&](double t) { return t >= r.attack_window_end; });
        r.warning_words_after_trigger = times.size();
        if (times.size() >= 2) {
            double sum = 0.0;
            double lo = times[1] - times[0];
            double hi = lo;
            for (std::size_t i = 1; i < times.size(); ++i) {
                const double d = times[i] - times[i - 1];
                sum += d;
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            r.cadence_mean = sum / static_cast<double>(times.size() - 1);
            r.cadence_min = lo;
            r.cadence_max = hi;
        }
    }

    r.total_words = result.log.size();
    for (const auto& e : result.log) {
        ++r.words_by_source[e.source];
        if (!e.parity_valid) {
            ++r.parity_invalid_words;
        }
    }
    r.ids = std::move(ids);
    return r;
}

namespace {

// Numbers go through the same shortest-round-trip text in both report forms.
std::string num(double v) { return io::format_double(v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }

ordered_json jnum(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

} // namespace

std::string report_json(const RunReport& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["duration"] = r.duration;
    j["log_digest"] = r.log_digest;
    j["relay"] = {{"trigger_time", jnum(r.trigger_time)},
                  {"trigger_longitude", jnum(r.trigger_longitude)},
                  {"trigger_latitude", jnum(r.trigger_latitude)}};
    ordered_json transitions = ordered_json::array();
    for (const auto& t : r.mfd_transitions) {
        transitions.push_back({{"time", t.time},
                               {"display", std::string(to_string(t.state.display))},
                               {"terrain_warning_active", t.state.terrain_warning_active},
                               {"taws_enabled", t.state.taws_enabled},
                               {"restart_count", t.state.restart_count}});
    }
    j["mfd"] = {{"receiver", r.mfd}, {"transitions", transitions}};
    j["attack_effect"] = {{"window_start", r.attack_window_start},
                          {"window_end", r.attack_window_end},
                          {"terrain_display_fraction", jnum(r.terrain_occupancy)},
                          {"warning_words", r.warning_words_after_trigger},
                          {"cadence_mean", jnum(r.cadence_mean)},
                          {"cadence_min", jnum(r.cadence_min)},
                          {"cadence_max", jnum(r.cadence_max)}};
    ordered_json by_source = ordered_json::object();
    for (const auto& [src, n] : r.words_by_source) {
        by_source[src] = n;
    }
    j["traffic"] = {{"total_words", r.total_words},
                    {"parity_invalid_words", r.parity_invalid_words},
                    {"words_by_source", by_source}};
    if (r.ids) {
        const IdsSummary& s = *r.ids;
        ordered_json verdicts = ordered_json::array();
        for (const auto& v : s.verdicts) {
            verdicts.push_back({{"log_index", v.log_index},
                                {"time", v.time},
                                {"source", v.source},
                                {"score", v.score},
                                {"anomalous", v.anomalous}});
        }
        j["ids"] = {{"traces", s.verdicts.size()},
                    {"anomalies", s.anomalies},
                    {"legitimate_words", s.legitimate_words},
                    {"rogue_words", s.rogue_words},
                    {"true_positive_rate", jnum(s.true_positive_rate)},
                    {"false_positive_rate", jnum(s.false_positive_rate)},
                    {"first_rogue_time", jnum(s.first_rogue_time)},
                    {"first_rogue_flagged", s.first_rogue_flagged},
                    {"first_anomaly_time", jnum(s.first_anomaly_time)},
                    {"verdicts", verdicts}};
    }
    return j.dump(2) + "\n";
}

std::string report_text(const RunReport& r) {
    std::ostringstream os;
    os << "scenario: " << r.scenario << "\n"
       << "seed: " << r.seed << "\n"
       << "duration: " << num(r.duration) << " s\n"
       << "log digest: " << r.log_digest << "\n\n";
    if (r.trigger_time) {
        os << "relay trigger: t=" << num(r.trigger_time) << " s at lon " << num(r.trigger_longitude)
           << ", lat " << num(r.trigger_latitude) << "\n";
    } else {
        os << "relay trigger: none\n";
    }
    if (!r.mfd.empty()) {
        os << "\ndisplay transitions (" << r.mfd << "):\n";
        for (const auto& t : r.mfd_transitions) {
            os << "  t=" << num(t.time) << "  " << to_string(t.state.display)
               << (t.state.terrain_warning_active ? "  warning" : "")
               << (t.state.taws_enabled ? "" : "  taws-off") << "  restarts=" << t.state.restart_count
               << "\n";
        }
    }
    if (r.trigger_time) {
        os << "\nattack window: " << num(r.attack_window_start) << " .. " << num(r.attack_window_end)
           << " s\n"
           << "  terrain display fraction: " << num(r.terrain_occupancy) << "\n"
           << "  warning words: " << r.warning_words_after_trigger << "\n"
           << "  cadence mean/min/max: " << num(r.cadence_mean) << " / " << num(r.cadence_min) << " / "
           << num(r.cadence_max) << " s\n";
    }
    os << "\ntraffic: " << r.total_words << " words, " << r.parity_invalid_words
       << " parity-invalid\n";
    for (const auto& [src, n] : r.words_by_source) {
        os << "  " << src << ": " << n << "\n";
    }
    if (r.ids) {
        const IdsSummary& s = *r.ids;
        os << "\nIDS: " << s.verdicts.size() << " traces, " << s.anomalies << " anomalous\n"
           << "  legitimate words: " << s.legitimate_words << ", rogue words: " << s.rogue_words << "\n"
           << "  true positive rate: " << num(s.true_positive_rate) << "\n"
           << "  false positive rate: " << num(s.false_positive_rate) << "\n"
           << "  first rogue word: " << num(s.first_rogue_time)
           << (s.first_rogue_time ? (s.first_rogue_flagged ? " (flagged)" : " (missed)") : "") << "\n"
           << "  first anomaly: " << num(s.first_anomaly_time) << "\n";
        os << "  timeline:\n";
        for (const auto& v : s.verdicts) {
            os << "    t=" << num(v.time) << "  " << v.source << "  score=" << num(v.score)
               << (v.anomalous ? "  ANOMALOUS" : "") << "\n";
        }
    }
    return os.str();
}

} // namespace arinc429
