#include "arinc429/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace arinc429::io {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}

std::string_view strip_bom(std::string_view s) {
    if (s.starts_with("\xEF\xBB\xBF")) {
        s.remove_prefix(3);
    }
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    long long v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot read " + path.string());
    }
    return in;
}

std::string row_context(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Trace CSV

void write_trace_csv(std::ostream& out, std::span<const VoltageTrace> traces) {
    out << kTraceHeader << '\n';
    std::size_t index = 0;
    for (std::size_t w = 0; w < traces.size(); ++w) {
        const std::string word = std::to_string(w + 1);
        for (const auto& s : traces[w].samples) {
            out << index++ << ',' << format_double(s.time) << ',' << format_double(s.voltage) << ','
                << word << '\n';
        }
    }
}

void write_trace_csv(const std::filesystem::path& path, std::span<const VoltageTrace> traces) {
    auto out = open_out(path);
    write_trace_csv(out, traces);
}

std::vector<VoltageTrace> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::malformed_header, "missing header row");
    }
    const auto header = split(strip_bom(trim(line)), ',');
    const bool ok = header.size() == 4 &&
                    (trim(header[0]) == "Index" || trim(header[0]) == "[Index]") &&
                    trim(header[1]) == "Time (s)" && trim(header[2]) == "Voltage (V)" &&
                    trim(header[3]) == "Word";
    if (!ok) {
        throw Error(ErrorCode::malformed_header,
                    "expected \"" + std::string(kTraceHeader) + "\", got \"" + line + "\"");
    }

    std::vector<VoltageTrace> traces;
    long long expected_index = 0;
    long long current_word = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (in.peek() == std::char_traits<char>::eof()) {
                break;
            }
            throw Error(ErrorCode::malformed_row, row_context(line_no) + "blank line");
        }
        const auto cols = split(line, ',');
        if (cols.size() != 4) {
            throw Error(ErrorCode::malformed_row, row_context(line_no) + "expected 4 columns");
        }
        const auto index = parse_int(cols[0]);
        const auto time = parse_double(cols[1]);
        const auto volts = parse_double(cols[2]);
        const auto word = parse_int(cols[3]);
        if (!index || !time || !volts || !word) {
            throw Error(ErrorCode::malformed_row, row_context(line_no) + "unparseable value");
        }
        if (*index != expected_index) {
            throw Error(ErrorCode::non_contiguous_index, row_context(line_no) + "index " +
                                                             std::to_string(*index) + ", expected " +
                                                             std::to_string(expected_index));
        }
        ++expected_index;
        if (*word < 1 || *word < current_word) {
            throw Error(ErrorCode::malformed_row,
                        row_context(line_no) + "Word must start at 1 and never decrease");
        }
        if (*word != current_word) {
            current_word = *word;
            traces.emplace_back();
            traces.back().word_index = static_cast<int>(*word);
        }
        auto& samples = traces.back().samples;
        if (!samples.empty() && !(*time > samples.back().time)) {
            throw Error(ErrorCode::non_monotonic_time,
                        row_context(line_no) + "time does not increase within word " +
                            std::to_string(current_word));
        }
        samples.push_back({*time, *volts});
    }

    for (auto& t : traces) {
        std::vector<double> steps;
        steps.reserve(t.samples.size());
        for (std::size_t i = 1; i < t.samples.size(); ++i) {
            steps.push_back(t.samples[i].time - t.samples[i - 1].time);
        }
        if (steps.empty()) {
            t.sample_rate = 0.0;
            continue;
        }
        auto mid = steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2);
        std::nth_element(steps.begin(), mid, steps.end());
        t.sample_rate = 1.0 / *mid;
    }
    return traces;
}

std::vector<VoltageTrace> read_trace_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_trace_csv(in);
}

// ---------------------------------------------------------------------------
// Message logs

void write_message_log(std::ostream& out, std::span<const TimedWord> words) {
    out << kMessageLogHeader << '\n';
    for (const auto& w : words) {
        out << format_double(w.timestamp) << ',' << to_hex(w.word) << '\n';
    }
}

void write_message_log(const std::filesystem::path& path, std::span<const TimedWord> words) {
    auto out = open_out(path);
    write_message_log(out, words);
}

namespace {

template <typename Row>
void read_rows(std::istream& in, std::string_view header, std::size_t columns, Row&& on_row) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1) {
            view = strip_bom(view);
            if (view == header) {
                continue;
            }
        }
        if (view.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) {
                break;
            }
            throw Error(ErrorCode::malformed_row, row_context(line_no) + "blank line");
        }
        const auto cols = split(view, ',');
        if (cols.size() != columns) {
            throw Error(ErrorCode::malformed_row,
                        row_context(line_no) + "expected " + std::to_string(columns) + " columns");
        }
        const auto word = parse_hex(trim(cols[1]));
        if (!word) {
            throw Error(ErrorCode::malformed_hex,
                        row_context(line_no) + "\"" + std::string(cols[1]) + "\" is not 8 hex digits");
        }
        const auto time = parse_double(cols[0]);
        if (!time) {
            throw Error(ErrorCode::malformed_row, row_context(line_no) + "bad timestamp");
        }
        on_row(line_no, *time, *word, cols);
    }
}

} // namespace

std::vector<TimedWord> read_message_log(std::istream& in) {
    std::vector<TimedWord> out;
    read_rows(in, kMessageLogHeader, 2, [&](std::size_t line_no, double t, RawWord w, const auto&) {
        if (!out.empty() && t < out.back().timestamp) {
            throw Error(ErrorCode::decreasing_timestamp, row_context(line_no) + "timestamp decreases");
        }
        out.push_back({t, w});
    });
    return out;
}

std::vector<TimedWord> read_message_log(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_message_log(in);
}

std::vector<TimedWord> timed_words(const BusLog& log) {
    std::vector<TimedWord> out;
    out.reserve(log.size());
    for (const auto& e : log) {
        out.push_back({e.timestamp, e.word});
    }
    return out;
}

void write_ground_truth(std::ostream& out, const BusLog& log) {
    out << kGroundTruthHeader << '\n';
    for (const auto& e : log) {
        out << format_double(e.timestamp) << ',' << to_hex(e.word) << ',' << e.source << '\n';
    }
}

BusLog read_ground_truth(std::istream& in) {
    BusLog out;
    read_rows(in, kGroundTruthHeader, 3, [&](std::size_t line_no, double t, RawWord w, const auto& cols) {
        if (!out.empty() && t < out.back().timestamp) {
            throw Error(ErrorCode::decreasing_timestamp, row_context(line_no) + "timestamp decreases");
        }
        out.push_back({t, w, std::string(trim(cols[2])), parity_valid(w)});
    });
    return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_scenario, what); }

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& context) {
    if (!obj.is_object()) {
        bad(context + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad(context + ": unknown field \"" + key + "\"");
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& context) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(context + "." + key + ": " + e.what());
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& context) {
    if (!obj.contains(key)) {
        bad(context + ": missing field \"" + key + "\"");
    }
    return get_or<T>(obj, key, T{}, context);
}

Label label_field(const json& obj, const char* key, const std::string& context) {
    const auto text = require<std::string>(obj, key, context);
    const auto label = Label::parse_octal(text);
    if (!label) {
        bad(context + ": label \"" + text + "\" is not octal 000-377");
    }
    return *label;
}

RawWord hex_value(const json& value, const std::string& context) {
    if (!value.is_string()) {
        bad(context + ": words are 8-digit hex strings");
    }
    const auto w = parse_hex(value.get<std::string>());
    if (!w) {
        throw Error(ErrorCode::malformed_hex, context + ": \"" + value.get<std::string>() + "\"");
    }
    return *w;
}

TransmitterProfile profile_from(const std::string& name, const json& j) {
    const std::string ctx = "profile " + name;
    check_keys(j, {"hi_level", "lo_level", "slew_rate", "noise_sigma", "bit_rate", "jitter_sigma"},
               ctx);
    TransmitterProfile p;
    p.name = name;
    p.hi_level = get_or(j, "hi_level", 10.0, ctx);
    p.lo_level = get_or(j, "lo_level", -10.0, ctx);
    p.slew_rate = require<double>(j, "slew_rate", ctx);
    p.noise_sigma = get_or(j, "noise_sigma", 0.0, ctx);
    p.bit_rate = require<double>(j, "bit_rate", ctx);
    p.jitter_sigma = get_or(j, "jitter_sigma", 0.0, ctx);
    return p;
}

DataPayload spoof_payload(const json& j, Label label, const std::string& ctx) {
    const int given = j.contains("bnr") + j.contains("discrete") + j.contains("bits");
    if (given != 1) {
        bad(ctx + ": give exactly one of \"bnr\", \"discrete\" or \"bits\"");
    }
    if (j.contains("bnr")) {
        unsigned padding = 0;
        std::string units;
        if (const LabelFormat* f = FormatRegistry::standard().find(label);
            f && f->format == DataFormat::bnr) {
            padding = f->padding_bits;
            units = f->units;
        }
        return Bnr{require<std::uint32_t>(j, "bnr", ctx), padding, 0, units};
    }
    if (j.contains("discrete")) {
        return Discrete{require<std::uint32_t>(j, "discrete", ctx)};
    }
    return Opaque{require<std::uint32_t>(j, "bits", ctx)};
}

AttackPlan attack_from(const json& j, const std::filesystem::path& base_dir) {
    const std::string ctx = "attack";
    const auto type = require<std::string>(j, "type", ctx);
    if (type == "playback") {
        check_keys(j, {"type", "cadence", "recording", "recording_file"}, ctx);
        std::vector<RawWord> recording;
        if (j.contains("recording")) {
            if (!j["recording"].is_array()) {
                bad(ctx + ".recording: expected an array of hex words");
            }
            for (const auto& w : j["recording"]) {
                recording.push_back(hex_value(w, ctx + ".recording"));
            }
        }
        if (j.contains("recording_file")) {
            for (const auto& tw : read_message_log(base_dir / require<std::string>(j, "recording_file", ctx))) {
                recording.push_back(tw.word);
            }
        }
        return build_playback(std::move(recording), require<double>(j, "cadence", ctx));
    }
    if (type == "spoof") {
        check_keys(j, {"type", "cadence", "label", "sdi", "ssm", "bnr", "discrete", "bits"}, ctx);
        SpoofPlan plan;
        plan.cadence = require<double>(j, "cadence", ctx);
        plan.message.label = label_field(j, "label", ctx);
        plan.message.sdi = get_or(j, "sdi", 0u, ctx);
        plan.message.ssm = get_or(j, "ssm", 0u, ctx);
        plan.message.data = spoof_payload(j, plan.message.label, ctx);
        plan.message.parity_valid = true;
        return plan;
    }
    if (type == "fuzz") {
        check_keys(j, {"type", "seed", "rate", "parity_valid_fraction"}, ctx);
        FuzzPlan plan;
        plan.seed = require<std::uint64_t>(j, "seed", ctx);
        plan.rate = require<double>(j, "rate", ctx);
        plan.parity_valid_fraction = get_or(j, "parity_valid_fraction", 0.5, ctx);
        return plan;
    }
    bad(ctx + ": unknown type \"" + type + "\" (playback, spoof or fuzz)");
}

PayloadSource payload_source(const std::string& s, const std::string& ctx) {
    if (s == "altitude") return PayloadSource::altitude;
    if (s == "gpws_discrete") return PayloadSource::gpws_discrete;
    if (s == "constant") return PayloadSource::constant;
    bad(ctx + ": unknown source \"" + s + "\"");
}

FlightSample flight_sample_from(const json& j, std::size_t i) {
    const std::string ctx = "flight_path[" + std::to_string(i) + "]";
    try {
        if (j.is_array()) {
            if (j.size() != 4) {
                bad(ctx + ": expected [time, longitude, latitude, altitude_ft]");
            }
            return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
        }
        check_keys(j, {"time", "longitude", "latitude", "altitude_ft"}, ctx);
        return {require<double>(j, "time", ctx), require<double>(j, "longitude", ctx),
                require<double>(j, "latitude", ctx), require<double>(j, "altitude_ft", ctx)};
    } catch (const json::exception& e) {
        bad(ctx + ": " + e.what());
    }
}

} // namespace

TransmitterProfile parse_profile(const std::string& name, std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_profile, e.what());
    }
    try {
        return profile_from(name, j);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_profile, e.what());
    }
}

BusScenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(std::string("scenario is not valid JSON: ") + e.what());
    }
    const std::string ctx = "scenario";
    check_keys(j, {"name", "seed", "duration", "profiles", "legitimate", "receivers", "egpws", "relay",
                   "attack", "direct_transmitters", "flight_path", "mfd", "mfd_actions",
                   "warning_bit", "trace_capture"},
               ctx);

    BusScenario s;
    s.name = get_or<std::string>(j, "name", "unnamed", ctx);
    s.seed = require<std::uint64_t>(j, "seed", ctx);
    s.duration = require<double>(j, "duration", ctx);

    const json profiles = j.value("profiles", json::object());
    if (!profiles.is_object() || profiles.empty()) {
        bad(ctx + ": \"profiles\" must name at least one transmitter");
    }
    for (const auto& [name, pj] : profiles.items()) {
        s.profiles.emplace(name, profile_from(name, pj));
    }
    s.legitimate = get_or<std::string>(j, "legitimate", "", ctx);

    for (const auto& rj : j.value("receivers", json::array())) {
        check_keys(rj, {"name", "kind"}, "receiver");
        const auto kind = get_or<std::string>(rj, "kind", "monitor", "receiver");
        if (kind != "mfd" && kind != "monitor") {
            bad("receiver: kind must be \"mfd\" or \"monitor\"");
        }
        s.receivers.push_back({require<std::string>(rj, "name", "receiver"),
                               kind == "mfd" ? ReceiverKind::mfd : ReceiverKind::monitor});
    }

    const int warning_bit = get_or(j, "warning_bit", 11, ctx);
    s.egpws.warning_bit = warning_bit;
    s.mfd.warning_bit = warning_bit;

    if (j.contains("egpws")) {
        const json& ej = j["egpws"];
        check_keys(ej, {"schedule", "terrain_elevation_ft", "warning_threshold_ft"}, "egpws");
        s.egpws.terrain_elevation_ft = get_or(ej, "terrain_elevation_ft", 0.0, "egpws");
        s.egpws.warning_threshold_ft = get_or(ej, "warning_threshold_ft", 1000.0, "egpws");
        if (ej.contains("schedule")) {
            s.egpws.schedule.clear();
            for (const auto& ek : ej["schedule"]) {
                const std::string ectx = "egpws.schedule";
                check_keys(ek, {"label", "period", "source", "data", "sdi", "ssm"}, ectx);
                Emission e;
                e.label = label_field(ek, "label", ectx);
                e.period = require<double>(ek, "period", ectx);
                e.source = payload_source(get_or<std::string>(ek, "source", "constant", ectx), ectx);
                e.data = get_or(ek, "data", 0u, ectx);
                e.sdi = get_or(ek, "sdi", 0u, ectx);
                e.ssm = get_or(ek, "ssm", e.source == PayloadSource::altitude ? 3u : 0u, ectx);
                s.egpws.schedule.push_back(e);
            }
        }
    }

    if (j.contains("relay")) {
        const json& rj = j["relay"];
        check_keys(rj, {"trigger", "legitimate", "rogue", "break_before_make"}, "relay");
        RelayConfig relay;
        const json tj = rj.value("trigger", json::object());
        check_keys(tj, {"west_of", "south_of"}, "relay.trigger");
        if (tj.contains("west_of")) relay.trigger.west_of = require<double>(tj, "west_of", "relay.trigger");
        if (tj.contains("south_of")) relay.trigger.south_of = require<double>(tj, "south_of", "relay.trigger");
        relay.legitimate = require<std::string>(rj, "legitimate", "relay");
        relay.rogue = require<std::string>(rj, "rogue", "relay");
        relay.break_before_make = get_or(rj, "break_before_make", true, "relay");
        s.relay = relay;
    }
    if (j.contains("attack")) {
        s.attack = attack_from(j["attack"], base_dir);
    }
    for (const auto& dj : j.value("direct_transmitters", json::array())) {
        check_keys(dj, {"name", "connect_at"}, "direct_transmitters");
        s.direct_transmitters.push_back({require<std::string>(dj, "name", "direct_transmitters"),
                                         get_or(dj, "connect_at", 0.0, "direct_transmitters")});
    }

    const json path = j.value("flight_path", json::array());
    for (std::size_t i = 0; i < path.size(); ++i) {
        s.flight_path.push_back(flight_sample_from(path[i], i));
    }

    if (j.contains("mfd")) {
        const json& mj = j["mfd"];
        check_keys(mj, {"hold_time", "boot_time", "taws_enabled"}, "mfd");
        s.mfd.hold_time = get_or(mj, "hold_time", 1.0, "mfd");
        s.mfd.boot_time = get_or(mj, "boot_time", 2.0, "mfd");
        s.mfd.taws_enabled = get_or(mj, "taws_enabled", true, "mfd");
    }
    for (const auto& aj : j.value("mfd_actions", json::array())) {
        check_keys(aj, {"time", "action", "receiver"}, "mfd_actions");
        MfdAction a;
        a.time = require<double>(aj, "time", "mfd_actions");
        a.receiver = get_or<std::string>(aj, "receiver", "", "mfd_actions");
        const auto action = require<std::string>(aj, "action", "mfd_actions");
        if (action == "restart") a.kind = MfdActionKind::restart;
        else if (action == "disable_taws") a.kind = MfdActionKind::disable_taws;
        else if (action == "enable_taws") a.kind = MfdActionKind::enable_taws;
        else bad("mfd_actions: unknown action \"" + action + "\"");
        s.mfd_actions.push_back(a);
    }

    if (j.contains("trace_capture")) {
        const json& cj = j["trace_capture"];
        check_keys(cj, {"labels", "max_words", "sample_rate", "start_time"}, "trace_capture");
        TraceCapture cap;
        for (const auto& lj : cj.value("labels", json::array())) {
            const auto label = lj.is_string() ? Label::parse_octal(lj.get<std::string>()) : std::nullopt;
            if (!label) {
                bad("trace_capture.labels: octal label strings expected");
            }
            cap.labels.insert(*label);
        }
        cap.max_words = get_or<std::size_t>(cj, "max_words", 100, "trace_capture");
        cap.sample_rate = get_or(cj, "sample_rate", kDefaultSampleRate, "trace_capture");
        cap.start_time = get_or(cj, "start_time", 0.0, "trace_capture");
        s.trace_capture = cap;
    }

    s.validate();
    return s;
}

BusScenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path), path.parent_path());
}

std::string model_to_json(const ids::BaselineModel& model) {
    json j;
    j["threshold_k"] = model.threshold_k;
    j["training_count"] = model.training_count;
    j["features"] = json::array();
    for (std::size_t f = 0; f < ids::kFeatureCount; ++f) {
        j["features"].push_back({{"name", ids::kFeatureNames[f]},
                                 {"mean", model.stats[f].mean},
                                 {"sigma", model.stats[f].sigma}});
    }
    return j.dump(2) + "\n";
}

ids::BaselineModel model_from_json(std::string_view json_text) {
    try {
        const json j = json::parse(json_text);
        ids::BaselineModel m;
        m.threshold_k = j.at("threshold_k").get<double>();
        m.training_count = j.at("training_count").get<std::size_t>();
        const json& features = j.at("features");
        if (!features.is_array() || features.size() != ids::kFeatureCount) {
            throw Error(ErrorCode::invalid_model, "expected 3 features");
        }
        for (std::size_t f = 0; f < ids::kFeatureCount; ++f) {
            if (features[f].at("name").get<std::string>() != ids::kFeatureNames[f]) {
                throw Error(ErrorCode::invalid_model,
                            "feature " + std::to_string(f) + " must be " +
                                std::string(ids::kFeatureNames[f]));
            }
            m.stats[f] = {features[f].at("mean").get<double>(), features[f].at("sigma").get<double>()};
            if (!(m.stats[f].sigma > 0.0)) {
                throw Error(ErrorCode::invalid_model, "sigma must be positive");
            }
        }
        if (!(m.threshold_k > 0.0)) {
            throw Error(ErrorCode::invalid_model, "threshold_k must be positive");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_model, e.what());
    }
}

void save_model(const std::filesystem::path& path, const ids::BaselineModel& model) {
    auto out = open_out(path);
    out << model_to_json(model);
}

ids::BaselineModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_file(path));
}

FormatRegistry load_formats(const std::filesystem::path& path, FormatRegistry base) {
    try {
        const json j = json::parse(read_file(path));
        for (const auto& fj : j.at("formats")) {
            const std::string ctx = "formats";
            check_keys(fj, {"label", "format", "name", "units", "padding_bits"}, ctx);
            LabelFormat f;
            const auto kind = require<std::string>(fj, "format", ctx);
            if (kind == "bnr") f.format = DataFormat::bnr;
            else if (kind == "bcd") f.format = DataFormat::bcd;
            else if (kind == "discrete") f.format = DataFormat::discrete;
            else bad(ctx + ": unknown format \"" + kind + "\"");
            f.name = get_or<std::string>(fj, "name", "", ctx);
            f.units = get_or<std::string>(fj, "units", "", ctx);
            f.padding_bits = get_or(fj, "padding_bits", 0u, ctx);
            if (f.padding_bits >= kDataBits) {
                bad(ctx + ": padding_bits must be below 19");
            }
            base.add(label_field(fj, "label", ctx), f);
        }
        return base;
    } catch (const json::exception& e) {
        bad(std::string("format table: ") + e.what());
    }
}

} // namespace arinc429::io
