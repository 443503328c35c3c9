// a429lab: command-line front end for the ARINC 429 lab library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arinc429/bus.hpp"
#include "arinc429/data_io.hpp"
#include "arinc429/ids.hpp"
#include "arinc429/random.hpp"
#include "arinc429/report.hpp"
#include "arinc429/waveform.hpp"
#include "arinc429/word.hpp"

using namespace arinc429;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitContention = 3;
constexpr int kExitIdsData = 4;

std::uint64_t default_seed() {
    const char* env = std::getenv("ARINC429LAB_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (used == std::string(env).size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::invalid_scenario, std::string("ARINC429LAB_SEED is not an integer: ") + env);
}

std::uint32_t parse_uint(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used, 0);
        if (used == text.size() && v <= 0xFFFFFFFFull) {
            return static_cast<std::uint32_t>(v);
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::payload_overflow, std::string(what) + " is not a valid unsigned number: " + text);
}

std::string with_commas(std::uint64_t v) {
    std::string s = std::to_string(v);
    for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) {
        s.insert(static_cast<std::size_t>(i), ",");
    }
    return s;
}

std::string bits_msb_first(std::uint32_t v, int n) {
    std::string s;
    for (int i = n - 1; i >= 0; --i) {
        s.push_back(((v >> i) & 1u) ? '1' : '0');
    }
    return s;
}

std::string describe_payload(const DataPayload& data) {
    char buf[64];
    return std::visit(
        [&](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Bnr>) {
                std::string s = "BNR " + with_commas(p.magnitude) + (p.units.empty() ? "" : " " + p.units);
                if (p.padding_bits > 0) {
                    s += " (" + std::to_string(p.padding_bits) + " padding bit" +
                         (p.padding_bits == 1 ? "" : "s") + ": " + bits_msb_first(p.padding, static_cast<int>(p.padding_bits)) + ")";
                }
                return s;
            } else if constexpr (std::is_same_v<T, Bcd>) {
                std::string s = "BCD ";
                for (auto d : p.digits) {
                    s.push_back(static_cast<char>('0' + d));
                }
                return s;
            } else if constexpr (std::is_same_v<T, Discrete>) {
                std::snprintf(buf, sizeof buf, "discrete 0x%05X", p.bits);
                std::string s = buf;
                std::string set;
                for (int b = 0; b < kDataBits; ++b) {
                    if ((p.bits >> b) & 1u) {
                        set += (set.empty() ? "" : ",") + std::to_string(b + 11);
                    }
                }
                return s + " (bits set: " + (set.empty() ? "none" : set) + ")";
            } else {
                std::snprintf(buf, sizeof buf, "opaque 0x%05X", p.bits);
                return buf;
            }
        },
        data);
}

void print_breakdown(RawWord w, const FormatRegistry& registry) {
    const DecodedMessage m = decode_word(w, registry);
    const LabelFormat* fmt = registry.find(m.label);
    int ones = 0;
    for (int b = 1; b <= kWordBits; ++b) {
        ones += w.bit(b);
    }
    std::cout << "word      " << to_hex(w) << "\n"
              << "binary    " << to_binary(w) << "\n"
              << "fields    P=" << w.parity_bit() << " SSM=" << bits_msb_first(w.ssm(), 2)
              << " DATA=" << bits_msb_first(w.data_field(), kDataBits) << " SDI=" << bits_msb_first(w.sdi(), 2)
              << " LABEL=" << bits_msb_first(w.label_byte(), 8) << "\n"
              << "label     bits 8-1 " << bits_msb_first(w.label_byte(), 8) << ", reversed "
              << bits_msb_first(m.label.octal_value(), 8) << " = octal " << label_octal_string(m.label);
    if (fmt != nullptr) {
        std::cout << " (" << fmt->name << ")";
    }
    std::cout << "\n"
              << "sdi       " << bits_msb_first(m.sdi, 2) << "\n"
              << "ssm       " << bits_msb_first(m.ssm, 2) << "\n"
              << "data      " << describe_payload(m.data) << "\n"
              << "parity    " << (m.parity_valid ? "OK" : "PARITY INVALID") << " (" << ones << " ones)\n";
}

FormatRegistry registry_from(const std::string& formats_file) {
    return formats_file.empty() ? FormatRegistry::standard() : io::load_formats(formats_file);
}

TransmitterProfile load_profile(const std::string& spec) {
    if (spec == "egpws") {
        return TransmitterProfile::egpws();
    }
    if (spec == "altadt") {
        return TransmitterProfile::altadt();
    }
    return io::parse_profile(fs::path(spec).stem().string(), io::read_file(spec));
}

std::ostream& output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") {
        return std::cout;
    }
    file.open(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorCode::io_error, "cannot write " + path);
    }
    return file;
}

std::vector<VoltageTrace> read_all_traces(const std::vector<std::string>& files) {
    std::vector<VoltageTrace> all;
    for (const auto& f : files) {
        for (auto& t : io::read_trace_csv(fs::path(f))) {
            all.push_back(std::move(t));
        }
    }
    return all;
}

struct SynthOptions {
    std::string profile = "egpws";
    std::vector<std::string> words;
    std::size_t count = 10;
    std::optional<std::uint64_t> seed;
    double sample_rate = kDefaultSampleRate;
    std::optional<double> noise;
    std::optional<double> bit_rate;
    std::optional<double> slew;
};

void add_synth_options(CLI::App* cmd, SynthOptions& o) {
    cmd->add_option("--profile", o.profile, "Preset (egpws, altadt) or profile JSON file");
    cmd->add_option("--word", o.words, "Hex word to synthesize (repeatable)");
    cmd->add_option("--count", o.count, "Random words when no --word is given");
    cmd->add_option("--seed", o.seed, "Seed (default $ARINC429LAB_SEED or 0)");
    cmd->add_option("--sample-rate", o.sample_rate, "Samples per second");
    cmd->add_option("--noise", o.noise, "Override noise sigma, volts");
    cmd->add_option("--bit-rate", o.bit_rate, "Override bit rate");
    cmd->add_option("--slew", o.slew, "Override slew rate, V/us");
}

std::vector<VoltageTrace> synthesize(const SynthOptions& o) {
    TransmitterProfile p = load_profile(o.profile);
    if (o.noise) p.noise_sigma = *o.noise;
    if (o.bit_rate) p.bit_rate = *o.bit_rate;
    if (o.slew) p.slew_rate = *o.slew;
    const std::uint64_t seed = o.seed ? *o.seed : default_seed();

    std::vector<RawWord> words;
    for (const auto& w : o.words) {
        words.push_back(parse_hex_or_throw(w));
    }
    if (words.empty()) {
        Rng rng(derive_seed(seed, 0));
        for (std::size_t i = 0; i < o.count; ++i) {
            // Bit 1 forced on so every trace has a rising edge to measure.
            words.push_back(with_odd_parity(RawWord(rng.next_u32() | 1u)));
        }
    }
    std::vector<VoltageTrace> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        out.push_back(synthesize_trace(words[i], p, o.sample_rate, derive_seed(seed, i + 1),
                                       static_cast<int>(i + 1)));
    }
    return out;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, bool emit_traces,
                 const std::string& model_path, std::optional<std::uint64_t> seed) {
    BusScenario s = io::load_scenario(scenario_path);
    if (seed) {
        s.seed = *seed;
    }
    std::optional<ids::BaselineModel> model;
    if (!model_path.empty()) {
        model = io::load_model(model_path);
        if (!s.trace_capture) {
            throw Error(ErrorCode::invalid_scenario, "--ids needs a trace_capture section in the scenario");
        }
    }
    const ScenarioResult r = run_scenario(s);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const auto words = io::timed_words(r.log);
    io::write_message_log(dir / "messages.csv", words);
    {
        std::ofstream gt(dir / "ground_truth.csv", std::ios::binary);
        io::write_ground_truth(gt, r.log);
    }

    std::vector<CapturedTrace> captured;
    if (emit_traces || model) {
        captured = capture_traces(s, r.log);
    }
    if (emit_traces) {
        std::vector<VoltageTrace> traces;
        std::ofstream index(dir / "trace_words.csv", std::ios::binary);
        index << "Word,Log index,Time (s),Source\n";
        for (const auto& c : captured) {
            traces.push_back(c.trace);
            index << c.trace.word_index << ',' << c.log_index << ','
                  << io::format_double(r.log[c.log_index].timestamp) << ',' << c.source << '\n';
        }
        io::write_trace_csv(dir / "traces.csv", traces);
    }

    std::optional<IdsSummary> summary;
    if (model) {
        summary = summarize_ids(*model, s, r.log, captured);
    }
    const RunReport report = build_report(s, r, summary);
    const std::string text = report_text(report);
    {
        std::ofstream j(dir / "report.json", std::ios::binary);
        j << report_json(report);
        std::ofstream t(dir / "report.txt", std::ios::binary);
        t << text;
    }
    std::cout << text;
    return 0;
}

int cmd_ids_train(const std::vector<std::string>& files, const SynthOptions& synth, bool use_synth,
                  const std::string& out, std::size_t minimum, double k) {
    std::vector<VoltageTrace> traces = use_synth ? synthesize(synth) : read_all_traces(files);
    ids::TrainingOptions opt;
    opt.minimum_traces = minimum;
    opt.threshold_k = k;
    const ids::BaselineModel m = ids::train(traces, opt);
    io::save_model(out, m);
    std::cout << "trained on " << m.training_count << " traces, k = " << io::format_double(k) << "\n";
    for (std::size_t f = 0; f < ids::kFeatureCount; ++f) {
        std::cout << "  " << ids::kFeatureNames[f] << ": mean " << io::format_double(m.stats[f].mean)
                  << ", sigma " << io::format_double(m.stats[f].sigma) << "\n";
    }
    return 0;
}

int cmd_ids_detect(const std::string& model_path, const std::vector<std::string>& files) {
    const auto model = io::load_model(model_path);
    std::size_t flagged = 0;
    std::size_t n = 0;
    for (const auto& f : files) {
        for (const auto& t : io::read_trace_csv(fs::path(f))) {
            const auto v = ids::detect(model, t);
            ++n;
            flagged += v.anomalous ? 1 : 0;
            std::cout << f << " word " << t.word_index << ": score " << io::format_double(v.score)
                      << (v.anomalous ? "  ANOMALOUS" : "  ok") << "\n";
        }
    }
    std::cout << flagged << " of " << n << " traces anomalous\n";
    return 0;
}

int cmd_ids_eval(const std::string& model_path, const std::vector<std::string>& legit_files,
                 const std::vector<std::string>& rogue_files) {
    const auto model = io::load_model(model_path);
    const auto legit = read_all_traces(legit_files);
    const auto rogue = read_all_traces(rogue_files);
    std::vector<ids::LabeledTrace> labeled;
    for (const auto& t : legit) labeled.push_back({&t, ids::Origin::legitimate});
    for (const auto& t : rogue) labeled.push_back({&t, ids::Origin::rogue});
    const auto m = ids::evaluate(model, labeled);
    std::printf("%-12s %8s %8s  %s\n", "class", "traces", "flagged", "rate");
    std::printf("%-12s %8zu %8zu  FPR %s\n", "legitimate", m.legitimate_total, m.legitimate_flagged,
                io::format_double(m.false_positive_rate).c_str());
    std::printf("%-12s %8zu %8zu  TPR %s\n", "rogue", m.rogue_total, m.rogue_flagged,
                io::format_double(m.true_positive_rate).c_str());
    return 0;
}

int cmd_slopes(const std::vector<std::string>& files, const std::string& out_path) {
    std::ofstream file;
    std::ostream& out = output(out_path, file);
    out << "file,word,rising_slope_v_per_us,hi_peak_v,lo_peak_v,rise_time_10_90_s\n";
    for (const auto& f : files) {
        for (const auto& t : io::read_trace_csv(fs::path(f))) {
            const EdgeFeatures e = measure_edge(t);
            out << f << ',' << t.word_index << ',' << io::format_double(e.rising_slope) << ','
                << io::format_double(e.hi_peak) << ',' << io::format_double(e.lo_peak) << ','
                << io::format_double(e.rise_time_10_90) << '\n';
        }
    }
    return 0;
}

int cmd_capture(const std::string& log_path, const std::vector<std::string>& labels,
                std::optional<int> warning_bit, const std::string& out_path) {
    const auto words = io::read_message_log(fs::path(log_path));
    BusLog log;
    for (const auto& w : words) {
        log.push_back({w.timestamp, w.word, "", parity_valid(w.word)});
    }
    CaptureFilter filter;
    for (const auto& l : labels) {
        const auto label = Label::parse_octal(l);
        if (!label) {
            throw Error(ErrorCode::invalid_plan, "not an octal label: " + l);
        }
        filter.labels.insert(*label);
    }
    if (warning_bit) {
        filter.predicate = bit_set_predicate(*warning_bit);
    }
    std::vector<io::TimedWord> kept;
    for (const auto& e : log) {
        if (filter.matches(e.word)) {
            kept.push_back({e.timestamp, e.word});
        }
    }
    std::ofstream file;
    io::write_message_log(output(out_path, file), kept);
    std::cerr << kept.size() << " of " << log.size() << " words captured\n";
    return 0;
}

int cmd_fuzz(std::optional<std::uint64_t> seed, std::size_t count, double fraction, double rate,
             const std::string& out_path) {
    if (!(rate > 0.0)) {
        throw Error(ErrorCode::invalid_plan, "fuzz rate must be positive");
    }
    const auto words = fuzz_stream(seed ? *seed : default_seed(), count, fraction);
    std::vector<io::TimedWord> timed;
    for (std::size_t i = 0; i < words.size(); ++i) {
        timed.push_back({static_cast<double>(i) / rate, words[i]});
    }
    std::ofstream file;
    io::write_message_log(output(out_path, file), timed);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARINC 429 laboratory: codec, waveforms, bus attacks and voltage-fingerprint IDS"};
    app.require_subcommand(1);

    std::string formats;
    std::string hex;
    auto* decode = app.add_subcommand("decode", "Break a hex word into its fields");
    decode->add_option("word", hex, "8 hex digits")->required();
    decode->add_option("--formats", formats, "Extra label format table (JSON)");

    std::string label_text;
    unsigned sdi = 0;
    unsigned ssm = 0;
    std::optional<std::string> bnr;
    std::optional<std::string> discrete;
    std::optional<std::string> bits;
    std::optional<std::string> bcd;
    std::optional<unsigned> padding_bits;
    auto* encode = app.add_subcommand("encode", "Build a word from its fields");
    encode->add_option("--label", label_text, "Octal label, e.g. 203")->required();
    encode->add_option("--sdi", sdi, "SDI 0-3")->check(CLI::Range(0, 3));
    encode->add_option("--ssm", ssm, "SSM 0-3")->check(CLI::Range(0, 3));
    auto* payload = encode->add_option_group("payload", "Data field");
    payload->add_option("--bnr", bnr, "BNR magnitude");
    payload->add_option("--discrete", discrete, "Discrete bit field (19 bits)");
    payload->add_option("--bits", bits, "Raw 19-bit data field");
    payload->add_option("--bcd", bcd, "BCD digits, most significant first");
    payload->require_option(1);
    encode->add_option("--padding-bits", padding_bits, "BNR padding bits (default from label format)");
    encode->add_option("--formats", formats, "Extra label format table (JSON)");

    std::string scenario;
    std::string out_dir = ".";
    bool emit_traces = false;
    std::string model_path;
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Run a bus scenario and write logs and a report");
    simulate->add_option("scenario", scenario, "Scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_flag("--emit-traces", emit_traces, "Write captured voltage traces");
    simulate->add_option("--ids", model_path, "Baseline model; adds IDS verdicts to the report");
    simulate->add_option("--seed", sim_seed, "Override the scenario seed");

    SynthOptions synth;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize stacked voltage traces as CSV");
    add_synth_options(synth_cmd, synth);
    synth_cmd->add_option("--out", synth_out, "Output CSV (default stdout)");

    auto* ids_cmd = app.add_subcommand("ids", "Voltage-fingerprint intrusion detection");
    ids_cmd->require_subcommand(1);
    std::vector<std::string> train_files;
    SynthOptions train_synth;
    std::string train_profile;
    std::string model_out;
    std::size_t minimum = 30;
    double k = 4.0;
    auto* train = ids_cmd->add_subcommand("train", "Fit a baseline model");
    train->add_option("traces", train_files, "Trace CSV files");
    train->add_option("--synthesize", train_profile, "Train on synthesized traces of this profile");
    train->add_option("--count", train_synth.count, "Synthesized trace count");
    train->add_option("--seed", train_synth.seed, "Seed for synthesized traces");
    train->add_option("--sample-rate", train_synth.sample_rate, "Sample rate for synthesized traces");
    train->add_option("--noise", train_synth.noise, "Noise sigma override for synthesized traces");
    train->add_option("--bit-rate", train_synth.bit_rate, "Bit rate override for synthesized traces");
    train->add_option("--out", model_out, "Model file")->required();
    train->add_option("--min", minimum, "Minimum training traces");
    train->add_option("-k,--threshold", k, "Anomaly threshold in sigmas");

    std::vector<std::string> detect_files;
    std::string detect_model;
    auto* detect = ids_cmd->add_subcommand("detect", "Score traces against a model");
    detect->add_option("--model", detect_model, "Model file")->required();
    detect->add_option("traces", detect_files, "Trace CSV files")->required();

    std::string eval_model;
    std::vector<std::string> legit_files;
    std::vector<std::string> rogue_files;
    auto* eval = ids_cmd->add_subcommand("eval", "TPR/FPR over labeled trace files");
    eval->add_option("--model", eval_model, "Model file")->required();
    eval->add_option("--legit", legit_files, "Trace CSVs from the legitimate transmitter")->required();
    eval->add_option("--rogue", rogue_files, "Trace CSVs from the rogue transmitter")->required();

    std::vector<std::string> slope_files;
    std::string slope_out;
    auto* slopes = app.add_subcommand("slopes", "Tidy CSV of edge features per trace");
    slopes->add_option("traces", slope_files, "Trace CSV files")->required();
    slopes->add_option("--out", slope_out, "Output CSV (default stdout)");

    std::string capture_log;
    std::vector<std::string> capture_labels;
    std::optional<int> warning_bit;
    std::string capture_out;
    auto* capture = app.add_subcommand("capture", "Filter a message log into a recording");
    capture->add_option("log", capture_log, "Message log CSV")->required();
    capture->add_option("--label", capture_labels, "Octal label to keep (repeatable)");
    capture->add_option("--warning-bit", warning_bit, "Keep only words with this data bit set");
    capture->add_option("--out", capture_out, "Output message log (default stdout)");

    std::optional<std::uint64_t> fuzz_seed;
    std::size_t fuzz_count = 100;
    double fraction = 0.5;
    double rate = 100.0;
    std::string fuzz_out;
    auto* fuzz = app.add_subcommand("fuzz", "Seeded random word stream as a message log");
    fuzz->add_option("--seed", fuzz_seed, "Seed (default $ARINC429LAB_SEED or 0)");
    fuzz->add_option("--count", fuzz_count, "Words");
    fuzz->add_option("--fraction", fraction, "Fraction with valid parity")->check(CLI::Range(0.0, 1.0));
    fuzz->add_option("--rate", rate, "Words per second for timestamps");
    fuzz->add_option("--out", fuzz_out, "Output message log (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*decode) {
            const auto w = parse_hex(hex);
            if (!w) {
                std::cerr << "a429lab: error: malformed-hex: expected 8 hex digits, got \"" << hex
                          << "\"\nusage: a429lab decode <8 hex digits>\n";
                return kExitInput;
            }
            print_breakdown(*w, registry_from(formats));
        } else if (*encode) {
            const auto label = Label::parse_octal(label_text);
            if (!label) {
                throw Error(ErrorCode::payload_overflow, "label must be octal 000-377: " + label_text);
            }
            const FormatRegistry reg = registry_from(formats);
            const LabelFormat* fmt = reg.find(*label);
            DataPayload data;
            if (bnr) {
                const unsigned pad = padding_bits ? *padding_bits : (fmt ? fmt->padding_bits : 0);
                data = Bnr{parse_uint(*bnr, "--bnr"), pad, 0, fmt ? fmt->units : ""};
            } else if (discrete) {
                data = Discrete{parse_uint(*discrete, "--discrete")};
            } else if (bits) {
                data = Opaque{parse_uint(*bits, "--bits")};
            } else {
                Bcd b;
                for (char c : *bcd) {
                    if (c < '0' || c > '9') {
                        throw Error(ErrorCode::payload_overflow, "--bcd takes decimal digits");
                    }
                    b.digits.push_back(static_cast<std::uint8_t>(c - '0'));
                }
                data = b;
            }
            const RawWord w = encode_word(*label, sdi, data, ssm);
            std::cout << to_hex(w) << "\n";
            print_breakdown(w, reg);
        } else if (*simulate) {
            return cmd_simulate(scenario, out_dir, emit_traces, model_path, sim_seed);
        } else if (*synth_cmd) {
            const auto traces = synthesize(synth);
            std::ofstream file;
            io::write_trace_csv(output(synth_out, file), traces);
        } else if (*train) {
            const bool use_synth = !train_profile.empty();
            if (use_synth == !train_files.empty()) {
                throw Error(ErrorCode::insufficient_training_data,
                            "give either trace files or --synthesize <profile>");
            }
            train_synth.profile = train_profile;
            return cmd_ids_train(train_files, train_synth, use_synth, model_out, minimum, k);
        } else if (*detect) {
            return cmd_ids_detect(detect_model, detect_files);
        } else if (*eval) {
            return cmd_ids_eval(eval_model, legit_files, rogue_files);
        } else if (*slopes) {
            return cmd_slopes(slope_files, slope_out);
        } else if (*capture) {
            return cmd_capture(capture_log, capture_labels, warning_bit, capture_out);
        } else if (*fuzz) {
            return cmd_fuzz(fuzz_seed, fuzz_count, fraction, rate, fuzz_out);
        }
    } catch (const ContentionError& e) {
        std::cerr << "a429lab: error: " << e.what() << "\n";
        return kExitContention;
    } catch (const Error& e) {
        std::cerr << "a429lab: error: " << e.what() << "\n";
        const bool ids_data =
            e.code() == ErrorCode::insufficient_training_data || e.code() == ErrorCode::empty_class;
        return ids_data ? kExitIdsData : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "a429lab: error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
