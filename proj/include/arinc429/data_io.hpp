#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arinc429/bus.hpp"
#include "arinc429/ids.hpp"
#include "arinc429/waveform.hpp"
#include "arinc429/word.hpp"

namespace arinc429::io {

inline constexpr std::string_view kTraceHeader = "Index,Time (s),Voltage (V),Word";
inline constexpr std::string_view kMessageLogHeader = "Time (s),Word";
inline constexpr std::string_view kGroundTruthHeader = "Time (s),Word,Source";

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// --- Voltage trace CSV (vertically stacked words) ---

// Word column is the 1-based position of each trace in the input.
void write_trace_csv(std::ostream& out, std::span<const VoltageTrace> traces);
void write_trace_csv(const std::filesystem::path& path, std::span<const VoltageTrace> traces);

// One trace per Word value; sample_rate is 1 / median time step (0 for single-sample words).
std::vector<VoltageTrace> read_trace_csv(std::istream& in);
std::vector<VoltageTrace> read_trace_csv(const std::filesystem::path& path);

// --- Message logs ---

struct TimedWord {
    double timestamp = 0.0;
    RawWord word;
    friend bool operator==(const TimedWord&, const TimedWord&) = default;
};

void write_message_log(std::ostream& out, std::span<const TimedWord> words);
void write_message_log(const std::filesystem::path& path, std::span<const TimedWord> words);
// The header line is optional; an empty input yields an empty list.
std::vector<TimedWord> read_message_log(std::istream& in);
std::vector<TimedWord> read_message_log(const std::filesystem::path& path);

std::vector<TimedWord> timed_words(const BusLog& log);

// Message log plus the transmitter that actually drove each word.
void write_ground_truth(std::ostream& out, const BusLog& log);
BusLog read_ground_truth(std::istream& in);

// --- JSON documents ---

TransmitterProfile parse_profile(const std::string& name, std::string_view json_text);
BusScenario parse_scenario(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});
BusScenario load_scenario(const std::filesystem::path& path);

std::string model_to_json(const ids::BaselineModel& model);
ids::BaselineModel model_from_json(std::string_view json_text);
void save_model(const std::filesystem::path& path, const ids::BaselineModel& model);
ids::BaselineModel load_model(const std::filesystem::path& path);

// {"formats": [{"label": "203", "format": "bnr", "name": ..., "units": ..., "padding_bits": 1}]}
FormatRegistry load_formats(const std::filesystem::path& path, FormatRegistry base = FormatRegistry::standard());

std::string read_file(const std::filesystem::path& path);

} // namespace arinc429::io
