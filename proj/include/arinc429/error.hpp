#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arinc429 {

enum class ErrorCode {
    payload_overflow,
    malformed_hex,
    invalid_profile,
    sample_rate_too_low,
    trace_too_short,
    indeterminate_bit,
    no_rising_edge,
    bus_contention,
    invalid_scenario,
    empty_recording,
    invalid_plan,
    insufficient_training_data,
    empty_class,
    invalid_model,
    malformed_header,
    malformed_row,
    non_monotonic_time,
    non_contiguous_index,
    decreasing_timestamp,
    io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace arinc429
