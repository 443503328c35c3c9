#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arinc429/error.hpp"

namespace arinc429 {

// Bit numbering follows the ARINC 429 convention: bit 1 is the first bit on
// the wire and the least significant bit of the integer; bit 32 is parity.
inline constexpr int kWordBits = 32;
inline constexpr int kDataBits = 19;
inline constexpr std::uint32_t kDataMask = (1u << kDataBits) - 1;

enum class Parity { odd, even };

class RawWord {
public:
    constexpr RawWord() = default;
    constexpr explicit RawWord(std::uint32_t value) : value_(value) {}

    constexpr std::uint32_t value() const noexcept { return value_; }

    // 1-based ARINC bit number.
    constexpr bool bit(int n) const noexcept { return (value_ >> (n - 1)) & 1u; }

    constexpr std::uint8_t label_byte() const noexcept { return value_ & 0xFFu; }
    constexpr unsigned sdi() const noexcept { return (value_ >> 8) & 0x3u; }
    constexpr std::uint32_t data_field() const noexcept { return (value_ >> 10) & kDataMask; }
    constexpr unsigned ssm() const noexcept { return (value_ >> 29) & 0x3u; }
    constexpr bool parity_bit() const noexcept { return value_ >> 31; }

    friend constexpr bool operator==(RawWord, RawWord) = default;

private:
    std::uint32_t value_ = 0;
};

constexpr std::uint8_t reverse_bits(std::uint8_t b) noexcept {
    std::uint8_t r = 0;
    for (int i = 0; i < 8; ++i) {
        r = static_cast<std::uint8_t>((r << 1) | ((b >> i) & 1u));
    }
    return r;
}

// A label is written in octal with its most significant bit transmitted
// first, so the octal value is the bit-reversal of the byte held in bits 8-1.
class Label {
public:
    constexpr Label() = default;

    static constexpr Label from_octal(unsigned octal_value) {
        if (octal_value > 0377) {
            throw Error(ErrorCode::payload_overflow, "label exceeds octal 377");
        }
        return Label(static_cast<std::uint8_t>(octal_value));
    }
    static constexpr Label from_raw_byte(std::uint8_t raw) { return Label(reverse_bits(raw)); }
    // Parses "203", "0o203" or "0203"; rejects digits 8/9 and values above 377.
    static std::optional<Label> parse_octal(std::string_view text);

    constexpr unsigned octal_value() const noexcept { return value_; }
    constexpr std::uint8_t raw_byte() const noexcept { return reverse_bits(value_); }

    friend constexpr auto operator<=>(Label, Label) = default;

private:
    constexpr explicit Label(std::uint8_t v) : value_(v) {}
    std::uint8_t value_ = 0;
};

std::string label_octal_string(Label label);

struct Bnr {
    std::uint32_t magnitude = 0;
    unsigned padding_bits = 0;
    // Raw content of the padding bits, kept so re-encoding is lossless.
    std::uint32_t padding = 0;
    std::string units;

    friend bool operator==(const Bnr&, const Bnr&) = default;
};

struct Bcd {
    // Most significant digit first. The leading digit has 3 bits, the rest 4.
    std::vector<std::uint8_t> digits;

    friend bool operator==(const Bcd&, const Bcd&) = default;
};

struct Discrete {
    std::uint32_t bits = 0;
    friend bool operator==(const Discrete&, const Discrete&) = default;
};

struct Opaque {
    std::uint32_t bits = 0;
    friend bool operator==(const Opaque&, const Opaque&) = default;
};

using DataPayload = std::variant<Bnr, Bcd, Discrete, Opaque>;

// The raw 19-bit data field a payload occupies; throws payload_overflow.
std::uint32_t payload_bits(const DataPayload& payload);

struct DecodedMessage {
    Label label;
    unsigned sdi = 0;
    DataPayload data;
    unsigned ssm = 0;
    bool parity_valid = false;
};

enum class DataFormat { bnr, bcd, discrete };

struct LabelFormat {
    DataFormat format = DataFormat::discrete;
    std::string name;
    std::string units;
    unsigned padding_bits = 0;
};

// Label -> data encoding table. Unregistered labels decode as Opaque.
class FormatRegistry {
public:
    // Ships 0o203 (BNR altitude, ft MSL, one padding bit) and 0o270 (GPWS discrete).
    static const FormatRegistry& standard();

    void add(Label label, LabelFormat format);
    const LabelFormat* find(Label label) const;
    const std::map<Label, LabelFormat>& entries() const noexcept { return formats_; }

private:
    std::map<Label, LabelFormat> formats_;
};

inline constexpr Label kLabelAltitude = Label::from_octal(0203);
inline constexpr Label kLabelGpwsDiscrete = Label::from_octal(0270);

Parity parity_of(RawWord word) noexcept;
inline bool parity_valid(RawWord word) noexcept { return parity_of(word) == Parity::odd; }

// Sets bit 32 so the word has odd population count.
RawWord with_odd_parity(RawWord word) noexcept;

DecodedMessage decode_word(RawWord word,
                           const FormatRegistry& registry = FormatRegistry::standard());

RawWord encode_word(Label label, unsigned sdi, const DataPayload& data, unsigned ssm);
RawWord encode_word(const DecodedMessage& message);

// Hex form: 8 uppercase digits, bit 32 first.
std::string to_hex(RawWord word);
// Accepts exactly 8 hex digits of either case.
std::optional<RawWord> parse_hex(std::string_view text);
// Same, throwing malformed_hex.
RawWord parse_hex_or_throw(std::string_view text);

// Binary rendering in nibble groups, bit 32 first ("1110 0001 ...").
std::string to_binary(RawWord word);

} // namespace arinc429
