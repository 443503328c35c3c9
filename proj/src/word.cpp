#include "arinc429/word.hpp"

#include <bit>
#include <charconv>
#include <cstdio>

namespace arinc429 {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::payload_overflow: return "payload-overflow";
    case ErrorCode::malformed_hex: return "malformed-hex";
    case ErrorCode::invalid_profile: return "invalid-profile";
    case ErrorCode::sample_rate_too_low: return "sample-rate-too-low";
    case ErrorCode::trace_too_short: return "trace-too-short";
    case ErrorCode::indeterminate_bit: return "indeterminate-bit";
    case ErrorCode::no_rising_edge: return "no-rising-edge";
    case ErrorCode::bus_contention: return "bus-contention";
    case ErrorCode::invalid_scenario: return "invalid-scenario";
    case ErrorCode::empty_recording: return "empty-recording";
    case ErrorCode::invalid_plan: return "invalid-plan";
    case ErrorCode::insufficient_training_data: return "insufficient-training-data";
    case ErrorCode::empty_class: return "empty-class";
    case ErrorCode::invalid_model: return "invalid-model";
    case ErrorCode::malformed_header: return "malformed-header";
    case ErrorCode::malformed_row: return "malformed-row";
    case ErrorCode::non_monotonic_time: return "non-monotonic-time";
    case ErrorCode::non_contiguous_index: return "non-contiguous-index";
    case ErrorCode::decreasing_timestamp: return "decreasing-timestamp";
    case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

std::optional<Label> Label::parse_octal(std::string_view text) {
    if (text.starts_with("0o") || text.starts_with("0O")) {
        text.remove_prefix(2);
    }
    if (text.empty() || text.size() > 4) {
        return std::nullopt;
    }
    unsigned value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 8);
    if (ec != std::errc{} || end != text.data() + text.size() || value > 0377) {
        return std::nullopt;
    }
    return Label::from_octal(value);
}

std::string label_octal_string(Label label) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%03o", label.octal_value());
    return buf;
}

namespace {

std::uint32_t bcd_bits(const Bcd& bcd) {
    if (bcd.digits.size() != 5) {
        throw Error(ErrorCode::payload_overflow, "BCD payload needs exactly 5 digits");
    }
    if (bcd.digits[0] > 7) {
        throw Error(ErrorCode::payload_overflow, "leading BCD digit exceeds 3 bits");
    }
    std::uint32_t bits = bcd.digits[0];
    for (std::size_t i = 1; i < bcd.digits.size(); ++i) {
        if (bcd.digits[i] > 9) {
            throw Error(ErrorCode::payload_overflow, "BCD digit above 9");
        }
        bits = (bits << 4) | bcd.digits[i];
    }
    return bits;
}

Bcd bcd_from_bits(std::uint32_t bits) {
    Bcd bcd;
    bcd.digits.resize(5);
    for (int i = 4; i >= 1; --i) {
        bcd.digits[i] = bits & 0xFu;
        bits >>= 4;
    }
    bcd.digits[0] = bits & 0x7u;
    return bcd;
}

std::uint32_t flat_bits(std::uint32_t bits, const char* kind) {
    if (bits > kDataMask) {
        throw Error(ErrorCode::payload_overflow, std::string(kind) + " bitfield exceeds 19 bits");
    }
    return bits;
}

} // namespace

std::uint32_t payload_bits(const DataPayload& payload) {
    struct Visitor {
        std::uint32_t operator()(const Bnr& bnr) const {
            if (bnr.padding_bits >= kDataBits) {
                throw Error(ErrorCode::payload_overflow, "BNR padding leaves no magnitude bits");
            }
            const unsigned width = kDataBits - bnr.padding_bits;
            if (bnr.magnitude >> width) {
                throw Error(ErrorCode::payload_overflow,
                            "BNR magnitude " + std::to_string(bnr.magnitude) + " exceeds " +
                                std::to_string(width) + " bits");
            }
            if (bnr.padding >> bnr.padding_bits) {
                throw Error(ErrorCode::payload_overflow, "BNR padding value wider than padding");
            }
            return (bnr.magnitude << bnr.padding_bits) | bnr.padding;
        }
        std::uint32_t operator()(const Bcd& bcd) const { return bcd_bits(bcd); }
        std::uint32_t operator()(const Discrete& d) const { return flat_bits(d.bits, "discrete"); }
        std::uint32_t operator()(const Opaque& o) const { return flat_bits(o.bits, "opaque"); }
    };
    return std::visit(Visitor{}, payload);
}

const FormatRegistry& FormatRegistry::standard() {
    static const FormatRegistry registry = [] {
        FormatRegistry r;
        r.add(kLabelAltitude, {DataFormat::bnr, "altitude", "ft MSL", 1});
        r.add(kLabelGpwsDiscrete, {DataFormat::discrete, "GPWS discrete", "", 0});
        return r;
    }();
    return registry;
}

void FormatRegistry::add(Label label, LabelFormat format) {
    formats_.insert_or_assign(label, std::move(format));
}

const LabelFormat* FormatRegistry::find(Label label) const {
    auto it = formats_.find(label);
    return it == formats_.end() ? nullptr : &it->second;
}

Parity parity_of(RawWord word) noexcept {
    return (std::popcount(word.value()) & 1) ? Parity::odd : Parity::even;
}

RawWord with_odd_parity(RawWord word) noexcept {
    const std::uint32_t body = word.value() & 0x7FFFFFFFu;
    return RawWord(std::popcount(body) & 1 ? body : body | 0x80000000u);
}

DecodedMessage decode_word(RawWord word, const FormatRegistry& registry) {
    DecodedMessage msg;
    msg.label = Label::from_raw_byte(word.label_byte());
    msg.sdi = word.sdi();
    msg.ssm = word.ssm();
    msg.parity_valid = parity_valid(word);

    const std::uint32_t bits = word.data_field();
    const LabelFormat* format = registry.find(msg.label);
    if (format == nullptr) {
        msg.data = Opaque{bits};
        return msg;
    }
    switch (format->format) {
    case DataFormat::bnr: {
        const std::uint32_t pad_mask = (1u << format->padding_bits) - 1;
        msg.data = Bnr{bits >> format->padding_bits, format->padding_bits, bits & pad_mask,
                       format->units};
        break;
    }
    case DataFormat::bcd:
        msg.data = bcd_from_bits(bits);
        break;
    case DataFormat::discrete:
        msg.data = Discrete{bits};
        break;
    }
    return msg;
}

RawWord encode_word(Label label, unsigned sdi, const DataPayload& data, unsigned ssm) {
    if (sdi > 3 || ssm > 3) {
        throw Error(ErrorCode::payload_overflow, "SDI and SSM are 2-bit fields");
    }
    const std::uint32_t body = label.raw_byte() | (sdi << 8) | (payload_bits(data) << 10) |
                               (ssm << 29);
    return with_odd_parity(RawWord(body));
}

RawWord encode_word(const DecodedMessage& message) {
    return encode_word(message.label, message.sdi, message.data, message.ssm);
}

std::string to_hex(RawWord word) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08X", word.value());
    return buf;
}

std::optional<RawWord> parse_hex(std::string_view text) {
    if (text.size() != 8) {
        return std::nullopt;
    }
    std::uint32_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        return std::nullopt;
    }
    return RawWord(value);
}

RawWord parse_hex_or_throw(std::string_view text) {
    if (auto w = parse_hex(text)) {
        return *w;
    }
    throw Error(ErrorCode::malformed_hex, "expected 8 hex digits, got \"" + std::string(text) + "\"");
}

std::string to_binary(RawWord word) {
    std::string out;
    out.reserve(39);
    for (int n = kWordBits; n >= 1; --n) {
        out.push_back(word.bit(n) ? '1' : '0');
        if (n > 1 && (n - 1) % 4 == 0) {
            out.push_back(' ');
        }
    }
    return out;
}

} // namespace arinc429
