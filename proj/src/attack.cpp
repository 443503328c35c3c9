#include "arinc429/attack.hpp"

#include <cmath>

namespace arinc429 {

void GeoFence::validate() const {
    if (!west_of && !south_of) {
        throw Error(ErrorCode::invalid_plan, "geo-fence needs a west_of or south_of bound");
    }
}

bool geofence_triggered(const GeoFence& fence, Position position) {
    return (fence.west_of && position.longitude < -*fence.west_of) ||
           (fence.south_of && position.latitude < *fence.south_of);
}

GeoFenceTrigger::GeoFenceTrigger(GeoFence fence) : fence_(fence) { fence_.validate(); }

bool GeoFenceTrigger::update(Position position) {
    fired_ = fired_ || geofence_triggered(fence_, position);
    return fired_;
}

bool CaptureFilter::matches(RawWord word) const {
    const Label label = Label::from_raw_byte(word.label_byte());
    if (!labels.empty() && !labels.contains(label)) {
        return false;
    }
    return !predicate || predicate(decode_word(word));
}

std::function<bool(const DecodedMessage&)> bit_set_predicate(int arinc_bit) {
    if (arinc_bit < 11 || arinc_bit > 29) {
        throw Error(ErrorCode::invalid_plan, "data bit must be in 11..29");
    }
    return [arinc_bit](const DecodedMessage& msg) {
        return (payload_bits(msg.data) >> (arinc_bit - 11)) & 1u;
    };
}

std::vector<RawWord> record_capture(const BusLog& log, const CaptureFilter& filter) {
    std::vector<RawWord> out;
    for (const auto& entry : log) {
        if (filter.matches(entry.word)) {
            out.push_back(entry.word);
        }
    }
    return out;
}

PlaybackPlan build_playback(std::vector<RawWord> recording, double cadence) {
    if (recording.empty()) {
        throw Error(ErrorCode::empty_recording, "playback needs at least one recorded word");
    }
    if (!(cadence > 0.0) || !std::isfinite(cadence)) {
        throw Error(ErrorCode::invalid_plan, "playback cadence must be positive");
    }
    return PlaybackPlan{std::move(recording), cadence};
}

void validate_plan(const AttackPlan& plan, double bit_rate) {
    const double slot = kWordSlotBits / bit_rate;
    if (const auto* p = std::get_if<PlaybackPlan>(&plan)) {
        build_playback(p->recording, p->cadence);
        if (static_cast<double>(p->recording.size()) * slot > p->cadence) {
            throw Error(ErrorCode::invalid_plan, "playback burst of " +
                                                     std::to_string(p->recording.size()) +
                                                     " words does not fit in one cadence");
        }
    } else if (const auto* s = std::get_if<SpoofPlan>(&plan)) {
        if (!(s->cadence >= slot) || !std::isfinite(s->cadence)) {
            throw Error(ErrorCode::invalid_plan, "spoof cadence must be positive and >= one word slot");
        }
        encode_word(s->message);
    } else {
        const auto& f = std::get<FuzzPlan>(plan);
        if (!(f.parity_valid_fraction >= 0.0 && f.parity_valid_fraction <= 1.0)) {
            throw Error(ErrorCode::invalid_plan, "parity_valid_fraction must be in [0, 1]");
        }
        if (!(f.rate > 0.0) || f.rate > bus_capacity(bit_rate)) {
            throw Error(ErrorCode::invalid_plan, "fuzz rate must be positive and within bus capacity");
        }
    }
}

FuzzGenerator::FuzzGenerator(std::uint64_t seed, double parity_valid_fraction)
    : rng_(seed), fraction_(parity_valid_fraction) {
    if (!(fraction_ >= 0.0 && fraction_ <= 1.0)) {
        throw Error(ErrorCode::invalid_plan, "parity_valid_fraction must be in [0, 1]");
    }
}

RawWord FuzzGenerator::next() {
    const RawWord raw(rng_.next_u32());
    const bool want_valid = rng_.uniform() < fraction_;
    const RawWord odd = with_odd_parity(raw);
    return want_valid ? odd : RawWord(odd.value() ^ 0x80000000u);
}

std::vector<RawWord> fuzz_stream(std::uint64_t seed, std::size_t count,
                                 double parity_valid_fraction) {
    FuzzGenerator gen(seed, parity_valid_fraction);
    std::vector<RawWord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(gen.next());
    }
    return out;
}

AttackRunner::AttackRunner(AttackPlan plan) : plan_(std::move(plan)) {
    if (const auto* p = std::get_if<PlaybackPlan>(&plan_)) {
        interval_ = p->cadence;
    } else if (const auto* s = std::get_if<SpoofPlan>(&plan_)) {
        interval_ = s->cadence;
        spoof_word_ = encode_word(s->message);
    } else {
        const auto& f = std::get<FuzzPlan>(plan_);
        interval_ = 1.0 / f.rate;
        fuzz_.emplace(f.seed, f.parity_valid_fraction);
    }
}

std::vector<RawWord> AttackRunner::next_burst() {
    if (const auto* p = std::get_if<PlaybackPlan>(&plan_)) {
        return p->recording;
    }
    if (fuzz_) {
        return {fuzz_->next()};
    }
    return {spoof_word_};
}

} // namespace arinc429
