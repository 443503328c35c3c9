#include "arinc429/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arinc429/random.hpp"

namespace arinc429 {

namespace {

bool in_slow_band(double rate) { return rate >= kSlowRateMin && rate <= kSlowRateMax; }

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double median(std::vector<double>& values) {
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    double m = *mid;
    if (values.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(values.begin(), mid));
    }
    return m;
}

} // namespace

void TransmitterProfile::validate() const {
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::invalid_profile, "profile \"" + name + "\": " + why);
    };
    if (!(hi_level >= kHiMin && hi_level <= kHiMax)) {
        fail("hi_level " + fmt(hi_level) + " V outside +6.5..+13 V");
    }
    if (!(lo_level <= -kHiMin && lo_level >= -kHiMax)) {
        fail("lo_level " + fmt(lo_level) + " V outside -13..-6.5 V");
    }
    if (!(slew_rate > 0.0) || !std::isfinite(slew_rate)) {
        fail("slew_rate must be positive");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        fail("noise_sigma must be >= 0");
    }
    if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) {
        fail("jitter_sigma must be >= 0");
    }
    if (!in_slow_band(bit_rate) && bit_rate != kFastRate) {
        fail("bit_rate " + fmt(bit_rate) + " not in 12000..14500 or 100000 bit/s");
    }
}

TransmitterProfile TransmitterProfile::egpws() {
    return {"EGPWS", 10.0, -10.0, 5.05, 0.05, 12'500.0, 0.0};
}

TransmitterProfile TransmitterProfile::altadt() {
    return {"AltaDT", 10.0, -10.0, 0.937, 0.05, 12'500.0, 0.0};
}

LineModel::LineModel(RawWord word, const TransmitterProfile& profile,
                     std::span<const double> cell_offsets) {
    const double period = profile.bit_period();
    const double slew = profile.slew_rate * 1e6; // V/s
    word_duration_ = kWordBits * period;

    auto cell_start = [&](int k) {
        const double off = static_cast<std::size_t>(k) < cell_offsets.size() ? cell_offsets[k] : 0.0;
        return k * period + off;
    };

    double t = cell_start(0);
    double v = 0.0;
    vertices_.reserve(4 * kWordBits + 4);
    vertices_.push_back({t, v});

    auto slew_to = [&](double end, double target) {
        if (v != target) {
            const double needed = std::abs(target - v) / slew;
            if (t + needed <= end) {
                t += needed;
                v = target;
                vertices_.push_back({t, v});
            } else {
                v += std::copysign(slew * (end - t), target - v);
                t = end;
                vertices_.push_back({t, v});
                return;
            }
        }
        if (end > t) {
            t = end;
            vertices_.push_back({t, v});
        }
    };

    for (int k = 0; k < kWordBits; ++k) {
        const double start = cell_start(k);
        const double level = word.bit(k + 1) ? profile.hi_level : profile.lo_level;
        slew_to(start + 0.5 * period, level);
        const double next = k + 1 < kWordBits ? cell_start(k + 1) : start + period;
        slew_to(next, 0.0);
    }
    if (v != 0.0) {
        t += std::abs(v) / slew;
        v = 0.0;
        vertices_.push_back({t, v});
    }
}

double LineModel::voltage_at(double t) const {
    if (t <= vertices_.front().time || t >= vertices_.back().time) {
        return t <= vertices_.front().time ? vertices_.front().voltage : vertices_.back().voltage;
    }
    auto it = std::upper_bound(vertices_.begin(), vertices_.end(), t,
                               [](double x, const Vertex& p) { return x < p.time; });
    const Vertex& b = *it;
    const Vertex& a = *(it - 1);
    if (b.time == a.time) {
        return b.voltage;
    }
    return a.voltage + (b.voltage - a.voltage) * (t - a.time) / (b.time - a.time);
}

double LineModel::first_rising_crossing(double level) const {
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const Vertex& a = vertices_[i - 1];
        const Vertex& b = vertices_[i];
        if (a.voltage < level && b.voltage >= level) {
            return a.time + (level - a.voltage) / (b.voltage - a.voltage) * (b.time - a.time);
        }
    }
    return vertices_.front().time;
}

VoltageTrace synthesize_trace(RawWord word, const TransmitterProfile& profile, double sample_rate,
                              std::uint64_t seed, int word_index) {
    profile.validate();
    if (!(sample_rate >= 20.0 * profile.bit_rate)) {
        throw Error(ErrorCode::sample_rate_too_low,
                    fmt(sample_rate) + " Hz is below 20x the bit rate " + fmt(profile.bit_rate));
    }
    Rng rng(seed);
    const double period = profile.bit_period();

    std::vector<double> offsets;
    if (profile.jitter_sigma > 0.0) {
        offsets.resize(kWordBits);
        const double limit = 0.25 * period;
        for (double& off : offsets) {
            off = std::clamp(rng.normal() * profile.jitter_sigma, -limit, limit);
        }
    }
    const LineModel model(word, profile, offsets);
    const double trigger = model.first_rising_crossing(kTriggerLevel);

    const double begin = -period;
    const double end = model.word_duration() + period;
    const auto first = static_cast<long long>(std::ceil((begin - trigger) * sample_rate));
    const auto last = static_cast<long long>(std::floor((end - trigger) * sample_rate));

    VoltageTrace trace;
    trace.sample_rate = sample_rate;
    trace.word_index = word_index;
    trace.samples.reserve(static_cast<std::size_t>(last - first + 1));

    const auto& vx = model.vertices();
    std::size_t seg = 0;
    for (long long i = first; i <= last; ++i) {
        const double rel = static_cast<double>(i) / sample_rate;
        const double t = trigger + rel;
        while (seg < vx.size() && vx[seg].time <= t) {
            ++seg;
        }
        double v = 0.0;
        if (seg == 0) {
            v = vx.front().voltage;
        } else if (seg == vx.size()) {
            v = vx.back().voltage;
        } else {
            const auto& a = vx[seg - 1];
            const auto& b = vx[seg];
            v = a.voltage + (b.voltage - a.voltage) * (t - a.time) / (b.time - a.time);
        }
        if (profile.noise_sigma > 0.0) {
            double z = rng.normal();
            while (std::abs(z) > 5.0) {
                z = rng.normal();
            }
            v += z * profile.noise_sigma;
        }
        trace.samples.push_back({rel, v});
    }
    return trace;
}

TraceDecode decode_trace(const VoltageTrace& trace, double bit_rate) {
    const auto& s = trace.samples;
    if (!(bit_rate > 0.0)) {
        throw Error(ErrorCode::invalid_profile, "bit rate must be positive");
    }
    const double period = 1.0 / bit_rate;

    // Cell grid anchor: the first departure from NULL, extrapolated back to the
    // start of its ramp from the 2.5 V and 5 V crossings.
    auto first_active = std::find_if(s.begin(), s.end(),
                                     [](const Sample& x) { return std::abs(x.voltage) >= kNullMax; });
    if (first_active == s.end()) {
        throw Error(ErrorCode::indeterminate_bit, "bit 1: trace never leaves the NULL band");
    }
    const double sign = first_active->voltage > 0 ? 1.0 : -1.0;
    auto crossing = [&](std::vector<Sample>::const_iterator it, double level) {
        if (it == s.begin()) {
            return it->time;
        }
        const auto& a = *(it - 1);
        const double va = sign * a.voltage;
        const double vb = sign * it->voltage;
        if (vb == va) {
            return it->time;
        }
        return a.time + (level - va) / (vb - va) * (it->time - a.time);
    };
    const double t_null = crossing(first_active, kNullMax);
    double start = t_null;
    auto second = std::find_if(first_active, s.end(), [&](const Sample& x) {
        return sign * x.voltage >= 2.0 * kNullMax || x.time > t_null + 0.5 * period;
    });
    if (second != s.end() && sign * second->voltage >= 2.0 * kNullMax) {
        const double t_mid = crossing(second, 2.0 * kNullMax);
        start = std::max(s.front().time, 2.0 * t_null - t_mid);
    }

    if (s.back().time < start + (kWordBits - 0.5) * period) {
        throw Error(ErrorCode::trace_too_short, "trace does not span 32 bit cells");
    }

    TraceDecode out;
    std::uint32_t value = 0;
    auto by_time = [](const Sample& x, double t) { return x.time < t; };
    for (int k = 0; k < kWordBits; ++k) {
        const double a = start + k * period;
        const double b = a + 0.5 * period;
        auto lo = std::lower_bound(s.begin(), s.end(), a, by_time);
        auto hi = std::lower_bound(lo, s.end(), b, by_time);
        if (lo == hi) {
            throw Error(ErrorCode::trace_too_short, "no samples in bit cell " + std::to_string(k + 1));
        }
        double sum = 0.0;
        for (auto it = lo; it != hi; ++it) {
            sum += it->voltage;
        }
        const double mean = sum / static_cast<double>(hi - lo);
        if (mean >= kHiMin) {
            value |= 1u << k;
        } else if (mean > -kHiMin) {
            throw Error(ErrorCode::indeterminate_bit, "bit " + std::to_string(k + 1) +
                                                          ": active half-cell mean " + fmt(mean) +
                                                          " V");
        }
        out.confidence[k] = std::abs(mean) - kHiMin;
    }
    out.word = RawWord(value);
    out.parity_valid = parity_valid(out.word);
    return out;
}

EdgeFeatures measure_edge(const VoltageTrace& trace) {
    const auto& s = trace.samples;
    if (s.empty()) {
        throw Error(ErrorCode::no_rising_edge, "empty trace");
    }
    const auto [min_it, max_it] = std::minmax_element(
        s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.voltage < b.voltage; });
    const double vmax = max_it->voltage;
    const double vmin = min_it->voltage;
    if (vmax < kNullMax) {
        throw Error(ErrorCode::no_rising_edge, "trace never leaves the NULL band upward");
    }

    EdgeFeatures f;
    // Plateau of the first positive pulse only, so the peak does not depend on
    // how many other bits in the word are ones.
    std::vector<double> level;
    std::size_t i = 0;
    while (s[i].voltage < 0.5 * vmax) {
        ++i;
    }
    for (; i < s.size() && s[i].voltage >= 0.5 * vmax; ++i) {
        level.push_back(s[i].voltage);
    }
    f.hi_peak = median(level);
    if (vmin <= -kNullMax) {
        level.clear();
        for (const auto& x : s) {
            if (x.voltage <= 0.5 * vmin) {
                level.push_back(x.voltage);
            }
        }
        f.lo_peak = median(level);
    }

    const double v10 = 0.1 * f.hi_peak;
    const double v90 = 0.9 * f.hi_peak;
    std::ptrdiff_t last_low = -1;
    std::ptrdiff_t top = -1;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(s.size()); ++i) {
        if (s[i].voltage <= v10) {
            last_low = i;
        } else if (s[i].voltage >= v90 && last_low >= 0) {
            top = i;
            break;
        }
    }
    if (top < 0) {
        throw Error(ErrorCode::no_rising_edge, "no NULL-to-HI transition found");
    }

    double slope = 0.0;
    const std::ptrdiff_t n = top - last_low - 1;
    if (n >= 2) {
        double mt = 0.0;
        double mv = 0.0;
        for (auto i = last_low + 1; i < top; ++i) {
            mt += s[i].time * 1e6;
            mv += s[i].voltage;
        }
        mt /= static_cast<double>(n);
        mv /= static_cast<double>(n);
        double sxy = 0.0;
        double sxx = 0.0;
        for (auto i = last_low + 1; i < top; ++i) {
            const double dt = s[i].time * 1e6 - mt;
            sxy += dt * (s[i].voltage - mv);
            sxx += dt * dt;
        }
        slope = sxx > 0.0 ? sxy / sxx : 0.0;
    } else {
        auto interp = [&](std::ptrdiff_t i, double lvl) {
            const auto& a = s[i];
            const auto& b = s[i + 1];
            return a.time + (lvl - a.voltage) / (b.voltage - a.voltage) * (b.time - a.time);
        };
        const double t10 = interp(last_low, v10);
        const double t90 = interp(top - 1, v90);
        slope = t90 > t10 ? (v90 - v10) / ((t90 - t10) * 1e6) : 0.0;
    }
    if (!(slope > 0.0) || !std::isfinite(slope)) {
        throw Error(ErrorCode::no_rising_edge, "rising edge slope is not positive");
    }
    f.rising_slope = slope;
    f.rise_time_10_90 = 0.8 * f.hi_peak / slope * 1e-6;
    return f;
}

} // namespace arinc429
