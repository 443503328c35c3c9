#!/usr/bin/env python3
"""Regenerate the stacked voltage-trace fixtures.

Written independently of the C++ synthesizer: a plain trapezoid RZ model,
oscilloscope-style exponent formatting and a fixed random seed.
"""
import random
import sys
from pathlib import Path

BIT_RATE = 12_500.0
SAMPLE_RATE = 500e3


def odd_parity(w):
    return w | 0x80000000 if bin(w & 0x7FFFFFFF).count("1") % 2 == 0 else w & 0x7FFFFFFF


def voltage(word, t, slew):
    period = 1.0 / BIT_RATE
    half = period / 2
    if t < 0:
        return 0.0
    cell = min(int(t // period), 31)
    u = t - cell * period
    level = 10.0 if (word >> cell) & 1 else -10.0
    if u < half:
        mag = min(10.0, slew * u)
    else:
        mag = max(0.0, 10.0 - slew * (u - half))
    return mag if level > 0 else -mag


def trigger(word, slew):
    for k in range(32):
        if (word >> k) & 1:
            return k / BIT_RATE + 2.5 / slew
    return 0.0


def write(path, header, words, slew, noise, rng):
    period = 1.0 / BIT_RATE
    lines = [header]
    index = 0
    for n, word in enumerate(words, start=1):
        t0 = trigger(word, slew)
        first = int(-(t0 + period) * SAMPLE_RATE)
        last = int((33 * period - t0) * SAMPLE_RATE)
        for i in range(first, last + 1):
            rel = i / SAMPLE_RATE
            v = voltage(word, rel + t0, slew) + rng.gauss(0.0, noise)
            lines.append(f"{index},{rel:.6e},{v:.6e},{n}")
            index += 1
    path.write_text("\n".join(lines) + "\n")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    rng = random.Random(429)
    warning = 0x0000041D
    egpws = [odd_parity(0x0000001D | (rng.getrandbits(19) << 10)) for _ in range(9)] + [warning]
    write(out / "egpws_like.csv", "Index,Time (s),Voltage (V),Word", egpws, 5.05e6, 0.05, rng)
    write(out / "altadt_like.csv", "[Index],Time (s),Voltage (V),Word", [warning] * 3, 0.937e6, 0.05, rng)


if __name__ == "__main__":
    main()
