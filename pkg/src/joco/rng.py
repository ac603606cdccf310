"""Counter-based pseudo-random streams for reproducible runs.

Every random draw in a run comes from a stream identified by
(seed, tag). A stream's i-th raw word is

    word(i) = mix64(key + (i + 1) * GOLDEN)          (all mod 2^64)
    key     = mix64(mix64(seed + GOLDEN) ^ fnv1a64(tag))

where mix64 is the SplitMix64 finalizer
(z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
 z *= 0x94D049BB133111EB; z ^= z >> 31)
and fnv1a64 is FNV-1a over the UTF-8 bytes of the tag. Uniform doubles
take the top 53 bits: u = (word >> 11) * 2^-53. Standard normals use
Box-Muller on pairs of uniforms: a request for n normals consumes
2 * ceil(n / 2) words (first half of the block feeds the radius term,
second half the angle term).

Because the words are a pure function of (seed, tag, counter), streams are
independent across tags, reproducible across processes, and insensitive to
scheduling. Reference outputs live in data/rng_test_vectors.txt.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_U64_GOLDEN = np.uint64(GOLDEN)
_U64_MIX1 = np.uint64(_MIX1)
_U64_MIX2 = np.uint64(_MIX2)
_INV_2_53 = 1.0 / float(1 << 53)


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


def stream_key(seed: int, tag: str) -> int:
    return mix64(mix64((seed & MASK64) + GOLDEN) ^ fnv1a64(tag.encode("utf-8")))


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps mod 2^64, matching the scalar path
    z = z ^ (z >> np.uint64(30))
    z = z * _U64_MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * _U64_MIX2
    return z ^ (z >> np.uint64(31))


class CounterRng:
    """One sequentially-consumed stream of a (seed, tag) pair."""

    def __init__(self, seed: int, tag: str):
        self.seed = seed
        self.tag = tag
        self.key = stream_key(seed, tag)
        self.counter = 0

    def next_words(self, n: int) -> np.ndarray:
        """The next n raw 64-bit words as a uint64 array."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix64_array(np.uint64(self.key) + idx * _U64_GOLDEN)

    def next_uint64(self) -> int:
        return int(self.next_words(1)[0])

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        words = self.next_words(n)
        return (words >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def normals(self, n: int) -> np.ndarray:
        """n standard normal doubles via Box-Muller."""
        m = (n + 1) // 2
        words = self.next_words(2 * m)
        # shift into (0, 1] so the log is finite
        u1 = ((words[:m] >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_2_53
        u2 = (words[m:] >> np.uint64(11)).astype(np.float64) * _INV_2_53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def uniform_box(self, lower: np.ndarray, upper: np.ndarray, n: int) -> np.ndarray:
        """n points uniform in an axis-aligned box; shape (n, d)."""
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        d = lower.shape[0]
        u = self.uniforms(n * d).reshape(n, d)
        return lower + u * (upper - lower)


class RunRng:
    """Per-run factory of named streams, one per component tag.

    Streams are cached: asking twice for the same tag continues the same
    sequence. Tags in use: "sobol" (scramble seed for the quasi-random
    initialization), "model-init" (encoder weights), "acquire" (candidate
    draws and posterior samples), "random-search".
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._streams: dict[str, CounterRng] = {}

    def stream(self, tag: str) -> CounterRng:
        if tag not in self._streams:
            self._streams[tag] = CounterRng(self.seed, tag)
        return self._streams[tag]
