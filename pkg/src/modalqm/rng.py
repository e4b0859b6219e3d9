"""Counter-based random streams.

Every random draw in the package is a pure function of ``(seed, stream,
counter)`` through the splitmix64 finalizer.  Nothing depends on call
order, so work split across threads or processes reproduces serial
results bit for bit.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z):
    """splitmix64 finalizer on a Python int, result in [0, 2**64)."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix64_array(z):
    # uint64 arithmetic wraps modulo 2**64, which is exactly what we want
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed, stream):
    """Stable 64-bit seed for sub-stream ``stream`` of ``seed``."""
    return mix64(mix64(int(seed) & _MASK) ^ (int(stream) & _MASK))


def uniform(seed, stream, counter):
    """The ``counter``-th uniform in [0, 1) of the given stream."""
    bits = mix64(derive_seed(seed, stream) ^ (int(counter) & _MASK))
    return (bits >> 11) * 2.0**-53


def uniform_block(seed, n_streams, n_counters, first_stream=0):
    """Uniforms for streams ``first_stream..first_stream+n_streams-1``.

    Returns an array of shape ``(n_streams, n_counters)`` whose entry
    ``[s, t]`` equals ``uniform(seed, first_stream + s, t)``.
    """
    root = np.uint64(mix64(int(seed) & _MASK))
    streams = np.arange(first_stream, first_stream + n_streams, dtype=np.uint64)
    keys = _mix64_array(root ^ streams)
    counters = np.arange(n_counters, dtype=np.uint64)
    bits = _mix64_array(keys[:, None] ^ counters[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


class CounterRNG:
    """Sequential view of one stream; exposes ``random()`` like numpy's Generator."""

    def __init__(self, seed, stream=0):
        self.seed = int(seed)
        self.stream = int(stream)
        self.counter = 0

    def random(self):
        u = uniform(self.seed, self.stream, self.counter)
        self.counter += 1
        return u


def numpy_generator(seed, stream):
    """A numpy Generator seeded from sub-stream ``stream`` of ``seed``."""
    return np.random.default_rng(derive_seed(seed, stream))
