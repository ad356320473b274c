"""Deterministic seeding and the stream generator used by every run.

The generator is SplitMix64 (Steele, Lea & Flood's published 64-bit
generator): the state advances by the odd constant 0x9E3779B97F4A7C15 per
draw and each output is the finalizer

    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27; z *= 0x94D049BB133111EB
    z ^= z >> 31

with all arithmetic mod 2**64. Because the state walk is linear, a batch of
n draws equals n sequential draws, which the tick kernels rely on. Ports in
other languages that reproduce these two formulas reproduce every run log
bit for bit.

Seed derivation absorbs each input into the state with one mix per field:

    state = mix(master)
    for v in fields: state = mix(state + GOLDEN + v)   (mod 2**64)

so runs at neighboring (strategy, count, rep) coordinates get unrelated
streams.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a 64-bit bijection with strong avalanche."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_stream(master: int, *fields: int) -> int:
    """Absorb integer fields into a seed; pure function of its inputs."""
    state = mix64(master)
    for v in fields:
        state = mix64((state + GOLDEN + (v & _MASK64)) & _MASK64)
    return state


def derive_run_seed(master_seed: int, strategy_id: int, drone_count: int, rep_index: int) -> int:
    """Seed for one (strategy, drone count, repetition) run of a sweep."""
    return derive_stream(master_seed, strategy_id, drone_count, rep_index)


class RngHandle:
    """One SplitMix64 draw stream. Identical stream_seed, identical draws."""

    __slots__ = ("stream_seed", "_state")

    def __init__(self, stream_seed: int) -> None:
        self.stream_seed = stream_seed & _MASK64
        self._state = self.stream_seed

    @property
    def state(self) -> int:
        return self._state

    @state.setter
    def state(self, value: int) -> None:
        self._state = value & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK64
        return mix64(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi); 53 significant bits."""
        return lo + (hi - lo) * ((self.next_u64() >> 11) * _INV53)

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller transform on two uniform draws; always consumes two."""
        u1 = (self.next_u64() >> 11) * _INV53
        u2 = (self.next_u64() >> 11) * _INV53
        if u1 <= 0.0:
            u1 = _INV53
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def clone(self) -> "RngHandle":
        fresh = RngHandle(self.stream_seed)
        fresh._state = self._state
        return fresh


# Stream purposes for one run; spaced so no purpose collides with a drone index.
STREAM_RUGBY = 1
STREAM_CHANNEL = 2
STREAM_DRONE_BASE = 1000


def rugby_stream(run_seed: int) -> RngHandle:
    return RngHandle(derive_stream(run_seed, STREAM_RUGBY))


def channel_stream(run_seed: int) -> RngHandle:
    return RngHandle(derive_stream(run_seed, STREAM_CHANNEL))


def drone_stream(run_seed: int, drone_id: int) -> RngHandle:
    return RngHandle(derive_stream(run_seed, STREAM_DRONE_BASE + drone_id))
