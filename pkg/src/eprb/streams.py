"""Counter-mode random streams.

Every stream is identified by ``(master_seed, trial, wing, role)``. Its key
is a BLAKE2b hash of that tuple and its i-th draw is SplitMix64 applied to
``key + i * golden_gamma``. Nothing depends on generation order, so trials
can be computed by any worker in any order and still yield the same log.
"""

from __future__ import annotations

import hashlib
import struct
from enum import IntEnum

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / (1 << 53)


class Role(IntEnum):
    SOURCE = 0
    SETTING = 1
    RESPONSE = 2


# Wing 0 denotes the source / a joint responder; wings 1 and 2 are the detectors.
SOURCE_WING = 0


def _splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


_pack = struct.Struct("<QQBB").pack


def derive_key(master_seed: int, trial: int, wing: int, role: int) -> int:
    digest = hashlib.blake2b(_pack(master_seed, trial, wing, role), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Stream:
    """One independent stream of uniforms. The key is derived on first use."""

    __slots__ = ("master_seed", "trial", "wing", "role", "draws", "_key")

    def __init__(self, master_seed: int, trial: int, wing: int, role: Role):
        self.master_seed = master_seed
        self.trial = trial
        self.wing = wing
        self.role = role
        self.draws = 0
        self._key: int | None = None

    @property
    def ident(self) -> tuple[int, int, Role]:
        return (self.trial, self.wing, self.role)

    def next_u64(self) -> int:
        if self._key is None:
            self._key = derive_key(self.master_seed, self.trial, self.wing, self.role)
        x = _splitmix64((self._key + self.draws * _GAMMA) & _MASK)
        self.draws += 1
        return x

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        key = self._key
        if key is None:
            key = self._key = derive_key(self.master_seed, self.trial, self.wing, self.role)
        x = (key + self.draws * _GAMMA + _GAMMA) & _MASK
        self.draws += 1
        # SplitMix64 finalizer, inlined: this is the per-trial hot path
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
        return ((x ^ (x >> 31)) >> 11) * _INV_2_53

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def __repr__(self) -> str:
        return f"Stream(trial={self.trial}, wing={self.wing}, role={self.role.name}, draws={self.draws})"


class RngStreams:
    """Factory for the per-trial streams of one experiment."""

    def __init__(self, master_seed: int):
        if not 0 <= master_seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {master_seed}")
        self.master_seed = master_seed

    def stream(self, trial: int, wing: int, role: Role) -> Stream:
        return Stream(self.master_seed, trial, wing, role)

    def source(self, trial: int) -> Stream:
        return Stream(self.master_seed, trial, SOURCE_WING, Role.SOURCE)

    def setting(self, trial: int, wing: int) -> Stream:
        return Stream(self.master_seed, trial, wing, Role.SETTING)

    def response(self, trial: int, wing: int) -> Stream:
        return Stream(self.master_seed, trial, wing, Role.RESPONSE)
