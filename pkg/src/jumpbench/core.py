"""Bitstrings, unitation and the OneMax / Jump_k / Jump_{k,delta} fitness maps.

All jump functions depend on a bitstring only through its unitation (number of
one-bits), so every fitness evaluation here is O(1) on a cached count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Bitstring",
    "JumpInstance",
    "NO_IMPROVEMENT",
    "classic_jump_fitness",
    "fitness_of_unitation",
    "gap",
    "hamming_distance",
    "jump_fitness",
    "onemax_instance",
]

#: Returned by :func:`gap` for the global optimum, which has no fitter point.
NO_IMPROVEMENT = None


@dataclass(frozen=True, eq=False)
class Bitstring:
    """A fixed-length bitstring with a cached unitation.

    ``bits`` is a read-only ``uint8`` array of zeros and ones. Use
    :meth:`from_bits` to build one from arbitrary input; the plain constructor
    trusts the given unitation so mutation operators can update it
    incrementally.
    """

    bits: np.ndarray
    unitation: int = field(default=-1)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        if self.unitation < 0:
            object.__setattr__(self, "unitation", int(np.count_nonzero(bits)))

    @classmethod
    def from_bits(cls, bits) -> "Bitstring":
        arr = np.array(bits, dtype=np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("bitstring entries must be 0 or 1")
        return cls(arr, int(np.count_nonzero(arr)))

    @classmethod
    def zeros(cls, n: int) -> "Bitstring":
        return cls(np.zeros(n, dtype=np.uint8), 0)

    @classmethod
    def ones(cls, n: int) -> "Bitstring":
        return cls(np.ones(n, dtype=np.uint8), n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Bitstring":
        """Uniform sample from {0,1}^n."""
        from jumpbench._kernels import random_bits

        return cls.from_bits(random_bits(rng, n))

    @classmethod
    def random_at_level(cls, n: int, unitation: int, rng: np.random.Generator) -> "Bitstring":
        """Uniform sample among the bitstrings with exactly ``unitation`` ones."""
        from jumpbench._kernels import random_bits_at_level

        if not 0 <= unitation <= n:
            raise ValueError(f"unitation {unitation} outside [0, {n}]")
        return cls(random_bits_at_level(rng, n, unitation), unitation)

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.n

    def recount(self) -> int:
        return int(np.count_nonzero(self.bits))

    def check(self) -> None:
        """Raise if the cached unitation disagrees with a recount."""
        actual = self.recount()
        if actual != self.unitation:
            raise AssertionError(f"cached unitation {self.unitation} != recount {actual}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bitstring):
            return NotImplemented
        return self.unitation == other.unitation and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class JumpInstance:
    """Parameters of Jump_{k,delta} on n bits.

    The valley consists of the unitation levels ``n-k+1 .. n-k+delta-1``;
    ``ell = k - delta`` is the number of levels above the valley below the
    optimum. ``k == delta`` gives the classic Jump_k, ``k == delta == 1`` gives
    OneMax.
    """

    n: int
    k: int
    delta: int

    def __post_init__(self):
        for name in ("n", "k", "delta"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 1 <= self.delta <= self.k <= self.n:
            raise ValueError(
                f"need 1 <= delta <= k <= n, got n={self.n}, k={self.k}, delta={self.delta}"
            )

    @property
    def ell(self) -> int:
        return self.k - self.delta

    @property
    def local_optimum_level(self) -> int:
        return self.n - self.k

    @property
    def above_valley_level(self) -> int:
        """Lowest unitation level strictly fitter than the local optimum."""
        return self.n - self.k + self.delta

    @property
    def is_onemax(self) -> bool:
        return self.delta == 1

    def in_valley(self, u: int) -> bool:
        return self.n - self.k < u < self.n - self.k + self.delta

    def fitness_table(self) -> np.ndarray:
        """Fitness of every unitation level 0..n as an int64 array."""
        u = np.arange(self.n + 1, dtype=np.int64)
        valley = (u > self.n - self.k) & (u < self.n - self.k + self.delta)
        return np.where(valley, -u, u)


def onemax_instance(n: int) -> JumpInstance:
    return JumpInstance(n, 1, 1)


def fitness_of_unitation(inst: JumpInstance, u: int) -> int:
    if inst.n - inst.k < u < inst.n - inst.k + inst.delta:
        return -u
    return u


def jump_fitness(inst: JumpInstance, x: Bitstring) -> int:
    """Jump_{k,delta}(x): the unitation, negated inside the valley."""
    if x.n != inst.n:
        raise ValueError(f"bitstring length {x.n} does not match n={inst.n}")
    return fitness_of_unitation(inst, x.unitation)


def classic_jump_fitness(n: int, k: int, x: Bitstring) -> int:
    """Jump_k, i.e. Jump_{k,k}."""
    return jump_fitness(JumpInstance(n, k, k), x)


def hamming_distance(x: Bitstring, y: Bitstring) -> int:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")
    return int(np.count_nonzero(x.bits != y.bits))


def gap(inst: JumpInstance, u: int) -> int | None:
    """Distance from a point of unitation ``u`` to the closest strictly fitter point.

    Any level ``v`` is reachable from level ``u`` at Hamming distance exactly
    ``|u - v|``, so the minimum over points reduces to a minimum over levels.
    Returns :data:`NO_IMPROVEMENT` at the global optimum.
    """
    if not 0 <= u <= inst.n:
        raise ValueError(f"unitation {u} outside [0, {inst.n}]")
    table = inst.fitness_table()
    better = np.flatnonzero(table > table[u])
    if better.size == 0:
        return NO_IMPROVEMENT
    return int(np.min(np.abs(better - u)))
