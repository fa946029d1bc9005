"""Chain parameters and atomistic/continuum partitions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidSizeError, PreconditionError


@dataclass(frozen=True)
class ChainModel:
    """Homogeneous periodic chain linearized at a uniform strain.

    ``phi2[r-1]`` holds the second derivative of the pair potential at the
    r-th neighbour distance, for r = 1..R.
    """

    n: int
    phi2: tuple[float, ...]

    def __post_init__(self):
        phi2 = tuple(float(c) for c in np.atleast_1d(self.phi2))
        object.__setattr__(self, "phi2", phi2)
        if len(phi2) < 2:
            raise PreconditionError(f"cutoff R must be >= 2, got {len(phi2)}")
        if not np.all(np.isfinite(phi2)):
            raise PreconditionError("coefficients must be finite")
        if self.n < 4 or self.n <= 2 * len(phi2):
            raise InvalidSizeError(
                f"chain size n={self.n} must satisfy n >= 4 and n > 2R = {2 * len(phi2)}"
            )

    @property
    def r_cut(self) -> int:
        return len(self.phi2)

    @property
    def w2(self) -> float:
        """Cauchy-Born modulus, sum of r^2 * phi2_r."""
        r = np.arange(1, self.r_cut + 1)
        return float(np.dot(r**2, self.phi2))

    @property
    def phi_f(self) -> float:
        return self.phi2[0]

    @property
    def phi_2f(self) -> float:
        return self.phi2[1]

    @property
    def is_nonpositive(self) -> bool:
        """All r >= 2 coefficients are <= 0 and the outermost one is < 0."""
        tail = np.asarray(self.phi2[1:])
        return bool(np.all(tail <= 0) and tail[-1] < 0)

    def with_n(self, n: int) -> ChainModel:
        return replace(self, n=n)


@dataclass(frozen=True)
class RegionMask:
    """Boolean indicator of the atomistic sites (True) on the chain."""

    atomistic: np.ndarray = field(repr=False)

    def __post_init__(self):
        chi = np.array(self.atomistic, dtype=bool).ravel()
        chi.setflags(write=False)
        object.__setattr__(self, "atomistic", chi)

    @classmethod
    def block(cls, n: int, size: int) -> RegionMask:
        """Contiguous atomistic block of ``size`` sites centred in the chain."""
        if not 0 <= size <= n:
            raise InvalidSizeError(f"block size {size} outside [0, {n}]")
        chi = np.zeros(n, dtype=bool)
        start = (n - size) // 2
        chi[start:start + size] = True
        return cls(chi)

    @classmethod
    def fraction(cls, n: int, rho: float, seed: int = 0) -> RegionMask:
        """``round(rho * n)`` atomistic sites drawn without replacement."""
        if not 0.0 <= rho <= 1.0:
            raise PreconditionError(f"fraction rho={rho} outside [0, 1]")
        rng = np.random.default_rng(seed)
        chi = np.zeros(n, dtype=bool)
        chi[rng.choice(n, size=int(round(rho * n)), replace=False)] = True
        return cls(chi)

    @classmethod
    def from_indices(cls, n: int, indices) -> RegionMask:
        chi = np.zeros(n, dtype=bool)
        chi[np.asarray(indices, dtype=int)] = True
        return cls(chi)

    @classmethod
    def all_atomistic(cls, n: int) -> RegionMask:
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def all_continuum(cls, n: int) -> RegionMask:
        return cls(np.zeros(n, dtype=bool))

    @property
    def n(self) -> int:
        return self.atomistic.size

    @property
    def n_atomistic(self) -> int:
        return int(self.atomistic.sum())

    @property
    def continuum(self) -> np.ndarray:
        return ~self.atomistic

    def roll(self, shift: int) -> RegionMask:
        return RegionMask(np.roll(self.atomistic, shift))

    def __eq__(self, other):
        if not isinstance(other, RegionMask):
            return NotImplemented
        return np.array_equal(self.atomistic, other.atomistic)

    def __hash__(self):
        return hash(self.atomistic.tobytes())
