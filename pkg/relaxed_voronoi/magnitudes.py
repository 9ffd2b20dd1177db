"""
Per-terminal magnitudes R_1..R_k.

Three policies: a constant R (tree Steiner point removal), 2*e^Z with
Z ~ EXP(c*ddim) (doubling 0-extension), and e^Z with Z ~ EXP(c*ln k)
(connected 0-extension). All randomness is seeded through numpy's PCG64 so a
(seed, k, policy) triple always yields the same vector.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from typing import Literal, Optional, Sequence

import numpy as np

from relaxed_voronoi.config import DEFAULT_C, DEFAULT_SEED
from relaxed_voronoi.errors import InputError

MagnitudeKind = Literal["const", "dexp", "klog"]
Parameterization = Literal["mean", "rate"]


# =============================================================================
# SEEDING
# =============================================================================

def derive_seed(seed: int, role: str, index: int = 0) -> int:
    """
    Derive a 64-bit sub-seed from (seed, role, index) by fixed hashing.

    Every random stream in the library hangs off one user seed through this
    function, so runs are reproducible from a single knob.
    """
    digest = hashlib.blake2b(f"{seed}:{role}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


# =============================================================================
# EXPONENTIAL SAMPLING
# =============================================================================

def exponential_from_uniform(lambda_mean: float, u: float) -> float:
    """Inverse CDF of EXP(lambda_mean) at u in (0, 1]."""
    if lambda_mean <= 0:
        raise InputError(f"exponential mean must be positive, got {lambda_mean}")
    if not 0.0 < u <= 1.0:
        raise InputError(f"uniform draw must lie in (0, 1], got {u}")
    return 0.0 - lambda_mean * math.log(u)


def sample_exponential(lambda_mean: float, rng: np.random.Generator) -> float:
    """
    Draw from EXP(lambda_mean), the exponential distribution with that mean.

    Args:
        lambda_mean: Mean of the distribution (> 0).
        rng: Generator state; advanced by one uniform draw.

    Returns:
        A non-negative sample.
    """
    # rng.random() is in [0, 1); flip it into (0, 1]
    return exponential_from_uniform(lambda_mean, 1.0 - rng.random())


def sample_exponentials(lambda_mean: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized ``sample_exponential``; consumes ``size`` uniform draws."""
    if lambda_mean <= 0:
        raise InputError(f"exponential mean must be positive, got {lambda_mean}")
    return 0.0 - lambda_mean * np.log(1.0 - rng.random(size))


# =============================================================================
# POLICIES
# =============================================================================

@dataclass(frozen=True)
class MagnitudeVector:
    """Magnitudes aligned with the terminal ordering; every entry is >= 1."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise InputError("magnitude vector is empty")
        low = min(self.values)
        if not low >= 1.0:
            raise InputError(f"magnitudes must be >= 1, got {low}")

    @classmethod
    def constant(cls, value: float, k: int) -> MagnitudeVector:
        return cls(tuple([float(value)] * k))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> float:
        return self.values[j]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class MagnitudePolicy:
    """
    How magnitudes are produced.

    ``parameterization`` controls how the exponential's parameter is read:
    ``mean`` treats c*ddim (resp. c*ln k) as the mean of Z, ``rate`` as its
    rate, i.e. the mean becomes 1/(c*ddim).
    """

    kind: MagnitudeKind = "const"
    R: float = 1.0
    c: float = DEFAULT_C
    ddim: float = 1.0
    parameterization: Parameterization = "mean"
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.kind == "const" and not self.R >= 1.0:
            raise InputError(f"constant magnitude must be >= 1, got {self.R}")
        if self.kind in ("dexp", "klog") and not self.c > 0:
            raise InputError(f"c must be positive, got {self.c}")
        if self.kind == "dexp" and not self.ddim > 0:
            raise InputError(f"ddim must be positive, got {self.ddim}")
        if self.parameterization not in ("mean", "rate"):
            raise InputError(f"unknown parameterization {self.parameterization!r}")

    @classmethod
    def constant(cls, R: float, seed: int = DEFAULT_SEED) -> MagnitudePolicy:
        return cls("const", R=R, seed=seed)

    @classmethod
    def doubling_exp(
        cls,
        c: float = DEFAULT_C,
        ddim: float = 1.0,
        seed: int = DEFAULT_SEED,
        parameterization: Parameterization = "mean",
    ) -> MagnitudePolicy:
        return cls("dexp", c=c, ddim=ddim, seed=seed, parameterization=parameterization)

    @classmethod
    def log_k_exp(
        cls,
        c: float = DEFAULT_C,
        seed: int = DEFAULT_SEED,
        parameterization: Parameterization = "mean",
    ) -> MagnitudePolicy:
        return cls("klog", c=c, seed=seed, parameterization=parameterization)

    @classmethod
    def parse(cls, text: str, seed: int = DEFAULT_SEED) -> MagnitudePolicy:
        """
        Parse ``const:<R>``, ``dexp:<c>,<ddim>[,rate]`` or ``klog:<c>[,rate]``.

        Raises:
            InputError: On an unknown or malformed policy.
        """
        name, _, arg = text.strip().partition(":")
        parts = [p.strip() for p in arg.split(",")] if arg else []
        parameterization: Parameterization = "mean"
        if parts and parts[-1] in ("mean", "rate"):
            parameterization = "rate" if parts.pop() == "rate" else "mean"
        try:
            if name == "const" and len(parts) == 1:
                return cls.constant(float(parts[0]), seed=seed)
            if name == "dexp" and len(parts) == 2:
                return cls.doubling_exp(float(parts[0]), float(parts[1]), seed, parameterization)
            if name == "klog" and len(parts) == 1:
                return cls.log_k_exp(float(parts[0]), seed, parameterization)
        except ValueError as e:
            raise InputError(f"bad magnitude policy {text!r}: {e}") from e
        raise InputError(
            f"unknown magnitude policy {text!r}; use const:<R>, dexp:<c>,<ddim>[,rate] or klog:<c>[,rate]"
        )

    def with_seed(self, seed: int) -> MagnitudePolicy:
        return replace(self, seed=seed)

    @property
    def is_deterministic(self) -> bool:
        return self.kind == "const"

    def exponential_mean(self, k: int) -> float:
        """Mean of Z for this policy at k terminals."""
        if self.kind == "dexp":
            scale = self.c * self.ddim
        elif self.kind == "klog":
            # k = 1 is degenerate; keep the scale away from zero
            scale = self.c * max(math.log(k), 1.0)
        else:
            raise InputError("constant magnitudes have no exponential component")
        return scale if self.parameterization == "mean" else 1.0 / scale

    def __str__(self) -> str:
        suffix = ",rate" if self.parameterization == "rate" else ""
        if self.kind == "const":
            return f"const:{self.R:g}"
        if self.kind == "dexp":
            return f"dexp:{self.c:g},{self.ddim:g}{suffix}"
        return f"klog:{self.c:g}{suffix}"


def magnitudes_from_exponents(policy: MagnitudePolicy, exponents: Sequence[float]) -> MagnitudeVector:
    """Map exponent draws Z_j to magnitudes (2*e^Z for dexp, e^Z for klog)."""
    z = np.asarray(exponents, dtype=np.float64)
    if policy.kind == "dexp":
        return MagnitudeVector(tuple((2.0 * np.exp(z)).tolist()))
    if policy.kind == "klog":
        return MagnitudeVector(tuple(np.exp(z).tolist()))
    return MagnitudeVector.constant(policy.R, len(z))


def make_magnitudes(policy: MagnitudePolicy, k: int, seed: Optional[int] = None) -> MagnitudeVector:
    """
    Produce k magnitudes for a policy.

    Args:
        policy: Magnitude policy.
        k: Number of terminals (>= 1).
        seed: Optional override of ``policy.seed``.

    Returns:
        MagnitudeVector aligned with the terminal ordering.
    """
    if k < 1:
        raise InputError(f"need at least one terminal, got k={k}")
    if policy.kind == "const":
        return MagnitudeVector.constant(policy.R, k)

    rng = make_rng(policy.seed if seed is None else seed)
    exponents = sample_exponentials(policy.exponential_mean(k), k, rng)
    return magnitudes_from_exponents(policy, exponents)
