"""Physical and cache-state types for the two-user cache-aided NOMA downlink.

Signal layout used everywhere in the package: a power or rate 4-vector is
ordered ``(i1, i2, j1, j2)``, i.e. ``(x_A1, x_A2, x_B1, x_B2)``.  UE ``i``
requests file A, UE ``j`` requests file B, and UE ``i`` is the strong user.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

# index of each codeword in a 4-vector
A1, A2, B1, B2 = 0, 1, 2, 3
SIGNAL_NAMES = ("A1", "A2", "B1", "B2")
SIGNAL_INDEX = {name: k for k, name in enumerate(SIGNAL_NAMES)}
OWN_SIGNALS = {"i": (A1, A2), "j": (B1, B2)}
# signals left at each receiver after cache-enabled interference cancellation
RESIDUAL_SIGNALS = {"i": (A1, A2, B2), "j": (A2, B1, B2)}

DISTANCE_FLOOR_KM = 1e-3


class UnsupportedCaseError(ValueError):
    """Raised when an operation only defined for cache Case I gets another case."""


class DegenerateChannelError(ValueError):
    pass


def capacity(gamma):
    """AWGN spectral efficiency ``log2(1 + gamma)`` in bit/s/Hz.

    Works on scalars and numpy arrays; negative SINR is a domain error.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError(f"SINR must be non-negative, got {gamma!r}")
    out = np.log2(1.0 + g)
    if out.ndim == 0:
        return float(out)
    return out


def effective_noise(channel_gain_sq: float, noise_power: float) -> float:
    """Noise level normalized by the channel power gain, ``sigma^2 / |h|^2``."""
    if channel_gain_sq <= 0:
        raise DegenerateChannelError(f"channel gain must be positive, got {channel_gain_sq}")
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    return noise_power / channel_gain_sq


@dataclass(frozen=True)
class ChannelState:
    alpha_i: float
    alpha_j: float
    power_budget: float
    bandwidth_hz: float = 1.0

    def __post_init__(self):
        if not (self.alpha_i > 0 and self.alpha_j > 0):
            raise ValueError("effective noise levels must be positive")
        if not self.power_budget > 0:
            raise ValueError("power budget must be positive")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth must be positive")
        if not self.alpha_i < self.alpha_j:
            raise ValueError(
                f"UE i must be the strong user (alpha_i < alpha_j), got "
                f"{self.alpha_i} >= {self.alpha_j}"
            )

    @property
    def alpha_gap(self) -> float:
        return self.alpha_j - self.alpha_i

    def alpha(self, user: str) -> float:
        return self.alpha_i if user == "i" else self.alpha_j


class CacheCase(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class CacheConfig:
    """Cached fractions ``c_kf`` and file sizes in bits.

    ``cache_capacity_bits`` is an optional ``(C_i, C_j)`` pair used only to
    validate the placement.
    """

    c_ia: float
    c_ib: float
    c_ja: float
    c_jb: float
    v_a_bits: float
    v_b_bits: float
    cache_capacity_bits: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for name in ("c_ia", "c_ib", "c_ja", "c_jb"):
            c = getattr(self, name)
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"{name}={c} outside [0, 1]")
        if self.v_a_bits < 0 or self.v_b_bits < 0:
            raise ValueError("file sizes must be non-negative")
        if self.cache_capacity_bits is not None:
            cap_i, cap_j = self.cache_capacity_bits
            used_i = self.c_ia * self.v_a_bits + self.c_ib * self.v_b_bits
            used_j = self.c_ja * self.v_a_bits + self.c_jb * self.v_b_bits
            # relative slack for float rounding of the products
            if used_i > cap_i * (1 + 1e-12) or used_j > cap_j * (1 + 1e-12):
                raise ValueError("cached content exceeds the per-user cache size")

    def swapped(self) -> "CacheConfig":
        """Exchange user labels and file labels together (i<->j, A<->B)."""
        cap = self.cache_capacity_bits
        return CacheConfig(
            c_ia=self.c_jb,
            c_ib=self.c_ja,
            c_ja=self.c_ib,
            c_jb=self.c_ia,
            v_a_bits=self.v_b_bits,
            v_b_bits=self.v_a_bits,
            cache_capacity_bits=None if cap is None else (cap[1], cap[0]),
        )


class DeliveryLoad(NamedTuple):
    """Bits still owed per codeword, ordered like the power vector."""

    beta_i1: float
    beta_i2: float
    beta_j1: float
    beta_j2: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def user_total(self, user: str) -> float:
        return self.beta_i1 + self.beta_i2 if user == "i" else self.beta_j1 + self.beta_j2


class PowerAlloc(NamedTuple):
    p_i1: float
    p_i2: float
    p_j1: float
    p_j2: float


class RateAlloc(NamedTuple):
    r_i1: float
    r_i2: float
    r_j1: float
    r_j2: float


def check_power(p: Sequence[float], ch: ChannelState, tol: float = 1e-9) -> np.ndarray:
    """Return ``p`` as an array after checking non-negativity and the budget."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"power allocation must have 4 entries, got shape {arr.shape}")
    scale = max(1.0, ch.power_budget)
    if np.any(arr < -tol * scale):
        raise ValueError(f"negative power in {arr}")
    if arr.sum() > ch.power_budget + tol * scale:
        raise ValueError(f"power allocation {arr} exceeds budget {ch.power_budget}")
    return arr


def classify_cache_case(cfg: CacheConfig) -> CacheCase:
    # ties favour Case I: the requester of a file counts as its min-holder
    j_max_a = cfg.c_ja >= cfg.c_ia
    i_max_b = cfg.c_ib >= cfg.c_jb
    if j_max_a and i_max_b:
        return CacheCase.I
    if i_max_b:
        return CacheCase.II
    if j_max_a:
        return CacheCase.III
    return CacheCase.IV


def split_files(cfg: CacheConfig) -> DeliveryLoad:
    """Bits each codeword must carry under Case-I prefix caching.

    ``beta_k1`` is the part of the requested file held only by the other UE
    (usable there for interference cancellation); ``beta_k2`` is the part
    cached nowhere.
    """
    case = classify_cache_case(cfg)
    if case is not CacheCase.I:
        raise UnsupportedCaseError(f"delivery is only implemented for Case I, got Case {case.value}")
    cmax_a = max(cfg.c_ia, cfg.c_ja)
    cmax_b = max(cfg.c_ib, cfg.c_jb)
    return DeliveryLoad(
        beta_i1=(cmax_a - cfg.c_ia) * cfg.v_a_bits,
        beta_i2=(1.0 - cmax_a) * cfg.v_a_bits,
        beta_j1=(cmax_b - cfg.c_jb) * cfg.v_b_bits,
        beta_j2=(1.0 - cmax_b) * cfg.v_b_bits,
    )


def offload_load(cfg: CacheConfig, cached: bool = True) -> Tuple[float, float]:
    """Per-user bits for the baselines, which only offload cache hits."""
    if not cached:
        return cfg.v_a_bits, cfg.v_b_bits
    return (1.0 - cfg.c_ia) * cfg.v_a_bits, (1.0 - cfg.c_jb) * cfg.v_b_bits


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt) + 30.0
