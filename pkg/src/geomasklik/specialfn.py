"""Special functions and low-discrepancy sequence primitives.

Thin validated wrappers around scipy.special plus a base-b radical-inverse
(Halton / van der Corput) generator.  Only the orders and domains needed by
the rest of the library are supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


def bessel_i(order: int, x) -> float | np.ndarray:
    """Modified Bessel function of the first kind, I_0 or I_1."""
    if order not in (0, 1):
        raise ValueError(f"bessel_i supports order 0 or 1, got {order}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ValueError("bessel_i requires finite x >= 0")
    out = special.i0(x) if order == 0 else special.i1(x)
    return float(out) if out.ndim == 0 else out


def bessel_k(order: float, x) -> float | np.ndarray:
    """Modified Bessel function of the second kind K_order, fractional order allowed."""
    if order <= 0:
        raise ValueError(f"bessel_k requires order > 0, got {order}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("bessel_k requires finite x > 0")
    out = special.kv(order, x)
    return float(out) if out.ndim == 0 else out


def log_gamma(x) -> float | np.ndarray:
    """Natural log of the Gamma function for x > 0."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("log_gamma requires finite x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def radical_inverse(index, base: int = 2) -> float | np.ndarray:
    """Radical inverse of `index` in the given base (van der Corput digit flip)."""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    idx = np.asarray(index)
    if np.any(idx < 0):
        raise ValueError("index must be non-negative")
    i = idx.astype(np.int64).copy()
    out = np.zeros(i.shape, dtype=float)
    f = 1.0 / base
    while np.any(i > 0):
        out += f * (i % base)
        i //= base
        f /= base
    return float(out) if out.ndim == 0 else out


@dataclass
class HaltonSequence:
    """Stateful 1-D Halton stream; index 1 is the first emitted term.

    Index 0 (which maps to 0.0) is skipped so every emitted value lies
    strictly in (0, 1).
    """

    base: int = 2
    index: int = 1

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.index < 1:
            self.index = 1


def halton_next(seq: HaltonSequence) -> float:
    """Emit the radical inverse of the current index and advance the stream."""
    val = radical_inverse(seq.index, seq.base)
    seq.index += 1
    return val


def halton_nodes(n: int, base: int = 2) -> np.ndarray:
    """First n Halton terms (indices 1..n) as an array; all values in (0, 1)."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    return radical_inverse(np.arange(1, n + 1), base)
