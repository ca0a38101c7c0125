"""Fused numerical kernel for the pairwise-likelihood sum.

The composite-likelihood objective spends essentially all its time averaging
bivariate normal densities over a (pairs x QMC-nodes) quantile matrix; this
module provides a numba-compiled single-pass kernel for the correlation
families with cheap closed forms (Gaussian limit, Matern 1/2 and 3/2) and a
numpy fallback for arbitrary Matern shape.
"""

from __future__ import annotations

import numpy as np

from .spatial import GaussianLimit, Matern, correlation

KIND_GAUSS = 0
KIND_MATERN_HALF = 1
KIND_MATERN_3HALF = 2
KIND_GENERIC = -1

_LOG2PI = float(np.log(2.0 * np.pi))
_CORR_CAP = 1.0 - 1e-12


def kind_code(kind) -> int:
    if isinstance(kind, GaussianLimit):
        return KIND_GAUSS
    if isinstance(kind, Matern):
        if kind.kappa == 0.5:
            return KIND_MATERN_HALF
        if kind.kappa == 1.5:
            return KIND_MATERN_3HALF
    return KIND_GENERIC


def _head_sum_py(Q, zi, zj, vi, vj, sig2, phi, code):  # pragma: no cover - jitted
    npairs, B = Q.shape
    total = 0.0
    vals = np.empty(B)
    for p in range(npairs):
        a = vi[p]
        b = vj[p]
        cap = _CORR_CAP * np.sqrt(a * b)
        mx = -1e300
        for k in range(B):
            x = Q[p, k] / phi
            if code == KIND_GAUSS:
                rho = np.exp(-x * x)
            elif code == KIND_MATERN_HALF:
                rho = np.exp(-x)
            else:
                rho = (1.0 + x) * np.exp(-x)
            c = sig2 * rho
            if c > cap:
                c = cap
            det = a * b - c * c
            lp = -_LOG2PI - 0.5 * np.log(det) - 0.5 * (
                b * zi[p] * zi[p] - 2.0 * c * zi[p] * zj[p] + a * zj[p] * zj[p]
            ) / det
            vals[k] = lp
            if lp > mx:
                mx = lp
        acc = 0.0
        for k in range(B):
            acc += np.exp(vals[k] - mx)
        total += mx + np.log(acc / B)
    return total


try:  # numba is a hard dependency, but keep a pure path for safety
    import numba

    _head_sum_jit = numba.njit(cache=True, fastmath=False)(_head_sum_py)
except ImportError:  # pragma: no cover
    _head_sum_jit = None


def _head_sum_numpy(Q, zi, zj, vi, vj, sig2, phi, rho):
    """Vectorized fallback; `rho` is the precomputed correlation matrix."""
    c = np.minimum(sig2 * rho, _CORR_CAP * np.sqrt(vi * vj)[:, None])
    a = vi[:, None]
    b = vj[:, None]
    det = a * b - c**2
    lp = (
        -_LOG2PI
        - 0.5 * np.log(det)
        - 0.5 * (b * zi[:, None] ** 2 - 2.0 * c * zi[:, None] * zj[:, None] + a * zj[:, None] ** 2) / det
    )
    mx = lp.max(axis=1, keepdims=True)
    return float(np.sum(mx[:, 0] + np.log(np.mean(np.exp(lp - mx), axis=1))))


def head_sum(Q, zi, zj, vi, vj, sig2, phi, kind) -> float:
    """Sum over pairs of log{(1/B) sum_b phi2(yi, yj; cov = sig2 rho(Q[p,b]/phi))}.

    zi, zj are mean-subtracted outcomes, vi, vj the per-observation marginal
    variances (sig2 + tau2 / n_i).
    """
    if Q.shape[0] == 0:
        return 0.0
    code = kind_code(kind)
    if code != KIND_GENERIC and _head_sum_jit is not None:
        return float(
            _head_sum_jit(
                np.ascontiguousarray(Q, dtype=np.float64),
                np.ascontiguousarray(zi, dtype=np.float64),
                np.ascontiguousarray(zj, dtype=np.float64),
                np.ascontiguousarray(vi, dtype=np.float64),
                np.ascontiguousarray(vj, dtype=np.float64),
                float(sig2),
                float(phi),
                code,
            )
        )
    rho = correlation(kind, Q, phi)
    return _head_sum_numpy(Q, zi, zj, vi, vj, float(sig2), float(phi), rho)
