"""Symmetric spectra and scalar Mittag-Leffler machinery.

Everything here is real-valued: the matrices are symmetric, so spectra are
real, and the Mittag-Leffler function is only evaluated on the real axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gammaln

from .errors import MLOverflowError

GROUP_TOL = 1e-8

# largest x with exp(x) finite in double precision
_LOG_MAX = math.log(np.finfo(float).max)
_EPS = np.finfo(float).eps
# relative accuracy the negative-axis Taylor path must be able to deliver
_TAYLOR_REL = 1e-12
# beyond this z^(1/alpha) the algebraic tail of E_alpha(z) is invisible in log space
_ASYMPTOTIC_LOG_ARG = 800.0


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a real symmetric matrix, eigenvalues descending.

    ``groups`` lists ``(value, multiplicity)`` for clusters of eigenvalues that
    lie within ``group_tol * max(1, |lambda_1|)`` of their neighbour.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    groups: tuple[tuple[float, int], ...] = field(default=())

    @property
    def order(self) -> int:
        return len(self.eigenvalues)

    @property
    def leading_multiplicity(self) -> int:
        return self.groups[0][1] if self.groups else 0


@dataclass(frozen=True)
class MLParams:
    """Memory parameter ``alpha`` in (0, 1] and argument scale ``gamma`` > 0.

    ``gamma`` defaults to Gamma(alpha + 1).
    """

    alpha: float
    gamma: Optional[float] = None

    def __post_init__(self):
        check_alpha(self.alpha)
        if self.gamma is None:
            object.__setattr__(self, "gamma", math.gamma(self.alpha + 1.0))
        elif not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")


def check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def group_eigenvalues(values: Sequence[float], tol: float = GROUP_TOL) -> tuple[tuple[float, int], ...]:
    """Cluster descending eigenvalues; neighbours closer than the gap tolerance merge."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        return ()
    gap = tol * max(1.0, float(np.max(np.abs(vals))))
    groups = []
    start = 0
    for i in range(1, vals.size + 1):
        if i == vals.size or abs(vals[i - 1] - vals[i]) > gap:
            groups.append((float(np.mean(vals[start:i])), i - start))
            start = i
    return tuple(groups)


def sym_eig(M: np.ndarray, want_vectors: bool = False, group_tol: float = GROUP_TOL) -> Spectrum:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    asym = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    if want_vectors:
        w, V = np.linalg.eigh(M)
        w, V = w[::-1].copy(), V[:, ::-1].copy()
        V.setflags(write=False)
    else:
        w = np.linalg.eigvalsh(M)[::-1].copy()
        V = None
    w.setflags(write=False)
    return Spectrum(w, V, group_eigenvalues(w, group_tol))


# ---------------------------------------------------------------------------
# scalar Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1)


def _log_terms(alpha: float, x: float):
    """Yield successive chunks of log|x^k / Gamma(alpha k + 1)| for x > 0.

    Stops once the terms are past their peak and 40 e-folds below it.
    """
    lx = math.log(x)
    start, chunk = 0, 256
    peak = -math.inf
    while True:
        k = np.arange(start, start + chunk, dtype=float)
        lt = k * lx - gammaln(alpha * k + 1.0)
        peak = max(peak, float(lt.max()))
        yield lt
        last = lt[-1]
        if last < lt[-2] and last < peak - 40.0:
            return
        start += chunk
        chunk = min(chunk * 2, 1 << 16)


def _log_ml_positive(alpha: float, x: float) -> float:
    """log E_alpha(x) for x > 0: all series terms are positive, sum in log space."""
    lt = np.concatenate(list(_log_terms(alpha, x)))
    top = float(lt.max())
    return top + math.log(math.fsum(np.exp(lt - top)))


def _ml_negative_taylor(alpha: float, x: float) -> tuple[float, float]:
    """Alternating series for E_alpha(-x); returns (value, largest |term|)."""
    lt = np.concatenate(list(_log_terms(alpha, x)))
    top = float(lt.max())
    if top > _LOG_MAX:
        return math.nan, math.inf
    terms = np.exp(lt)
    terms[1::2] *= -1.0
    return math.fsum(terms), math.exp(top)


def _ml_negative_integral(alpha: float, x: float) -> float:
    """E_alpha(-x), 0 < alpha < 1, from its completely monotone representation.

    E_alpha(-x) = sin(pi a)/(pi a) * int_0^inf x exp(-u^(1/a)) / (u^2 + 2 u x cos(pi a) + x^2) du

    The integrand is positive, so there is no cancellation for any x.  The
    denominator equals (u - u0)^2 + w^2 with u0 = -x cos(pi a), w = x sin(pi a);
    for a > 1/2 this is a Lorentzian peak that narrows to a pole as a -> 1.
    Its constant part is integrated in closed form and quad only sees the
    second difference e(u0 + h) + e(u0 - h) - 2 e(u0), which stays bounded.
    """
    # 1 - alpha is exact near 1, pi * alpha is not
    s = math.sin(math.pi * (1.0 - alpha))
    c = -math.cos(math.pi * (1.0 - alpha))
    inv = 1.0 / alpha
    u0, w = -x * c, x * s

    def e(u):
        return math.exp(-(u**inv))

    def f(u):
        return x * e(u) / ((u - u0) ** 2 + w * w)

    upper = (-math.log(np.finfo(float).tiny)) ** alpha
    opts = dict(limit=500, epsabs=0.0, epsrel=1e-13)
    if not 0.0 < u0 < upper:
        pts = sorted(p for p in {1.0, x} if 0.0 < p < upper)
        val, _ = quad(f, 0.0, upper, points=pts or None, **opts)
        return s / (math.pi * alpha) * val

    d = 0.5 * min(u0, upper - u0)
    e0 = e(u0)

    def second_diff(h):
        return x * (e(u0 + h) + e(u0 - h) - 2.0 * e0) / (h * h + w * w)

    # near alpha = 1 the second difference is rounding noise below the peak
    # term, which quad reports as a roundoff warning; the result is still fine
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        parts = [quad(second_diff, 0.0, d, **opts)[0]]
    if u0 - d > 0.0:
        pts = [p for p in (1.0,) if 0.0 < p < u0 - d]
        parts.append(quad(f, 0.0, u0 - d, points=pts or None, **opts)[0])
    parts.append(quad(f, u0 + d, upper, **opts)[0])
    # x e0 * int_{-d}^{d} dh / (h^2 + w^2) times s / (pi a), with x s / w = 1
    peak = 2.0 * e0 * math.atan(d / w) / (math.pi * alpha)
    return peak + s / (math.pi * alpha) * math.fsum(parts)


def ml_scalar(alpha: float, z: float) -> float:
    """Mittag-Leffler function E_alpha(z) for real z and 0 < alpha <= 1.

    Positive z: the series is summed in log space (no cancellation); returns
    ``inf`` once the value leaves double range.  Negative z: the alternating
    series is used only while its largest term is small enough relative to the
    known lower bound 1/(1 + Gamma(1 - alpha) |z|) to keep ~1e-12 relative
    accuracy; otherwise the value comes from a positive integral representation.
    """
    check_alpha(alpha)
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        try:
            return math.exp(z)
        except OverflowError:
            return math.inf
    if z > 0.0:
        if not _peak_log_term(alpha, z) <= _LOG_MAX:
            return math.inf
        lv = _log_ml_positive(alpha, z)
        return math.exp(lv) if lv < _LOG_MAX else math.inf
    x = -z
    lower = 1.0 / (1.0 + math.gamma(1.0 - alpha) * x)
    # cheap pre-check on the peak term before summing anything
    if _peak_log_term(alpha, x) + math.log(64 * _EPS) < math.log(_TAYLOR_REL * lower):
        val, biggest = _ml_negative_taylor(alpha, x)
        if 64 * _EPS * biggest <= _TAYLOR_REL * lower:
            return val
    return _ml_negative_integral(alpha, x)


def _peak_log_term(alpha: float, x: float) -> float:
    # maximiser of k log x - lgamma(alpha k + 1) sits near alpha k ~ x^(1/alpha)
    k0 = x ** (1.0 / alpha) / alpha
    ks = np.unique(np.clip(np.round([k0 - 1, k0, k0 + 1, 0.0]), 0, None))
    return float(np.max(ks * math.log(x) - gammaln(alpha * ks + 1.0)))


def ml_log_scalar(alpha: float, z: float) -> float:
    """log E_alpha(z); finite far beyond the range where ``ml_scalar`` overflows."""
    check_alpha(alpha)
    if z > 0.0:
        if alpha == 1.0:
            return float(z)
        if z ** (1.0 / alpha) > _ASYMPTOTIC_LOG_ARG:
            # E_alpha(z) = exp(z^(1/alpha)) / alpha * (1 + O(exp(-z^(1/alpha)) z^(1/alpha)))
            return z ** (1.0 / alpha) - math.log(alpha)
        return _log_ml_positive(alpha, float(z))
    return math.log(ml_scalar(alpha, z))


def ml_trace(spectrum: Spectrum, params: MLParams) -> float:
    """Tr E_alpha(gamma M) = sum_j E_alpha(gamma lambda_j)."""
    vals = [ml_scalar(params.alpha, params.gamma * lam) for lam in spectrum.eigenvalues]
    total = math.fsum(vals) if all(map(math.isfinite, vals)) else math.inf
    if not math.isfinite(total):
        raise MLOverflowError(
            f"Tr E_{params.alpha:g}(gamma M) overflows for gamma={params.gamma:g}, "
            f"lambda_max={float(spectrum.eigenvalues[0]):g}"
        )
    return total


def ml_matrix(M: np.ndarray, params: MLParams) -> np.ndarray:
    """E_alpha(gamma M) for symmetric M via its eigendecomposition."""
    sp = sym_eig(M, want_vectors=True)
    f = np.array([ml_scalar(params.alpha, params.gamma * lam) for lam in sp.eigenvalues])
    if not np.all(np.isfinite(f)):
        raise MLOverflowError("E_alpha(gamma M) overflows")
    V = sp.eigenvectors
    return (V * f) @ V.T


def frac_bessel(nu: int, alpha: float, z: float) -> float:
    """Fractional modified Bessel function of the first kind.

    sum_k (2k+nu)! / (Gamma(alpha (2k+nu) + 1) k! (k+nu)!) (z/2)^(2k+nu)

    All terms share the sign of z**nu, so the sum is done in log space.
    Returns +/-inf on overflow.
    """
    if int(nu) != nu or nu < 0:
        raise ValueError(f"nu must be a nonnegative integer, got {nu}")
    check_alpha(alpha)
    nu = int(nu)
    if z == 0.0:
        return 1.0 if nu == 0 else 0.0
    sign = -1.0 if (z < 0 and nu % 2) else 1.0
    lh = math.log(abs(z) / 2.0)
    pieces = []
    start, chunk, peak = 0, 256, -math.inf
    while True:
        k = np.arange(start, start + chunk, dtype=float)
        p = 2.0 * k + nu
        lt = gammaln(p + 1.0) - gammaln(alpha * p + 1.0) - gammaln(k + 1.0) - gammaln(k + nu + 1.0) + p * lh
        pieces.append(lt)
        peak = max(peak, float(lt.max()))
        if lt[-1] < lt[-2] and lt[-1] < peak + math.log(1e-12) - 10.0:
            break
        start += chunk
    lt = np.concatenate(pieces)
    top = float(lt.max())
    lv = top + math.log(math.fsum(np.exp(lt - top)))
    if lv >= _LOG_MAX:
        return sign * math.inf
    return sign * math.exp(lv)
