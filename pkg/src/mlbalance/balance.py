"""Walk-based balance indices of signed graphs.

All traces are taken from eigenvalues: Tr f(M) = sum_j f(lambda_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln

from .errors import MLOverflowError
from .graph import SignedGraph, abs_adjacency, adjacency
from .spectral import (
    GROUP_TOL,
    MLParams,
    Spectrum,
    check_alpha,
    ml_log_scalar,
    ml_scalar,
    ml_trace,
    sym_eig,
)

# |num - den| <= tol * den reports the index as exactly 1, with
# tol = max(UNIT_SNAP, SNAP_ULPS * eps * kappa) and kappa the growth rate of
# log E_alpha at the top of the unsigned spectrum (see ``snap_tolerance``)
UNIT_SNAP = 1e-12
SNAP_ULPS = 64

DEFAULT_GRID = tuple(round(0.40 + 0.02 * i, 2) for i in range(31))


@dataclass(frozen=True)
class BalanceReport:
    index: float
    numerator_trace: float
    denominator_trace: float
    positive_part: float
    negative_part: float
    params: Union[MLParams, float]


@dataclass(frozen=True)
class MomentLedger:
    """Truncated signed/unsigned spectral moment series up to power ``r``.

    ``r`` is the power actually reached, which is below ``requested_r`` when a
    Gamma-scaled moment left floating-point range.
    """

    r: int
    requested_r: int
    alpha: float
    signed_moments: tuple[float, ...]
    unsigned_moments: tuple[float, ...]
    partial_ratios: tuple[float, ...]


@lru_cache(maxsize=256)
def graph_spectra(g: SignedGraph, group_tol: float = GROUP_TOL) -> tuple[Spectrum, Spectrum]:
    """Spectra of A and |A| (cached; graphs are immutable)."""
    return sym_eig(adjacency(g), group_tol=group_tol), sym_eig(abs_adjacency(g), group_tol=group_tol)


def snap_tolerance(mu_1: float, params: Union[MLParams, float]) -> float:
    """Relative tolerance under which the index is reported as exactly 1.

    Eigenvalues of A and |A| agree only to rounding on a balanced graph, and
    E_alpha magnifies that: d log E_alpha(z) / dz ~ z^(1/alpha - 1) / alpha, so
    a relative eigenvalue error eps shows up as ~eps z^(1/alpha) / alpha in the
    log trace.  ``params`` is an MLParams or the beta of K(G, beta).
    """
    if isinstance(params, MLParams):
        z = params.gamma * abs(mu_1)
        kappa = z ** (1.0 / params.alpha) / params.alpha
    else:
        kappa = float(params) * abs(mu_1)
    return max(UNIT_SNAP, SNAP_ULPS * float(np.finfo(float).eps) * max(1.0, kappa))


def _report(num: float, den: float, params, mu_1: float) -> BalanceReport:
    if not (math.isfinite(num) and math.isfinite(den)):
        raise MLOverflowError("balance index traces overflow")
    if abs(num - den) <= snap_tolerance(mu_1, params) * den:
        # balanced up to rounding: no negative walk weight at all
        return BalanceReport(1.0, num, den, den, 0.0, params)
    # the negative part is a sum of nonnegative walk weights
    return BalanceReport(num / den, num, den, (den + num) / 2.0, max(0.0, (den - num) / 2.0), params)


def k_exp(g: SignedGraph, beta: float = 1.0) -> BalanceReport:
    """K(G, beta) = Tr exp(beta A) / Tr exp(beta |A|)."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    lam, mu = graph_spectra(g)
    with np.errstate(over="ignore"):
        num = math.fsum(np.exp(beta * lam.eigenvalues))
        den = math.fsum(np.exp(beta * mu.eigenvalues))
    if not math.isfinite(den):
        raise MLOverflowError(f"Tr exp(beta |A|) overflows for beta={beta:g}")
    return _report(num, den, float(beta), float(mu.eigenvalues[0]))


def k_ml(g: SignedGraph, params: Optional[MLParams] = None) -> BalanceReport:
    """K_alpha^gamma = Tr E_alpha(gamma A) / Tr E_alpha(gamma |A|)."""
    params = params or MLParams(1.0)
    lam, mu = graph_spectra(g)
    return _report(ml_trace(lam, params), ml_trace(mu, params), params, float(mu.eigenvalues[0]))


def k_ml_cycle_analytic(n: int, params: MLParams) -> float:
    """K_alpha^gamma of an unbalanced n-cycle from the closed-form cycle spectra."""
    if n < 3:
        raise ValueError(f"cycle length must be >= 3, got {n}")
    k = np.arange(1, n + 1)
    num = math.fsum(ml_scalar(params.alpha, params.gamma * 2 * math.cos((2 * j + 1) * math.pi / n)) for j in k)
    return num / cycle_denominator(n, params)


def cycle_denominator(n: int, params: MLParams) -> float:
    """sum_{k=1..n} E_alpha(2 gamma cos(2 pi k / n)), the trace for the balanced n-cycle."""
    return math.fsum(
        ml_scalar(params.alpha, params.gamma * 2 * math.cos(2 * j * math.pi / n)) for j in range(1, n + 1)
    )


def moment_ledger(g: SignedGraph, alpha: float, r: int) -> MomentLedger:
    """Spectral moments Tr(A^k)/Gamma(alpha k + 1) and Tr(|A|^k)/Gamma(alpha k + 1), k = 0..r."""
    check_alpha(alpha)
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    lam, mu = graph_spectra(g)
    lv, mv = np.asarray(lam.eigenvalues), np.asarray(mu.eigenvalues)
    signed, unsigned, ratios = [], [], []
    cum_s: list[float] = []
    cum_u: list[float] = []
    for k in range(r + 1):
        lg = gammaln(alpha * k + 1.0)
        with np.errstate(over="ignore", under="ignore"):
            # scale each power by the Gamma factor in log space before summing
            ts = _scaled_powers(lv, k, lg)
            tu = _scaled_powers(mv, k, lg)
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(tu))):
            break
        try:
            s_k, u_k = math.fsum(ts), math.fsum(tu)
            math.fsum(signed + [s_k]), math.fsum(unsigned + [u_k])
        except OverflowError:
            break
        signed.append(s_k)
        # Tr(|A|^k) counts closed walks, so a negative value is pure rounding
        unsigned.append(max(0.0, u_k))
        cum_s.append(math.fsum(signed))
        cum_u.append(math.fsum(unsigned))
        ratios.append(cum_s[-1] / cum_u[-1])
    return MomentLedger(len(signed) - 1, r, alpha, tuple(signed), tuple(unsigned), tuple(ratios))


def _scaled_powers(vals: np.ndarray, k: int, log_gamma: float) -> np.ndarray:
    if k == 0:
        return np.ones_like(vals) / math.exp(log_gamma)
    mag = np.abs(vals)
    out = np.zeros_like(vals)
    nz = mag > 0
    out[nz] = np.exp(k * np.log(mag[nz]) - log_gamma)
    if k % 2:
        out *= np.sign(vals)
    return out


@dataclass(frozen=True)
class GapApprox:
    approx: float
    exact: float
    relative_error: float
    multiplicity: int


def k_ml_gap_approx(g: SignedGraph, params: MLParams, group_tol: float = GROUP_TOL) -> GapApprox:
    """Leading-eigenvalue approximation m_1 E_alpha(gamma lambda_1) / E_alpha(gamma mu_1).

    Evaluated in log space so that it survives arguments where the full traces
    overflow, and the relative error is formed from the log ratio so it stays
    meaningful when both indices underflow.  It is NaN only when the exact
    index is exactly zero.
    """
    lam, mu = graph_spectra(g, group_tol)
    m1 = lam.leading_multiplicity
    la = ml_log_scalar(params.alpha, params.gamma * float(lam.eigenvalues[0]))
    lb = ml_log_scalar(params.alpha, params.gamma * float(mu.eigenvalues[0]))
    log_approx = math.log(m1) + la - lb
    log_exact = _log_index(g, params, group_tol)
    if log_exact == -math.inf:
        return GapApprox(math.exp(log_approx), 0.0, math.nan, m1)
    err = abs(math.expm1(log_approx - log_exact))
    return GapApprox(math.exp(log_approx), _snap_log(log_exact, snap_tolerance(float(mu.eigenvalues[0]), params)), err, m1)


def _log_index(g: SignedGraph, params: MLParams, group_tol: float = GROUP_TOL) -> float:
    lam, mu = graph_spectra(g, group_tol)

    def log_trace(sp):
        logs = []
        rest = []
        for v in sp.eigenvalues:
            z = params.gamma * float(v)
            if z > 0:
                logs.append(ml_log_scalar(params.alpha, z))
            else:
                rest.append(ml_scalar(params.alpha, z))
        top = max(logs) if logs else 0.0
        total = math.fsum([math.exp(x - top) for x in logs] + [x * math.exp(-top) for x in rest])
        return top + math.log(total) if total > 0 else -math.inf

    return log_trace(lam) - log_trace(mu)


def _snap_log(log_k: float, tol: float) -> float:
    return 1.0 if abs(log_k) <= tol else math.exp(log_k)


def k_ml_log(g: SignedGraph, params: MLParams, group_tol: float = GROUP_TOL) -> float:
    """K_alpha^gamma computed from log-scaled traces; agrees with ``k_ml`` where that is finite."""
    _, mu = graph_spectra(g, group_tol)
    return _snap_log(_log_index(g, params, group_tol), snap_tolerance(float(mu.eigenvalues[0]), params))


def alpha_c(g: SignedGraph, gamma: Optional[float] = None, threshold: float = 0.1,
            grid: Optional[Sequence[float]] = None) -> Optional[float]:
    """First alpha, scanning a descending grid, at which the gap approximation's
    relative error drops below ``threshold``.  ``None`` if it never does.

    gamma follows Gamma(alpha + 1) per grid point unless fixed.
    """
    grid = list(grid) if grid is not None else [round(1.0 - 0.01 * i, 2) for i in range(95)]
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be strictly descending")
    for a in grid:
        if k_ml_gap_approx(g, MLParams(a, gamma)).relative_error < threshold:
            return a
    return None


def balance_profile(g: SignedGraph, grid: Iterable[float] = DEFAULT_GRID,
                    gamma: Optional[float] = None) -> list[tuple[float, float]]:
    """(alpha, K_alpha) pairs; gamma = Gamma(alpha + 1) per point unless fixed.

    Points whose traces overflow are taken from the log-space index.
    """
    out = []
    for a in grid:
        p = MLParams(a, gamma)
        try:
            out.append((a, k_ml(g, p).index))
        except MLOverflowError:
            out.append((a, k_ml_log(g, p)))
    return out


def relative_spectral_gap(g: SignedGraph) -> float:
    """(lambda_1 - lambda_2) / lambda_1 of the signed adjacency (distinct leading values)."""
    lam, _ = graph_spectra(g)
    vals = [v for v, _ in lam.groups]
    if len(vals) < 2 or vals[0] <= 0:
        return 0.0
    return (vals[0] - vals[1]) / vals[0]
