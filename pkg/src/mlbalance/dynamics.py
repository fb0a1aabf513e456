"""Diffusion on signed graphs, evaluated through spectral closed forms.

Altafini consensus  du/dt = -L_A u          ->  u(t) = exp(-t L_A) u0
fractional NC       D^alpha u = -L_chi u    ->  u(t) = E_alpha(-t^alpha L_chi) u0
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import SignedGraph, lerman_ghosh_laplacian, signed_laplacian
from .spectral import check_alpha, ml_scalar, sym_eig


@dataclass(frozen=True)
class DiffusionTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", np.asarray(self.states, dtype=float))

    @property
    def total_mass(self) -> np.ndarray:
        return self.states.sum(axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.states.shape[1]
        w.writerow(["time", *(f"v{i}" for i in range(n)), "total_mass"])
        for t, row, m in zip(self.times, self.states, self.total_mass):
            w.writerow([_fmt(t), *map(_fmt, row), _fmt(m)])
        return buf.getvalue()


@dataclass(frozen=True)
class ConsensusResult:
    t_c: Optional[float]
    final_spread: float
    trajectory: DiffusionTrajectory
    dissensus: bool = False


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _check_u0(g: SignedGraph, u0) -> np.ndarray:
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (g.n,):
        raise ValueError(f"initial state has shape {u0.shape}, expected ({g.n},)")
    return u0


def default_initial_state(n: int) -> np.ndarray:
    """u0_i = i / (n - 1)."""
    return np.arange(n, dtype=float) / max(n - 1, 1)


def random_initial_state(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random(n)


class AltafiniPropagator:
    """Reusable exp(-t L_A) built from one eigendecomposition of L_A."""

    def __init__(self, g: SignedGraph):
        sp = sym_eig(signed_laplacian(g), want_vectors=True)
        self.rates = np.asarray(sp.eigenvalues)
        self.vectors = sp.eigenvectors

    def __call__(self, u0: np.ndarray, t: float) -> np.ndarray:
        if t == 0:
            return np.array(u0, dtype=float)
        return self.vectors @ (np.exp(-t * self.rates) * (self.vectors.T @ u0))


def altafini_evolve(g: SignedGraph, u0, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    u0 = _check_u0(g, u0)
    return AltafiniPropagator(g)(u0, t)


def altafini_trajectory(g: SignedGraph, u0, times: Sequence[float]) -> DiffusionTrajectory:
    u0 = _check_u0(g, u0)
    prop = AltafiniPropagator(g)
    return DiffusionTrajectory(np.asarray(times, float), np.array([prop(u0, t) for t in times]))


def spread(u: np.ndarray) -> float:
    """max_{u,v} |u_v - u_u|."""
    return float(np.max(u) - np.min(u))


def consensus_time(g: SignedGraph, u0=None, tolerance: float = 1e-5, dt: float = 1.0,
                   t_max: float = 1000.0, refine: bool = False,
                   stall_rel: float = 1e-12, stall_steps: int = 10) -> ConsensusResult:
    """First grid time k*dt at which all pairwise state differences are below ``tolerance``.

    The scan stops with ``t_c=None`` at ``t_max``, or earlier with
    ``dissensus=True`` when the spread has changed by less than ``stall_rel``
    (relative) over ``stall_steps`` steps while still above tolerance.  With
    ``refine=True`` the crossing is located by bisection inside the last step.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    u0 = default_initial_state(g.n) if u0 is None else _check_u0(g, u0)
    prop = AltafiniPropagator(g)
    times, states, spreads = [], [], []
    t_c = None
    dissensus = False
    k = 0
    while k * dt <= t_max + 1e-12:
        t = k * dt
        u = prop(u0, t)
        times.append(t)
        states.append(u)
        spreads.append(spread(u))
        if spreads[-1] < tolerance:
            t_c = t
            break
        if k >= stall_steps:
            old = spreads[-1 - stall_steps]
            if abs(old - spreads[-1]) <= stall_rel * old:
                dissensus = True
                break
        k += 1
    if t_c is not None and refine and t_c > 0:
        lo, hi = t_c - dt, t_c
        while hi - lo > 1e-10 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if spread(prop(u0, mid)) < tolerance:
                hi = mid
            else:
                lo = mid
        t_c = hi
    traj = DiffusionTrajectory(np.array(times), np.array(states))
    return ConsensusResult(t_c, spreads[-1], traj, dissensus)


def frac_diffuse(g: SignedGraph, chi: float, alpha: float, u0, t: float) -> np.ndarray:
    """u(t) = E_alpha(-t^alpha L_chi) u0 with L_chi = chi I - A."""
    return frac_trajectory(g, chi, alpha, u0, [t]).states[0]


def frac_trajectory(g: SignedGraph, chi: float, alpha: float, u0, times: Sequence[float]) -> DiffusionTrajectory:
    check_alpha(alpha)
    u0 = _check_u0(g, u0)
    if any(t < 0 for t in times):
        raise ValueError("times must be >= 0")
    sp = sym_eig(lerman_ghosh_laplacian(g, chi), want_vectors=True)
    V = sp.eigenvectors
    coef = V.T @ u0
    states = []
    for t in times:
        if t == 0:
            states.append(np.array(u0))
            continue
        scale = t**alpha
        f = np.array([ml_scalar(alpha, -scale * nu) for nu in sp.eigenvalues])
        states.append(V @ (f * coef))
    return DiffusionTrajectory(np.asarray(times, float), np.array(states))


def mass_series(trajectory: DiffusionTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """(total mass per time, mass(t) - mass(0))."""
    m = trajectory.total_mass
    return m, m - m[0]


def caputo_weights(k: int, alpha: float) -> np.ndarray:
    """Bracket weights of the product-trapezoidal Caputo rule on k equal steps.

    Entry 0 multiplies u'(0) (remote past), entries 1..k-1 multiply u'(t_j)
    (recent past) and entry k multiplies u'(t) (present).
    """
    if k < 1:
        raise ValueError(f"need at least one subinterval, got k={k}")
    check_alpha(alpha)
    b = 2.0 - alpha
    w = np.empty(k + 1)
    w[0] = (k - 1) ** b - (k + alpha - 2.0) * k ** (1.0 - alpha)
    m = k - np.arange(1, k, dtype=float)
    w[1:k] = (m + 1) ** b - 2.0 * m**b + (m - 1) ** b
    w[k] = 1.0
    return w


def caputo_discrete(samples: Sequence[float], alpha: float, h: float) -> float:
    """Approximate Caputo derivative at t = k h from u' sampled at t_j = j h, j = 0..k."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    d = np.asarray(samples, dtype=float)
    k = d.size - 1
    w = caputo_weights(k, alpha)
    return h ** (1.0 - alpha) / math.gamma(3.0 - alpha) * math.fsum(w * d)
