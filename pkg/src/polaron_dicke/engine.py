"""Polaron-frame Lindblad propagation for two driven emitters.

The reduced state is a 4x4 density matrix in the fixed collective basis
(GG, Psi_S, Psi_A, XX).  The master equation is

    drho/dt = -i [H_pulse(t), rho] + Gamma_S L[sigma_S] rho + Gamma_A L[sigma_A] rho

with L[O] rho = O rho O^dag - {O^dag O, rho}/2, the collective lowering
operators sigma_S (GG<-Psi_S<-XX) and sigma_A (GG<-Psi_A<-XX, with a sign),
and an optional Gaussian Rabi drive on the symmetric transition.  When
``drive_renorm`` is set (the default) the Rabi envelope is multiplied by
kappa, the polaron dressing of the transition dipole.

This numerical route is the independent check on the closed forms in
:mod:`polaron_dicke.analytic` and the only route to finite-length pulses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .bath import BathProfile

__all__ = [
    "BASIS_LABELS",
    "SIGMA_S",
    "SIGMA_A",
    "PulseEnvelope",
    "IntegratorConfig",
    "Trajectory",
    "PropagationError",
    "basis_state",
    "check_state",
    "gaussian_envelope",
    "lindblad_rhs",
    "propagate",
    "drive_then_decay",
    "fit_exponential",
]

BASIS_LABELS = ("GG", "S", "A", "XX")

# <GG|sigma_S|Psi_S> = <Psi_S|sigma_S|XX> = 1
SIGMA_S = np.zeros((4, 4))
SIGMA_S[0, 1] = 1.0
SIGMA_S[1, 3] = 1.0
# <GG|sigma_A|Psi_A> = 1, <Psi_A|sigma_A|XX> = -1
SIGMA_A = np.zeros((4, 4))
SIGMA_A[0, 2] = 1.0
SIGMA_A[2, 3] = -1.0

_H_DRIVE = SIGMA_S + SIGMA_S.T  # sigma_S^+ + sigma_S^-

# fraction of the pulse width used as step cap inside the pulse window
PULSE_STEP_DIVISOR = 50
PULSE_WINDOW_SIGMAS = 4.0


class PropagationError(RuntimeError):
    """The integrator failed; the message carries the solver diagnostics."""


def basis_state(label: str) -> np.ndarray:
    """Density matrix of a collective basis state ("GG", "S", "A" or "XX")."""
    idx = BASIS_LABELS.index(label)
    rho = np.zeros((4, 4), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def check_state(rho: np.ndarray, herm_tol=1e-12, trace_tol=1e-9, eig_tol=1e-9):
    """Validate Hermiticity, unit trace and positivity of a two-emitter state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("state must be a 4x4 matrix")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > herm_tol:
        raise ValueError(f"state is not Hermitian (deviation {herm:.2e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"state trace {tr!r} is not 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -eig_tol:
        raise ValueError(f"state has negative eigenvalue {lo:.2e}")
    return rho


@dataclass(frozen=True)
class PulseEnvelope:
    """Gaussian Rabi drive: area A (rad), width sigma (ps), centre t_c (ps).

    The centre defaults to 3 sigma, which keeps more than 99.5% of the
    pulse area inside t > 0.
    """

    area: float
    width: float
    center: float | None = None

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("pulse width must be positive")
        if self.center is None:
            object.__setattr__(self, "center", 3.0 * self.width)

    @classmethod
    def from_fwhm(cls, area: float, fwhm: float, center: float | None = None) -> "PulseEnvelope":
        return cls(area=area, width=fwhm / math.sqrt(8.0 * math.log(2.0)), center=center)

    @property
    def fwhm(self) -> float:
        return self.width * math.sqrt(8.0 * math.log(2.0))

    def window(self, n_sigmas: float = PULSE_WINDOW_SIGMAS) -> tuple[float, float]:
        return self.center - n_sigmas * self.width, self.center + n_sigmas * self.width


def gaussian_envelope(pulse: PulseEnvelope, t):
    """Rabi frequency Omega(t) = A / (sqrt(2 pi) sigma) exp(-(t-t_c)^2 / 2 sigma^2)."""
    t = np.asarray(t, dtype=float)
    out = (
        pulse.area
        / (math.sqrt(2.0 * math.pi) * pulse.width)
        * np.exp(-((t - pulse.center) ** 2) / (2.0 * pulse.width**2))
    )
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class IntegratorConfig:
    """Propagation method and tolerances.

    Inside the pulse window [t_c - 4 sigma, t_c + 4 sigma] the effective
    step is additionally capped at sigma/50 so the envelope is resolved.
    """

    method: str = "rk45-adaptive"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float | None = None

    def __post_init__(self):
        if self.method not in ("rk45-adaptive", "rk4-fixed"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("integrator tolerances must be positive")


@dataclass
class Trajectory:
    """Propagation result on an output grid, with per-point diagnostics.

    ``populations`` holds the reported diagonal (tiny negatives in
    [-1e-9, 0) clamped to zero and the row renormalised; the raw states
    are kept untouched in ``states``).  ``n`` is p_sym + p_asym + 2 p_xx.
    """

    t: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    n: np.ndarray
    trace_error: np.ndarray
    herm_error: np.ndarray
    min_eigenvalue: np.ndarray
    n_norm: np.ndarray | None = None
    intensity: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def n_max(self) -> float:
        return float(self.n.max())

    def population(self, label: str) -> np.ndarray:
        return self.populations[:, BASIS_LABELS.index(label)]


def lindblad_rhs(
    state: np.ndarray,
    t: float,
    profile: BathProfile,
    pulse: Optional[PulseEnvelope] = None,
    drive_renorm: bool = True,
) -> np.ndarray:
    """Right-hand side of the polaron-frame master equation at time t."""
    rho = np.asarray(state, dtype=complex)
    out = np.zeros_like(rho)
    if pulse is not None:
        om = gaussian_envelope(pulse, t)
        if drive_renorm:
            om *= profile.kappa
        h = 0.5 * om * _H_DRIVE
        out += -1j * (h @ rho - rho @ h)
    for rate, op in ((profile.rate_sym, SIGMA_S), (profile.rate_asym, SIGMA_A)):
        if rate == 0.0:
            continue
        od_o = op.T @ op  # operators are real
        out += rate * (op @ rho @ op.T - 0.5 * (od_o @ rho + rho @ od_o))
    return out


def _segments(t0, t1, pulse, cfg):
    """Split [t0, t1] so the pulse window gets the sigma/50 step cap."""
    base = cfg.max_step if cfg.max_step is not None else np.inf
    if pulse is None:
        return [(t0, t1, base)]
    w0, w1 = pulse.window()
    w0, w1 = max(t0, w0), min(t1, w1)
    if w1 <= w0:
        return [(t0, t1, base)]
    cap = min(base, pulse.width / PULSE_STEP_DIVISOR)
    segs = []
    if w0 > t0:
        segs.append((t0, w0, base))
    segs.append((w0, w1, cap))
    if t1 > w1:
        segs.append((w1, t1, base))
    return segs


def _rk4_segment(fun, a, b, y, t_out, h_cap):
    """Classic fixed-step RK4 from a to b, recording values at t_out."""
    h_cap = min(h_cap, b - a) if np.isfinite(h_cap) else b - a
    recorded = []
    t_nodes = np.unique(np.concatenate([t_out, [a, b]]))
    t_nodes = t_nodes[(t_nodes >= a) & (t_nodes <= b)]
    t_prev = a
    for t_next in t_nodes:
        span = t_next - t_prev
        if span > 0:
            n_sub = max(1, int(math.ceil(span / h_cap)))
            h = span / n_sub
            for i in range(n_sub):
                tt = t_prev + i * h
                k1 = fun(tt, y)
                k2 = fun(tt + 0.5 * h, y + 0.5 * h * k1)
                k3 = fun(tt + 0.5 * h, y + 0.5 * h * k2)
                k4 = fun(tt + h, y + h * k3)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if t_next in t_out:
            recorded.append((t_next, y.copy()))
        t_prev = t_next
    return y, recorded


def propagate(
    init: np.ndarray,
    profile: BathProfile,
    pulse: Optional[PulseEnvelope] = None,
    t_grid=None,
    cfg: IntegratorConfig | None = None,
    drive_renorm: bool = True,
) -> Trajectory:
    """Propagate ``init`` over ``t_grid`` and collect per-point diagnostics."""
    cfg = cfg or IntegratorConfig()
    if t_grid is None:
        raise ValueError("t_grid is required")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least 2 points")
    rho0 = check_state(init)

    def fun(t, y):
        return lindblad_rhs(y.reshape(4, 4), t, profile, pulse, drive_renorm).ravel()

    t0, t1 = float(t_grid[0]), float(t_grid[-1])
    states = {0: rho0.copy()} if t_grid[0] == t0 else {}
    y = rho0.ravel().copy()
    index_of = {t: i for i, t in enumerate(t_grid)}
    for a, b, cap in _segments(t0, t1, pulse, cfg):
        wanted = t_grid[(t_grid > a) & (t_grid <= b)]
        if cfg.method == "rk4-fixed":
            h_cap = cap if np.isfinite(cap) else (t_grid[1] - t_grid[0])
            y, recorded = _rk4_segment(fun, a, b, y, wanted, h_cap)
            for tt, yy in recorded:
                states[index_of[tt]] = yy.reshape(4, 4)
        else:
            t_eval = np.unique(np.concatenate([wanted, [b]]))
            sol = solve_ivp(
                fun,
                (a, b),
                y,
                method="RK45",
                t_eval=t_eval,
                rtol=cfg.rel_tol,
                atol=cfg.abs_tol,
                max_step=cap,
            )
            if not sol.success:
                raise PropagationError(
                    f"integration failed on [{a:g}, {b:g}] ps: {sol.message}"
                )
            for tt, yy in zip(sol.t, sol.y.T):
                if tt in index_of:
                    states[index_of[tt]] = yy.reshape(4, 4)
            y = sol.y[:, -1]

    rho_t = np.stack([states[i] for i in range(t_grid.size)])
    return _make_trajectory(t_grid, rho_t, profile, pulse, cfg, drive_renorm)


def _make_trajectory(t_grid, rho_t, profile, pulse, cfg, drive_renorm) -> Trajectory:
    diag = np.real(np.einsum("tii->ti", rho_t))
    trace_error = np.abs(np.einsum("tii->t", rho_t) - 1.0)
    herm_error = np.abs(rho_t - np.conj(np.transpose(rho_t, (0, 2, 1)))).max(axis=(1, 2))
    min_eig = np.array(
        [np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min() for r in rho_t]
    )
    pops = diag.copy()
    pops[(pops < 0.0) & (pops >= -1e-9)] = 0.0
    pops /= pops.sum(axis=1, keepdims=True)
    n = pops[:, 1] + pops[:, 2] + 2.0 * pops[:, 3]
    meta = {
        "method": cfg.method,
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "drive_renorm": bool(drive_renorm),
        "temperature_K": profile.temperature,
        "kappa": profile.kappa,
        "gamma_per_ps": profile.gamma,
        "rate_sym_per_ps": profile.rate_sym,
        "rate_asym_per_ps": profile.rate_asym,
    }
    if pulse is not None:
        meta["pulse"] = {
            "area_rad": pulse.area,
            "width_ps": pulse.width,
            "center_ps": pulse.center,
            "fwhm_ps": pulse.fwhm,
        }
    return Trajectory(
        t=t_grid,
        states=rho_t,
        populations=pops,
        n=n,
        trace_error=trace_error,
        herm_error=herm_error,
        min_eigenvalue=min_eig,
        metadata=meta,
    )


def drive_then_decay(
    profile: BathProfile,
    pulse: PulseEnvelope,
    horizon: float,
    cfg: IntegratorConfig | None = None,
    t_grid=None,
    drive_renorm: bool = True,
) -> Trajectory:
    """Drive the ground state with ``pulse`` and follow the decay to ``horizon``.

    The trajectory records n(t) and its normalised form n/n_max with
    n_max = max_t n(t) (reported in the metadata).
    """
    w1 = pulse.window()[1]
    if horizon <= w1:
        raise ValueError(f"horizon must exceed the pulse window end {w1:g} ps")
    if t_grid is None:
        t_grid = np.linspace(0.0, horizon, 1201)
    traj = propagate(
        basis_state("GG"), profile, pulse, t_grid, cfg, drive_renorm=drive_renorm
    )
    n_max = traj.n_max
    traj.n_norm = traj.n / n_max if n_max > 0 else traj.n.copy()
    traj.metadata["n_max"] = n_max
    traj.metadata["horizon_ps"] = float(horizon)
    return traj


def fit_exponential(times, values, window=None) -> tuple[float, float]:
    """Least-squares rate of exponential decay from log-linear regression.

    Returns (rate, residual) where residual is the RMS deviation of
    log(values) from the fitted line inside ``window`` (a (t_lo, t_hi)
    pair; the full series when omitted).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        mask = (times >= window[0]) & (times <= window[1])
        times, values = times[mask], values[mask]
    if times.size < 2:
        raise ValueError("need at least 2 samples inside the fit window")
    if np.any(values <= 0):
        raise ValueError("exponential fit requires positive values")
    logv = np.log(values)
    slope, intercept = np.polyfit(times, logv, 1)
    residual = float(np.sqrt(np.mean((logv - (slope * times + intercept)) ** 2)))
    return -float(slope), residual
