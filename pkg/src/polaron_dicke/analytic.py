"""Closed-form dynamics of one and two phonon-dressed emitters.

All state populations refer to the collective basis (GG, Psi_S, Psi_A, XX)
of two identical emitters, or to the {G, X} basis of a single one.  The
bath enters only through a :class:`~polaron_dicke.bath.BathProfile`:
kappa, Phi(t), the bare rate gamma and the collective rates
Gamma_S/A = (1 +/- kappa^2) gamma.

Two conventions fixed here (and exercised by the t = 0 consistency tests):

* every displacement correlator is written so that its t = 0 value is
  exactly 1, i.e. exp(Phi(t) - Phi(0)) with kappa = exp(-Phi(0)/2);
* in the single-excitation decay of the symmetric state the
  single-emitter-rate term enters the symmetric population with a plus
  sign, which is the unique choice with p_sym(0) = 1, p_asym(0) = 0 and
  agreement with the excitation number.

All functions accept scalar or array times (ps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .bath import BathProfile

FloatLike = Union[float, np.ndarray]

INV_E = 1.0 / np.e

__all__ = [
    "SingleEmitterState",
    "DickePopulations",
    "DecayKernels",
    "InitialMix",
    "InfiniteLifetimeError",
    "BracketError",
    "single_tls_evolution",
    "decoherence_mixing",
    "free_decoherence",
    "inter_emitter_coherence",
    "decay_kernels",
    "single_excitation_decay",
    "excitation_number",
    "long_pulse_number",
    "doubly_excited_decay",
    "doubly_excited_number",
    "delta_pulse_weights",
    "short_pulse_number",
    "lifetime",
    "intensity_from_series",
    "excitation_intensity",
    "long_pulse_intensity",
    "doubly_excited_intensity",
]


class InfiniteLifetimeError(RuntimeError):
    """The mean excitation number never decays to 1/e."""


class BracketError(RuntimeError):
    """Root bracketing for the lifetime search failed."""


@dataclass(frozen=True)
class SingleEmitterState:
    """Single two-level emitter: populations and the <G|rho|X> coherence."""

    pop_excited: FloatLike
    pop_ground: FloatLike
    coherence: FloatLike

    def __post_init__(self):
        if np.any(np.asarray(self.pop_excited) < -1e-12) or np.any(
            np.asarray(self.pop_ground) < -1e-12
        ):
            raise ValueError("populations must be non-negative")
        if np.any(np.abs(self.pop_excited + self.pop_ground - 1.0) > 1e-9):
            raise ValueError("populations must sum to one")
        if np.any(
            np.abs(self.coherence) ** 2
            > np.asarray(self.pop_excited) * np.asarray(self.pop_ground) + 1e-9
        ):
            raise ValueError("coherence violates positivity")

    @classmethod
    def superposition(cls) -> "SingleEmitterState":
        """(|X> + |G>)/sqrt(2), the usual Ramsey-style initial state."""
        return cls(pop_excited=0.5, pop_ground=0.5, coherence=0.5)


@dataclass(frozen=True)
class DickePopulations:
    """Diagonal of the two-emitter state in the (GG, Psi_S, Psi_A, XX) basis."""

    p_gg: FloatLike
    p_sym: FloatLike
    p_asym: FloatLike
    p_xx: FloatLike

    def __post_init__(self):
        for p in (self.p_gg, self.p_sym, self.p_asym, self.p_xx):
            arr = np.asarray(p)
            if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
                raise ValueError("populations must lie in [0, 1]")
        if np.any(np.abs(self.total - 1.0) > 1e-9):
            raise ValueError("populations must sum to one")

    @property
    def total(self) -> FloatLike:
        return self.p_gg + self.p_sym + self.p_asym + self.p_xx

    @property
    def excitation_number(self) -> FloatLike:
        return self.p_sym + self.p_asym + 2.0 * self.p_xx


@dataclass(frozen=True)
class InitialMix:
    """Statistical mixture w_sym |Psi_S><Psi_S| + w_asym |Psi_A><Psi_A|."""

    w_sym: float
    w_asym: float

    def __post_init__(self):
        if self.w_sym < 0 or self.w_asym < 0:
            raise ValueError("mixture weights must be non-negative")
        if abs(self.w_sym + self.w_asym - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to one")

    @classmethod
    def symmetric(cls) -> "InitialMix":
        return cls(1.0, 0.0)

    @classmethod
    def antisymmetric(cls) -> "InitialMix":
        return cls(0.0, 1.0)

    @classmethod
    def mixed(cls, w_sym: float) -> "InitialMix":
        return cls(w_sym, 1.0 - w_sym)


@dataclass(frozen=True)
class DecayKernels:
    """Phonon-transient weights of the single-excitation biexponential decay.

    a_plus/a_minus are the free-decoherence mixing weights; e_pp..e_mm the
    four E_{s1 s2} amplitudes multiplying exp(-Gamma_{S/A} t); e_zero the
    amplitude of the bare-rate exp(-gamma t) term.
    """

    a_plus: FloatLike
    a_minus: FloatLike
    e_pp: FloatLike
    e_pm: FloatLike
    e_mp: FloatLike
    e_mm: FloatLike
    e_zero: FloatLike


def single_tls_evolution(
    init: SingleEmitterState, profile: BathProfile, t: FloatLike
) -> SingleEmitterState:
    """Exact single-emitter evolution: bare-rate decay, IBM dephasing.

    The excited population decays with the bare radiative rate gamma for
    any phonon coupling and temperature; the coherence carries the
    independent-boson factor exp(Phi(t) - Phi(0)) times exp(-gamma t / 2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    gamma = profile.gamma
    decay = np.exp(-gamma * t)
    pop_x = init.pop_excited * decay
    dephasing = np.exp(profile.phi_at(t) - profile.phi0)
    coh = init.coherence * dephasing * np.exp(-0.5 * gamma * t)
    return SingleEmitterState(pop_excited=pop_x, pop_ground=1.0 - pop_x, coherence=coh)


def _mixing_factor(profile: BathProfile, t) -> FloatLike:
    """kappa^4 exp(2 Re Phi(t)) written as exp(2(Re Phi(t) - Phi(0))); equals 1 at t=0."""
    return np.exp(2.0 * (np.real(profile.phi_at(t)) - profile.phi0))


def decoherence_mixing(profile: BathProfile, t: FloatLike):
    """Free-decoherence weights (a_plus, a_minus); a_plus(0) = 1, sum = 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    s = _mixing_factor(profile, t)
    a_plus = 0.5 * (1.0 + s)
    return a_plus, 1.0 - a_plus


def free_decoherence(init: InitialMix, profile: BathProfile, t: FloatLike) -> DickePopulations:
    """Phonon-only (no radiative decay) evolution of a Dicke-state mixture.

    Polaron formation transfers weight between the symmetric and
    antisymmetric states, saturating at a_minus(inf) = (1 - kappa^4)/2.
    """
    a_plus, a_minus = decoherence_mixing(profile, t)
    p_sym = a_plus * init.w_sym + a_minus * init.w_asym
    p_asym = a_minus * init.w_sym + a_plus * init.w_asym
    zero = np.zeros_like(np.asarray(t, dtype=float))
    return DickePopulations(p_gg=zero, p_sym=p_sym, p_asym=p_asym, p_xx=zero)


def inter_emitter_coherence(init: InitialMix, profile: BathProfile, t: FloatLike) -> FloatLike:
    """Inter-emitter coherence <X1 G2|rho|G1 X2>: the squared single-emitter factor.

    rho_12(t) = rho_12(0) * (exp(Re Phi(t) - Phi(0)))^2 with
    rho_12(0) = (w_sym - w_asym)/2; two local baths act on it like a single
    bath with doubled correlation function.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    rho12_0 = 0.5 * (init.w_sym - init.w_asym)
    return rho12_0 * _mixing_factor(profile, t)


def decay_kernels(profile: BathProfile, t: FloatLike) -> DecayKernels:
    """Transient kernels of the short-pulse (bare-state) biexponential decay.

    kappa^4 cosh/sinh(2 Re Phi) are evaluated as half-sums of
    exp(2(Re Phi - Phi0)) and exp(-2(Re Phi + Phi0)) so the t = 0 limits
    come out exact; the oscillatory cos(2 Im Phi) term carries the
    reorganisation transient.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    phi_t = profile.phi_at(t)
    phi0 = profile.phi0
    k2 = profile.kappa**2
    ep = np.exp(2.0 * (np.real(phi_t) - phi0))  # kappa^4 exp(+2 Re Phi)
    em = np.exp(-2.0 * (np.real(phi_t) + phi0))  # kappa^4 exp(-2 Re Phi)
    k4cosh = 0.5 * (ep + em)
    k4sinh = 0.5 * (ep - em)
    cos_im = np.cos(2.0 * np.imag(phi_t))
    e = {}
    for s1 in (+1.0, -1.0):
        for s2 in (+1.0, -1.0):
            e[(s1, s2)] = 0.25 * (1.0 + s1 * k2 + s2 * (k4cosh + s1 * k2 * cos_im))
    return DecayKernels(
        a_plus=0.5 * (1.0 + ep),
        a_minus=0.5 * (1.0 - ep),
        e_pp=e[(1.0, 1.0)],
        e_pm=e[(1.0, -1.0)],
        e_mp=e[(-1.0, 1.0)],
        e_mm=e[(-1.0, -1.0)],
        e_zero=0.5 * k4sinh,
    )


def single_excitation_decay(profile: BathProfile, t: FloatLike) -> DickePopulations:
    """Populations for the initial bare symmetric state |Psi_S><Psi_S|.

    Biexponential in the collective rates with phonon-transient weights;
    the exp(-gamma t) term adds to p_sym and subtracts from p_asym, making
    p(0) = (0, 1, 0, 0) and p_sym + p_asym equal to the excitation number.
    """
    t = np.asarray(t, dtype=float)
    k = decay_kernels(profile, t)
    es = np.exp(-profile.rate_sym * t)
    ea = np.exp(-profile.rate_asym * t)
    e0 = np.exp(-profile.gamma * t)
    p_sym = es * k.e_pp + ea * k.e_mp + e0 * k.e_zero
    p_asym = es * k.e_pm + ea * k.e_mm - e0 * k.e_zero
    p_gg = 1.0 - p_sym - p_asym
    zero = np.zeros_like(t)
    return DickePopulations(p_gg=p_gg, p_sym=p_sym, p_asym=p_asym, p_xx=zero)


def excitation_number(init: InitialMix, profile: BathProfile, t: FloatLike) -> FloatLike:
    """Mean excitation number n(t) for a Dicke mixture prepared in bare states.

    n(t) = w_sym [(1+k^2) e^{-G_S t} + (1-k^2) e^{-G_A t}]/2
         + w_asym [(1-k^2) e^{-G_S t} + (1+k^2) e^{-G_A t}]/2
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    k2 = profile.kappa**2
    es = np.exp(-profile.rate_sym * t)
    ea = np.exp(-profile.rate_asym * t)
    bright = 0.5 * (1.0 + k2) * es + 0.5 * (1.0 - k2) * ea
    dark = 0.5 * (1.0 - k2) * es + 0.5 * (1.0 + k2) * ea
    return init.w_sym * bright + init.w_asym * dark


def long_pulse_number(profile: BathProfile, t: FloatLike) -> FloatLike:
    """n(t) = exp(-Gamma_S t): adiabatic preparation of the polaronic bright state."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    return np.exp(-profile.rate_sym * t)


# Gamma_A below this fraction of gamma switches the (1-exp(-Gamma_A t))/Gamma_A
# factors to their series to avoid 0/0 in the Dicke limit.
_RATE_EPS = 1e-9


def _growth_over_rate(rate: float, gamma: float, t):
    """(1 - exp(-rate*t))/rate, series branch when rate << gamma."""
    if rate <= _RATE_EPS * gamma:
        rt = rate * t
        return t * (1.0 - rt / 2.0 + rt * rt / 6.0)
    return -np.expm1(-rate * t) / rate


def doubly_excited_decay(profile: BathProfile, t: FloatLike) -> DickePopulations:
    """Cascade populations for the initial doubly excited state |X1 X2>.

    The doubly excited state carries no inter-emitter coherence, so the
    same closed form serves the bare electronic and the polaronic
    preparation (single code path); it solves the collective-rate master
    equation exactly:

        p_xx  = e^{-2 gamma t}
        p_sym = (G_S/G_A)(1 - e^{-G_A t}) e^{-G_S t}
        p_asym= (G_A/G_S)(1 - e^{-G_S t}) e^{-G_A t}

    with p_gg the trace remainder.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    gamma = profile.gamma
    if gamma == 0.0:
        zero = np.zeros_like(t)
        return DickePopulations(p_gg=zero, p_sym=zero, p_asym=zero, p_xx=np.ones_like(t))
    gs, ga = profile.rate_sym, profile.rate_asym
    p_xx = np.exp(-(gs + ga) * t)
    p_sym = gs * np.exp(-gs * t) * _growth_over_rate(ga, gamma, t)
    p_asym = ga * np.exp(-ga * t) * _growth_over_rate(gs, gamma, t)
    p_gg = 1.0 - p_xx - p_sym - p_asym
    return DickePopulations(p_gg=p_gg, p_sym=p_sym, p_asym=p_asym, p_xx=p_xx)


def doubly_excited_number(profile: BathProfile, t: FloatLike) -> FloatLike:
    """Mean excitation number of the doubly-excited cascade, n(0) = 2.

    n(t) = 2 e^{-2 gamma t} + (G_A/G_S)(1 - e^{-G_S t}) e^{-G_A t}
         + (G_S/G_A)(1 - e^{-G_A t}) e^{-G_S t};
    the Dicke limit G_A -> 0 evaluates the last factor as G_S t.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    gamma = profile.gamma
    if gamma == 0.0:
        return 2.0 * np.ones_like(t)
    gs, ga = profile.rate_sym, profile.rate_asym
    return (
        2.0 * np.exp(-(gs + ga) * t)
        + ga * np.exp(-ga * t) * _growth_over_rate(gs, gamma, t)
        + gs * np.exp(-gs * t) * _growth_over_rate(ga, gamma, t)
    )


def delta_pulse_weights(area: float) -> tuple[float, float, float]:
    """Populations (p_gg, p_sym, p_xx) after an ideal delta pulse on the ground state.

    The symmetric drive acts on the three-level ladder GG <-> Psi_S <-> XX
    with equal couplings, so a pulse of area A rotates by sqrt(2) A / 2:

        p_sym = sin^2(sqrt(2) A / 2) / 2,
        p_xx  = (1 - cos(sqrt(2) A / 2))^2 / 4.
    """
    half = math.sqrt(2.0) * area / 2.0
    p_gg = ((1.0 + math.cos(half)) / 2.0) ** 2
    p_sym = math.sin(half) ** 2 / 2.0
    p_xx = ((1.0 - math.cos(half)) / 2.0) ** 2
    return p_gg, p_sym, p_xx


def short_pulse_number(profile: BathProfile, area: float, t: FloatLike) -> FloatLike:
    """n(t) after an ideal delta pulse of given area on the bare ground state.

    Coherences between excitation manifolds never feed populations, so
    n(t) is the weight of each initially populated level times its decay:
    the bare bright state contributes the biexponential excitation number,
    the doubly excited state the frame-independent cascade.
    """
    _, p_sym0, p_xx0 = delta_pulse_weights(area)
    n = p_sym0 * excitation_number(InitialMix.symmetric(), profile, t)
    if p_xx0 > 0.0:
        n = n + p_xx0 * doubly_excited_number(profile, t)
    return n


def _polaronic_number(init: InitialMix, profile: BathProfile, t):
    return init.w_sym * np.exp(-profile.rate_sym * t) + init.w_asym * np.exp(
        -profile.rate_asym * t
    )


def lifetime(
    init: InitialMix,
    profile: BathProfile,
    frame: str = "electronic",
    bracket_factor: float = 50.0,
) -> float:
    """Time at which the mean excitation number has decayed to 1/e.

    ``frame`` selects the preparation: "electronic" uses the short-pulse
    (bare-state) excitation number, "polaronic" the polaron-frame
    exponentials w_sym e^{-G_S t} + w_asym e^{-G_A t}.  Bisection on
    [0, bracket_factor/gamma] down to |n(tau) - 1/e| < 1e-10.
    """
    if frame == "electronic":
        n_fn = lambda t: float(excitation_number(init, profile, t))  # noqa: E731
    elif frame == "polaronic":
        n_fn = lambda t: float(_polaronic_number(init, profile, t))  # noqa: E731
    else:
        raise ValueError(f"unknown frame {frame!r}; use 'electronic' or 'polaronic'")
    if profile.gamma == 0.0:
        raise InfiniteLifetimeError("gamma = 0: nothing decays")
    hi = bracket_factor / profile.gamma
    if n_fn(hi) >= INV_E:
        if profile.rate_asym == 0.0 and init.w_asym > 0.0:
            raise InfiniteLifetimeError(
                "dark-state weight does not decay (Gamma_A = 0); n(inf) >= 1/e"
            )
        raise BracketError(
            f"n({hi:g} ps) = {n_fn(hi):.3e} has not reached 1/e; enlarge bracket_factor"
        )
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = n_fn(mid)
        if abs(val - INV_E) < 1e-10:
            return mid
        if val > INV_E:
            lo = mid
        else:
            hi = mid
    raise BracketError("bisection failed to reach the 1e-10 target")


def intensity_from_series(times, values) -> np.ndarray:
    """Emission intensity I = -dn/dt from n sampled on a uniform grid.

    Central differences in the interior, one-sided at the ends.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 3:
        raise ValueError("need at least 3 samples to differentiate")
    dt = np.diff(times)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("time grid must be uniform and increasing")
    return -np.gradient(values, times, edge_order=1)


def excitation_intensity(init: InitialMix, profile: BathProfile, t: FloatLike) -> FloatLike:
    """Exact -dn/dt for the short-pulse (bare-state) excitation number."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    k2 = profile.kappa**2
    gs, ga = profile.rate_sym, profile.rate_asym
    es = np.exp(-gs * t)
    ea = np.exp(-ga * t)
    bright = 0.5 * (1.0 + k2) * gs * es + 0.5 * (1.0 - k2) * ga * ea
    dark = 0.5 * (1.0 - k2) * gs * es + 0.5 * (1.0 + k2) * ga * ea
    return init.w_sym * bright + init.w_asym * dark


def long_pulse_intensity(profile: BathProfile, t: FloatLike) -> FloatLike:
    """Exact -dn/dt for the adiabatically prepared polaronic bright state."""
    return profile.rate_sym * long_pulse_number(profile, t)


def doubly_excited_intensity(profile: BathProfile, t: FloatLike) -> FloatLike:
    """Exact -dn/dt of the doubly-excited cascade; I(0) = 2 gamma."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    gamma = profile.gamma
    if gamma == 0.0:
        return np.zeros_like(t)
    gs, ga = profile.rate_sym, profile.rate_asym
    return (
        (gs + ga) * np.exp(-(gs + ga) * t)
        + ga * ga * np.exp(-ga * t) * _growth_over_rate(gs, gamma, t)
        + gs * gs * np.exp(-gs * t) * _growth_over_rate(ga, gamma, t)
    )
