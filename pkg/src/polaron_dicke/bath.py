"""Phonon bath quantities: spectral density, correlation function, polaron constants.

Everything here works in a picosecond unit system: times in ps, angular
frequencies and rates in ps^-1, hbar = 1.  Temperature enters only through
the thermal frequency k_B*T/hbar (ps^-1).  Material parameters are taken in
lab units (eV, kg/m^3, m/s) and converted internally.

The super-Ohmic deformation-potential spectral density of a quantum dot is

    J(w) = w^3 / (2 mu hbar c_s^5) * (D_e exp(-w^2/w_e^2) - D_h exp(-w^2/w_h^2))^2

and the bath correlation function is

    Phi(t) = int_0^inf dw J(w)/w^2 [coth(hbar w / (2 k_B T)) cos(w t) - i sin(w t)].

The thermal displacement expectation value is kappa = exp(-Phi(0)/2), which
renormalises the collective decay rates of two emitters to
Gamma_S/A = (1 +/- kappa^2) * gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _const
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

# unit conversions (ps system)
KB_OVER_HBAR = _const.k / _const.hbar * 1e-12  # ps^-1 per kelvin
J_PER_EV = _const.e

__all__ = [
    "KB_OVER_HBAR",
    "SpectralDensityParams",
    "QuadratureConfig",
    "BathProfile",
    "QuadratureError",
    "DEFAULT_MATERIAL",
    "eval_spectral_density",
    "reorg_energy",
    "phi",
    "kappa",
    "collective_rates",
    "build_profile",
    "scale_coupling",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the achieved residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SpectralDensityParams:
    """Material constants defining the phonon spectral density of a QD bath.

    Parameters
    ----------
    mass_density:
        Bulk mass density in kg/m^3.
    sound_speed:
        Longitudinal sound velocity in m/s.
    deform_e, deform_h:
        Electron / hole deformation potentials in eV (signs as in the
        coupling bracket; opposite signs add constructively).
    cutoff_e, cutoff_h:
        Gaussian cutoff frequencies in ps^-1 set by the carrier
        localisation lengths (w_c = sqrt(2) c_s / a).
    """

    mass_density: float
    sound_speed: float
    deform_e: float
    deform_h: float
    cutoff_e: float
    cutoff_h: float

    def __post_init__(self):
        if self.mass_density <= 0 or self.sound_speed <= 0:
            raise ValueError("mass_density and sound_speed must be positive")
        if self.cutoff_e <= 0 or self.cutoff_h <= 0:
            raise ValueError("cutoff frequencies must be positive")

    @property
    def prefactor(self) -> float:
        """Coupling prefactor K with J(w) = K w^3 bracket(w)^2, w in ps^-1."""
        # 1e24 converts (1e12 w_ps)^3 * s -> ps^-1
        return 1e24 / (2.0 * self.mass_density * _const.hbar * self.sound_speed**5)

    def bracket(self, omega):
        """Deformation-potential bracket D_e e^{-w^2/w_e^2} - D_h e^{-w^2/w_h^2} in J."""
        w2 = np.square(omega)
        return J_PER_EV * (
            self.deform_e * np.exp(-w2 / self.cutoff_e**2)
            - self.deform_h * np.exp(-w2 / self.cutoff_h**2)
        )

    @property
    def is_zero_coupling(self) -> bool:
        return self.deform_e == 0.0 and self.deform_h == 0.0


# InGaAs/GaAs defaults for a dot radius of ~4 nm; cutoffs are
# sqrt(2)*c_s/a with a_e = 4 nm and a_h = a_e/1.15.  Configuration
# defaults only, not ground truth: override in the config file.
DEFAULT_MATERIAL = SpectralDensityParams(
    mass_density=5370.0,
    sound_speed=5110.0,
    deform_e=7.0,
    deform_h=-3.5,
    cutoff_e=1.807,
    cutoff_h=2.078,
)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncation for the frequency integrals."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    omega_max: float | None = None  # default: 10 * max cutoff
    max_subdivisions: int = 300

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")

    def resolve_omega_max(self, params: SpectralDensityParams) -> float:
        if self.omega_max is not None:
            if self.omega_max <= max(params.cutoff_e, params.cutoff_h):
                raise ValueError("omega_max must exceed both cutoff frequencies")
            return self.omega_max
        # integrand suppressed by exp(-100) at the truncation point
        return 10.0 * max(params.cutoff_e, params.cutoff_h)


def eval_spectral_density(params: SpectralDensityParams, omega):
    """Phonon spectral density J(omega) in ps^-1 for omega >= 0 (ps^-1)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral density is defined for omega >= 0 only")
    out = params.prefactor * omega**3 * params.bracket(omega) ** 2
    return out if out.ndim else float(out)


def _xcoth(x):
    """x*coth(x), regular at x = 0."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, safe / np.tanh(safe))


def _thermal_weight(params: SpectralDensityParams, temperature: float):
    """Integrand J(w)/w^2 * coth(w / (2 theta)), finite at w = 0."""
    pref = params.prefactor
    if temperature == 0.0:
        return lambda w: pref * w * params.bracket(w) ** 2
    theta = KB_OVER_HBAR * temperature
    return lambda w: pref * params.bracket(w) ** 2 * 2.0 * theta * _xcoth(w / (2.0 * theta))


def _quad(f, a, b, quad_cfg: QuadratureConfig, what, **kwargs):
    """scipy.integrate.quad with convergence checking per QuadratureConfig."""
    value, residual, *tail = quad(
        f,
        a,
        b,
        epsabs=quad_cfg.abs_tol,
        epsrel=quad_cfg.rel_tol,
        limit=quad_cfg.max_subdivisions,
        full_output=True,
        **kwargs,
    )
    # quadpack flags roundoff-limited results, which is fine as long as the
    # achieved residual is close to the requested tolerance
    tol = max(10.0 * quad_cfg.abs_tol, 10.0 * quad_cfg.rel_tol * abs(value), 1e-11)
    if residual > tol:
        raise QuadratureError(
            f"quadrature for {what} did not converge (residual {residual:.3e})",
            residual=residual,
        )
    return value


def reorg_energy(params: SpectralDensityParams, quad_cfg: QuadratureConfig | None = None) -> float:
    """Reorganisation energy omega_R = int_0^inf dw J(w)/w, in ps^-1."""
    quad_cfg = quad_cfg or QuadratureConfig()
    if params.is_zero_coupling:
        return 0.0
    wmax = quad_cfg.resolve_omega_max(params)
    pref = params.prefactor
    return _quad(
        lambda w: pref * w**2 * params.bracket(w) ** 2, 0.0, wmax, quad_cfg, "reorg_energy"
    )


def phi(
    params: SpectralDensityParams,
    temperature: float,
    t: float,
    quad_cfg: QuadratureConfig | None = None,
) -> complex:
    """Bath correlation function Phi(t) (dimensionless), t in ps.

    Negative times are handled through the conjugate symmetry
    Phi(-t) = Phi(t)*.
    """
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    quad_cfg = quad_cfg or QuadratureConfig()
    if params.is_zero_coupling:
        return 0.0 + 0.0j
    if t < 0:
        return complex(phi(params, temperature, -t, quad_cfg)).conjugate()
    wmax = quad_cfg.resolve_omega_max(params)
    f_re = _thermal_weight(params, temperature)
    if t == 0.0:
        return complex(_quad(f_re, 0.0, wmax, quad_cfg, "Phi(0)"))
    # oscillatory weights keep the adaptive scheme accurate at large t
    re = _quad(f_re, 0.0, wmax, quad_cfg, f"Re Phi({t})", weight="cos", wvar=t)
    pref = params.prefactor
    im = _quad(
        lambda w: pref * w * params.bracket(w) ** 2,
        0.0,
        wmax,
        quad_cfg,
        f"Im Phi({t})",
        weight="sin",
        wvar=t,
    )
    return complex(re, -im)


def kappa(
    params: SpectralDensityParams,
    temperature: float,
    quad_cfg: QuadratureConfig | None = None,
) -> float:
    """Thermal displacement expectation value kappa = exp(-Phi(0)/2), in (0, 1]."""
    phi0 = phi(params, temperature, 0.0, quad_cfg).real
    return math.exp(-0.5 * phi0)


def collective_rates(gamma: float, kap: float) -> tuple[float, float]:
    """Collective decay rates (Gamma_S, Gamma_A) = ((1 + k^2) g, (1 - k^2) g).

    The antisymmetric rate is constructed as 2*gamma - Gamma_S so the sum
    rule Gamma_S + Gamma_A = 2*gamma holds exactly in floating point.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if not 0.0 <= kap <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    rate_sym = (1.0 + kap * kap) * gamma
    rate_asym = 2.0 * gamma - rate_sym
    return rate_sym, rate_asym


@dataclass(frozen=True)
class BathProfile:
    """Tabulated bath quantities at a fixed temperature.

    ``phi_values`` holds Phi on ``time_grid`` (starting at t = 0); between
    grid points a cubic spline interpolates, beyond the last point Phi is
    taken as zero (it has decayed superexponentially by then).
    """

    temperature: float
    kappa: float
    reorg_energy: float
    gamma: float
    rate_sym: float
    rate_asym: float
    time_grid: np.ndarray
    phi_values: np.ndarray
    _re_spline: CubicSpline = field(repr=False, compare=False, default=None)
    _im_spline: CubicSpline = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if abs(self.phi_values[0].imag) > 1e-12:
            raise ValueError("Phi(0) must be real")
        object.__setattr__(self, "_re_spline", CubicSpline(self.time_grid, self.phi_values.real))
        object.__setattr__(self, "_im_spline", CubicSpline(self.time_grid, self.phi_values.imag))

    @property
    def phi0(self) -> float:
        return float(self.phi_values[0].real)

    def phi_at(self, t):
        """Interpolated Phi(t); conjugate-symmetric for t < 0, zero past the grid."""
        t = np.asarray(t, dtype=float)
        sign = np.where(t < 0, -1.0, 1.0)
        ta = np.abs(t)
        inside = ta <= self.time_grid[-1]
        tc = np.where(inside, ta, 0.0)
        re = np.where(inside, self._re_spline(tc), 0.0)
        im = np.where(inside, self._im_spline(tc), 0.0) * sign
        out = re + 1j * im
        return out if out.ndim else complex(out)


def build_profile(
    params: SpectralDensityParams,
    temperature: float,
    gamma: float,
    time_grid=None,
    quad_cfg: QuadratureConfig | None = None,
) -> BathProfile:
    """Evaluate all polaron constants and tabulate Phi on ``time_grid``.

    ``time_grid`` must increase strictly from 0; the default covers
    [0, 25] ps, past the decay of Phi for typical QD cutoffs.
    """
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    quad_cfg = quad_cfg or QuadratureConfig()
    if time_grid is None:
        # dense where Phi varies, sparse over its tail
        time_grid = np.unique(np.concatenate([np.linspace(0.0, 8.0, 281), np.linspace(8.0, 25.0, 81)]))
    time_grid = np.asarray(time_grid, dtype=float)
    if time_grid[0] != 0.0 or np.any(np.diff(time_grid) <= 0):
        raise ValueError("time_grid must increase strictly from 0")

    if params.is_zero_coupling:
        phi_values = np.zeros(time_grid.size, dtype=complex)
        kap = 1.0
        omega_r = 0.0
    else:
        wmax = quad_cfg.resolve_omega_max(params)
        f_re = _thermal_weight(params, temperature)
        pref = params.prefactor
        f_im = lambda w: pref * w * params.bracket(w) ** 2  # noqa: E731
        re = np.empty(time_grid.size)
        im = np.empty(time_grid.size)
        re[0] = _quad(f_re, 0.0, wmax, quad_cfg, "Phi(0)")
        im[0] = 0.0
        for i, t in enumerate(time_grid[1:], start=1):
            re[i] = _quad(f_re, 0.0, wmax, quad_cfg, f"Re Phi({t})", weight="cos", wvar=t)
            im[i] = -_quad(f_im, 0.0, wmax, quad_cfg, f"Im Phi({t})", weight="sin", wvar=t)
        phi_values = re + 1j * im
        kap = math.exp(-0.5 * re[0])
        omega_r = reorg_energy(params, quad_cfg)

    rate_sym, rate_asym = collective_rates(gamma, kap)
    return BathProfile(
        temperature=temperature,
        kappa=kap,
        reorg_energy=omega_r,
        gamma=gamma,
        rate_sym=rate_sym,
        rate_asym=rate_asym,
        time_grid=time_grid,
        phi_values=phi_values,
    )


def scale_coupling(profile: BathProfile, factor: float) -> BathProfile:
    """Profile for the same bath with J -> factor * J (Phi scales linearly).

    Handy for preparing a profile with a prescribed kappa: factor
    -2*ln(kappa)/Phi(0) hits the target exactly.
    """
    if factor < 0:
        raise ValueError("coupling scale factor must be non-negative")
    phi_values = profile.phi_values * factor
    kap = math.exp(-0.5 * float(phi_values[0].real))
    rate_sym, rate_asym = collective_rates(profile.gamma, kap)
    return BathProfile(
        temperature=profile.temperature,
        kappa=kap,
        reorg_energy=profile.reorg_energy * factor,
        gamma=profile.gamma,
        rate_sym=rate_sym,
        rate_asym=rate_asym,
        time_grid=profile.time_grid,
        phi_values=phi_values,
    )
