"""Bath module: spectral density, correlation function, polaron constants.

Expected values marked as pins were computed with the independent
midpoint-Riemann oracle below (literal physical constants, no package
code) and then frozen.
"""

import dataclasses
import math

import numpy as np
import pytest

from polaron_dicke import DEFAULT_MATERIAL, bath
from polaron_dicke.bath import QuadratureConfig, QuadratureError

# ---------------------------------------------------------------- oracle --
# Independent of the package: own constants, own integration scheme.
_HBAR = 1.054571817e-34  # J s
_KB = 1.380649e-23  # J/K
_EV = 1.602176634e-19  # J
_KB_OVER_HBAR = _KB / _HBAR * 1e-12  # ps^-1 per K


def _oracle_bracket(w, p):
    return _EV * (
        p.deform_e * np.exp(-((w / p.cutoff_e) ** 2))
        - p.deform_h * np.exp(-((w / p.cutoff_h) ** 2))
    )


def _oracle_prefactor(p):
    return 1e24 / (2.0 * p.mass_density * _HBAR * p.sound_speed**5)


def _oracle_grid(p, n):
    wmax = 10.0 * max(p.cutoff_e, p.cutoff_h)
    w = (np.arange(n) + 0.5) * (wmax / n)
    return w, wmax / n


def oracle_spectral_density(p, w):
    return _oracle_prefactor(p) * w**3 * _oracle_bracket(w, p) ** 2


def oracle_reorg(p, n=1_000_000):
    w, dw = _oracle_grid(p, n)
    return float(np.sum(_oracle_prefactor(p) * w**2 * _oracle_bracket(w, p) ** 2) * dw)


def oracle_phi(p, temperature, t, n=1_000_000):
    w, dw = _oracle_grid(p, n)
    f_im = _oracle_prefactor(p) * w * _oracle_bracket(w, p) ** 2
    if temperature == 0.0:
        f_re = f_im
    else:
        f_re = f_im / np.tanh(w / (2.0 * _KB_OVER_HBAR * temperature))
    re = float(np.sum(f_re * np.cos(w * t)) * dw)
    im = -float(np.sum(f_im * np.sin(w * t)) * dw)
    return complex(re, im)


# ------------------------------------------------------- spectral density --
def test_spectral_density_vanishes_at_zero():
    assert bath.eval_spectral_density(DEFAULT_MATERIAL, 0.0) == 0.0


def test_spectral_density_nonnegative():
    w = np.linspace(0.0, 25.0, 2001)
    assert np.all(bath.eval_spectral_density(DEFAULT_MATERIAL, w) >= 0.0)


def test_spectral_density_suppressed_beyond_omega_max():
    qc = QuadratureConfig()
    wmax = qc.resolve_omega_max(DEFAULT_MATERIAL)
    assert bath.eval_spectral_density(DEFAULT_MATERIAL, wmax) < qc.abs_tol
    assert bath.eval_spectral_density(DEFAULT_MATERIAL, 2.0 * wmax) < qc.abs_tol


def test_spectral_density_rejects_negative_frequency():
    with pytest.raises(ValueError):
        bath.eval_spectral_density(DEFAULT_MATERIAL, -0.1)


def test_spectral_density_pinned_at_electron_cutoff():
    value = bath.eval_spectral_density(DEFAULT_MATERIAL, DEFAULT_MATERIAL.cutoff_e)
    # frozen regression pin, oracle-checked below
    assert value == pytest.approx(0.6829290405572441, rel=1e-10)
    oracle = float(oracle_spectral_density(DEFAULT_MATERIAL, DEFAULT_MATERIAL.cutoff_e))
    assert value == pytest.approx(oracle, rel=1e-8)


# ---------------------------------------------------------- reorg energy --
def test_reorg_energy_zero_coupling():
    params = dataclasses.replace(DEFAULT_MATERIAL, deform_e=0.0, deform_h=0.0)
    assert bath.reorg_energy(params) == 0.0


def test_reorg_energy_linear_in_spectral_density():
    # J -> 2J doubles omega_R: scale both deformation potentials by sqrt(2)
    scaled = dataclasses.replace(
        DEFAULT_MATERIAL,
        deform_e=DEFAULT_MATERIAL.deform_e * math.sqrt(2.0),
        deform_h=DEFAULT_MATERIAL.deform_h * math.sqrt(2.0),
    )
    assert bath.reorg_energy(scaled) == pytest.approx(
        2.0 * bath.reorg_energy(DEFAULT_MATERIAL), rel=1e-12
    )


def test_reorg_energy_pinned_and_oracle_checked():
    value = bath.reorg_energy(DEFAULT_MATERIAL)
    assert value == pytest.approx(0.764715031965587, rel=1e-10)
    assert value == pytest.approx(oracle_reorg(DEFAULT_MATERIAL), rel=1e-8)


def test_reorg_energy_stable_under_oracle_grid_doubling():
    a = oracle_reorg(DEFAULT_MATERIAL, n=1_000_000)
    b = oracle_reorg(DEFAULT_MATERIAL, n=2_000_000)
    assert abs(a - b) / abs(a) < 1e-8


# ----------------------------------------------------------------- phi ----
def test_phi_zero_time_is_real_and_positive():
    val = bath.phi(DEFAULT_MATERIAL, 4.0, 0.0)
    assert val.imag == 0.0
    assert val.real > 0.0


def test_phi_conjugate_symmetry():
    for t in (0.3, 1.0, 2.7):
        plus = bath.phi(DEFAULT_MATERIAL, 4.0, t)
        minus = bath.phi(DEFAULT_MATERIAL, 4.0, -t)
        assert minus == pytest.approx(plus.conjugate(), abs=1e-12)


def test_phi_decays_at_long_times():
    t_late = 100.0 / min(DEFAULT_MATERIAL.cutoff_e, DEFAULT_MATERIAL.cutoff_h)
    assert abs(bath.phi(DEFAULT_MATERIAL, 4.0, t_late)) < 1e-10


def test_phi_rejects_negative_temperature():
    with pytest.raises(ValueError):
        bath.phi(DEFAULT_MATERIAL, -1.0, 0.5)


def test_phi_pinned_and_oracle_checked_at_1ps():
    value = bath.phi(DEFAULT_MATERIAL, 4.0, 1.0)
    assert value.real == pytest.approx(0.59112387422215, rel=1e-10)
    assert value.imag == pytest.approx(-0.48614053101101984, rel=1e-10)
    oracle = oracle_phi(DEFAULT_MATERIAL, 4.0, 1.0)
    assert abs(value - oracle) < 1e-8


def test_phi_zero_temperature_oracle():
    value = bath.phi(DEFAULT_MATERIAL, 0.0, 0.0)
    assert abs(value - oracle_phi(DEFAULT_MATERIAL, 0.0, 0.0)) < 1e-8


# ---------------------------------------------------------------- kappa ---
def test_kappa_zero_coupling_is_one():
    params = dataclasses.replace(DEFAULT_MATERIAL, deform_e=0.0, deform_h=0.0)
    assert bath.kappa(params, 4.0) == 1.0


def test_kappa_decreases_with_temperature():
    values = [bath.kappa(DEFAULT_MATERIAL, temp) for temp in (0.0, 4.0, 20.0, 77.0)]
    assert all(0.0 < v <= 1.0 for v in values)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_kappa_squared_when_phi0_doubles():
    scaled = dataclasses.replace(
        DEFAULT_MATERIAL,
        deform_e=DEFAULT_MATERIAL.deform_e * math.sqrt(2.0),
        deform_h=DEFAULT_MATERIAL.deform_h * math.sqrt(2.0),
    )
    k1 = bath.kappa(DEFAULT_MATERIAL, 4.0)
    k2 = bath.kappa(scaled, 4.0)
    assert k2 == pytest.approx(k1**2, rel=1e-10)


# ------------------------------------------------------- collective rates --
def test_collective_rates_dicke_limit():
    assert bath.collective_rates(0.005, 1.0) == (0.01, 0.0)


def test_collective_rates_independent_limit():
    gs, ga = bath.collective_rates(0.005, 0.0)
    assert gs == 0.005 and ga == 0.005


def test_collective_rates_sum_rule_exact(rng):
    for kap in rng.uniform(0.0, 1.0, 200):
        gs, ga = bath.collective_rates(0.005, float(kap))
        assert gs + ga == 2.0 * 0.005


def test_collective_rates_validation():
    with pytest.raises(ValueError):
        bath.collective_rates(-1.0, 0.5)
    with pytest.raises(ValueError):
        bath.collective_rates(0.005, 1.5)


# ----------------------------------------------------------- build profile --
def test_build_profile_zero_coupling(profile_zero):
    assert profile_zero.kappa == 1.0
    assert profile_zero.reorg_energy == 0.0
    assert np.all(profile_zero.phi_values == 0.0)
    assert profile_zero.rate_sym == 2.0 * profile_zero.gamma
    assert profile_zero.rate_asym == 0.0


def test_build_profile_default_pins(profile_4k):
    assert profile_4k.kappa == pytest.approx(0.5758912879331918, rel=1e-10)
    assert profile_4k.reorg_energy == pytest.approx(0.764715031965587, rel=1e-10)
    assert profile_4k.phi0 == pytest.approx(1.1036727446525327, rel=1e-10)
    assert profile_4k.rate_sym + profile_4k.rate_asym == 2.0 * profile_4k.gamma


def test_build_profile_phi_invariants(profile_4k):
    assert profile_4k.phi_values[0].imag == 0.0
    assert abs(profile_4k.phi_at(profile_4k.time_grid[-1])) < 1e-10
    assert profile_4k.phi_at(40.0) == 0.0  # beyond the tabulated grid
    t = np.array([0.4, 1.3, 5.2])
    assert np.allclose(profile_4k.phi_at(-t), np.conj(profile_4k.phi_at(t)))


def test_build_profile_interpolation_accuracy(profile_4k):
    # spline between grid points vs direct quadrature
    for t in (0.333, 1.237, 3.777, 6.125):
        direct = bath.phi(DEFAULT_MATERIAL, 4.0, t)
        assert abs(profile_4k.phi_at(t) - direct) < 5e-7


def test_build_profile_tolerance_halving():
    grid = np.linspace(0.0, 25.0, 11)
    loose = QuadratureConfig(rel_tol=2e-9, abs_tol=2e-11)
    tight = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-11)
    a = bath.build_profile(DEFAULT_MATERIAL, 4.0, 0.005, time_grid=grid, quad_cfg=loose)
    b = bath.build_profile(DEFAULT_MATERIAL, 4.0, 0.005, time_grid=grid, quad_cfg=tight)
    # halving tolerances moves omega_R, Phi(0), kappa by < 10x the tighter tolerance
    assert abs(a.reorg_energy - b.reorg_energy) < 10 * 1e-9 * abs(b.reorg_energy)
    assert abs(a.phi0 - b.phi0) < 10 * 1e-9 * abs(b.phi0)
    assert abs(a.kappa - b.kappa) < 10 * 1e-9


def test_build_profile_grid_validation():
    with pytest.raises(ValueError):
        bath.build_profile(DEFAULT_MATERIAL, 4.0, 0.005, time_grid=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        bath.build_profile(DEFAULT_MATERIAL, 4.0, 0.005, time_grid=np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        bath.build_profile(DEFAULT_MATERIAL, -4.0, 0.005)


def test_quadrature_nonconvergence_raises():
    starved = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=1)
    with pytest.raises(QuadratureError) as err:
        bath.reorg_energy(DEFAULT_MATERIAL, starved)
    assert err.value.residual is not None and err.value.residual > 0


def test_omega_max_must_exceed_cutoffs():
    with pytest.raises(ValueError):
        QuadratureConfig(omega_max=1.0).resolve_omega_max(DEFAULT_MATERIAL)


def test_scale_coupling_hits_kappa_target(profile_4k):
    target = 0.5
    factor = -2.0 * math.log(target) / profile_4k.phi0
    scaled = bath.scale_coupling(profile_4k, factor)
    assert scaled.kappa == pytest.approx(target, rel=1e-12)
    assert scaled.rate_sym + scaled.rate_asym == 2.0 * scaled.gamma
    assert bath.scale_coupling(profile_4k, 0.0).kappa == 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        bath.SpectralDensityParams(
            mass_density=-1.0, sound_speed=5110.0, deform_e=7.0, deform_h=-3.5,
            cutoff_e=1.8, cutoff_h=2.1,
        )
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
