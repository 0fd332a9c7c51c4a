"""Shared fixtures: bath profiles are expensive (adaptive quadrature per
grid point), so the standard ones are built once per session."""

import dataclasses
import math

import numpy as np
import pytest

from polaron_dicke import DEFAULT_MATERIAL, bath

GAMMA = 0.005  # ps^-1, radiative lifetime 0.2 ns


@pytest.fixture(scope="session")
def profile_4k():
    return bath.build_profile(DEFAULT_MATERIAL, 4.0, GAMMA)


@pytest.fixture(scope="session")
def profile_77k():
    return bath.build_profile(DEFAULT_MATERIAL, 77.0, GAMMA)


@pytest.fixture(scope="session")
def profile_zero():
    params = dataclasses.replace(DEFAULT_MATERIAL, deform_e=0.0, deform_h=0.0)
    return bath.build_profile(params, 4.0, GAMMA)


@pytest.fixture(scope="session")
def profile_with_kappa(profile_4k):
    """Factory: rescale the 4 K coupling so kappa hits a target exactly."""

    def make(kappa_target, gamma=None):
        profile = profile_4k
        if gamma is not None:
            rate_sym, rate_asym = bath.collective_rates(gamma, profile.kappa)
            profile = dataclasses.replace(
                profile, gamma=gamma, rate_sym=rate_sym, rate_asym=rate_asym
            )
        if kappa_target == 1.0:
            return bath.scale_coupling(profile, 0.0)
        if kappa_target == 0.0:
            return bath.scale_coupling(profile, 1e8)
        factor = -2.0 * math.log(kappa_target) / profile.phi0
        return bath.scale_coupling(profile, factor)

    return make


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
