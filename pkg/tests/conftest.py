import numpy as np
import pytest
from hypothesis import strategies as st

from rthpower.fitting import MeasurementRecord
from rthpower.model import IntensityParams, OpMix, PlatformProfile, app_power
from rthpower.reference import reference_profile

OPS = ("SAUXOR", "SAUMUL", "VAUXOR", "VAUMUL", "IAUXOR", "IAUMUL", "CMUCPSS", "CMUCPIVR", "LSULOAD", "LSUSTORE")


@pytest.fixture(scope="session")
def profile():
    return reference_profile()


def synthetic_records(profile, params, mix, cores, noise=0.0, rng=None, name="SYN"):
    out = []
    for n in cores:
        p = app_power(profile, params, mix, params.intensity, n)
        if noise:
            p *= 1.0 + noise * rng.standard_normal()
        out.append(MeasurementRecord(name, params.intensity, n, p))
    return out


finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def profiles(draw, max_cores=8):
    k = draw(st.integers(1, 5))
    names = draw(st.lists(st.sampled_from(OPS), min_size=k, max_size=k, unique=True))
    powers = draw(st.lists(st.floats(0.5, 80, **finite), min_size=k, max_size=k))
    return PlatformProfile.from_table(
        draw(st.floats(5, 200, **finite)),
        draw(st.floats(1, 60, **finite)),
        dict(zip(names, powers)),
        p_lsu=draw(st.floats(1, 60, **finite)),
        max_cores=max_cores,
    )


@st.composite
def mixes(draw, profile):
    return OpMix(draw(st.lists(st.sampled_from(sorted(profile.ops)), min_size=0, max_size=3)))


@st.composite
def params_at(draw, intensity=None, m_max=8.0):
    i = intensity if intensity is not None else draw(st.floats(0.05, 64, **finite))
    return IntensityParams(
        i,
        draw(st.floats(0.01, 256, **finite)),
        draw(st.floats(1.0, m_max, **finite)),
        draw(st.floats(0.0, 100, **finite)),
    )


def rng(seed=0):
    return np.random.default_rng(seed)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
