import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mcmqubit.ensemble import Ensemble
from mcmqubit.qubit import ket_to_density

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

unit = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def bloch_vectors(draw, pure=None):
    v = np.array([draw(unit), draw(unit), draw(unit)])
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        v, norm = np.array([0.0, 0.0, 1.0]), 1.0
    is_pure = draw(st.booleans()) if pure is None else pure
    radius = 1.0 if is_pure else draw(st.floats(0.0, 1.0))
    return v / norm * radius


@st.composite
def ensembles(draw, min_size=2, max_size=6):
    n = draw(st.integers(min_size, max_size))
    w = np.array([draw(st.floats(0.05, 1.0)) for _ in range(n)])
    blochs = [draw(bloch_vectors()) for _ in range(n)]
    return Ensemble.from_blochs(w / w.sum(), blochs)


@st.composite
def hermitian(draw, scale=10.0):
    f = st.floats(-scale, scale, allow_nan=False)
    a, d, re, im = draw(f), draw(f), draw(f), draw(f)
    return np.array([[a, re + 1j * im], [re - 1j * im, d]])


def ket_state(theta, phi=0.0):
    """Density operator built from cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, independent of the Bloch map."""
    return ket_to_density([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def well_conditioned(ens, floor=1e-6):
    """Closed forms divide by 1 - |n(rho)|^2; below ``floor`` one ulp of input moves the answer past 1e-9."""
    n = ens.avg_bloch
    return 1 - n @ n >= floor
