import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def unit_vectors(min_pole_gap: float = 0.0):
    """Strategy producing unit 3-vectors; optionally bounded away from n_z = -1."""

    def build(raw):
        v = np.asarray(raw, dtype=float)
        norm = np.linalg.norm(v)
        if norm < 1e-3:
            return None
        n = v / norm
        if min_pole_gap and n[2] < -1.0 + min_pole_gap:
            return None
        return n

    return (
        st.tuples(
            st.floats(-1, 1, allow_nan=False),
            st.floats(-1, 1, allow_nan=False),
            st.floats(-1, 1, allow_nan=False),
        )
        .map(build)
        .filter(lambda n: n is not None)
    )


def random_unit_array(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.normal(size=(count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
