import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cvlab.geom import jacobi_eigenvalues


@settings(max_examples=60)
@given(st.integers(1, 6).flatmap(lambda n: arrays(float, (n, n), elements=st.floats(-1e3, 1e3))))
def test_matches_lapack(a):
    m = a + a.T
    ours = jacobi_eigenvalues(m)
    ref = np.linalg.eigvalsh(m)
    assert np.allclose(ours, ref, atol=1e-11 * max(1.0, float(np.max(np.abs(ref)))))


def test_batched_and_sorted():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((7, 5, 4, 4))
    m = a + np.swapaxes(a, -1, -2)
    ev = jacobi_eigenvalues(m)
    assert ev.shape == (7, 5, 4)
    assert np.all(np.diff(ev, axis=-1) >= 0)
    assert np.allclose(ev, np.linalg.eigvalsh(m), atol=1e-12)


def test_diagonal_input():
    assert np.array_equal(jacobi_eigenvalues(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])
