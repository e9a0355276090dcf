import numpy as np
import pytest


def l1_normalize_slices(values: np.ndarray) -> np.ndarray:
    """Normalize each (alpha, date) slice of an N-by-M-by-d tensor to unit L1."""
    return values / np.abs(values).sum(axis=1, keepdims=True)


def random_instance(rng, n, m, d, scale=0.01):
    """Generic unconstrained (eta, positions) pair, positions L1-normalized."""
    positions = l1_normalize_slices(rng.standard_normal((n, m, d)))
    eta = scale * rng.standard_normal((n, d))
    return eta, positions


def dollar_neutral_instance(rng, n, m, d, scale=0.01):
    """(eta, positions) with every slice summing to zero and unit L1 norm."""
    raw = rng.standard_normal((n, m, d))
    raw -= raw.mean(axis=1, keepdims=True)
    positions = l1_normalize_slices(raw)
    eta = scale * rng.standard_normal((n, d))
    return eta, positions


def constrained_instance(rng, n, m, d, p, scale=0.01):
    """(eta, positions, q) with positions projected onto a random rank-p null space."""
    q = rng.standard_normal((m, p))
    raw = rng.standard_normal((n, m, d))
    basis, _ = np.linalg.qr(q)
    for s in range(d):
        raw[:, :, s] -= (raw[:, :, s] @ basis) @ basis.T
    positions = l1_normalize_slices(raw)
    eta = scale * rng.standard_normal((n, d))
    return eta, positions, q


def random_spd(rng, m, scale=1.0):
    a = rng.standard_normal((m, 2 * m))
    cov = scale * (a @ a.T) / (2 * m)
    cov[np.diag_indices_from(cov)] += 0.1 * scale
    return 0.5 * (cov + cov.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
