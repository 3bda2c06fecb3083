import itertools

import numpy as np
import pytest


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n):
    q, r = np.linalg.qr(crandn(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def brute_quadratic(H, points=360):
    """max u* H u over a phase grid (u_0 = 1); independent of the package."""
    n = H.shape[0]
    grid = np.exp(2j * np.pi * np.arange(points) / points)
    best = -np.inf
    for ph in itertools.product(grid, repeat=n - 1):
        u = np.concatenate([[1.0], ph])
        best = max(best, float(np.real(np.conj(u) @ H @ u)))
    return best


def brute_bilinear(X, points=360):
    """max |s^T X t| with s on a grid and t optimal in closed form."""
    m = X.shape[0]
    grid = np.exp(2j * np.pi * np.arange(points) / points)
    best = 0.0
    for ph in itertools.product(grid, repeat=m - 1):
        s = np.concatenate([[1.0], ph])
        best = max(best, float(np.abs(s @ X).sum()))
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one pass/fail line per acceptance criterion."""

    def _record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
