import warnings

import numpy as np
import pytest

from conftest import brute_quadratic, crandn
from grothendieck.config import DEFAULT_BUDGET, DEFAULT_TOL, KG_GENERAL_BOUND, KG_LITTLE, DomainError
from grothendieck.experiments import (
    HIST_EDGES,
    _scan_ratio,
    block_embedding,
    inequality_suite,
    ratio_scan,
    sample_matrix,
    sample_seeds,
    splitmix64,
)
from grothendieck.io import dumps
from grothendieck.torus import max_quadratic_torus


def test_splitmix64_reference_values():
    # published reference outputs of splitmix64 started from state 0
    assert sample_seeds(0, 3) == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    state, out = splitmix64(0)
    assert state == 0x9E3779B97F4A7C15 and out == 0xE220A8397B1DCDAF
    assert sample_seeds(2**64 + 5, 2) == sample_seeds(5, 2)


def test_sample_matrix(rng):
    for ens in ("ginibre", "nonnegative", "rank_one"):
        assert sample_matrix(ens, (3, 4), rng).shape == (3, 4)
    G = sample_matrix("gram", (4, 4), rng)
    assert np.allclose(np.diag(G), 1) and np.linalg.eigvalsh(G)[0] >= -1e-12
    assert np.linalg.matrix_rank(sample_matrix("rank_one", (3, 3), rng)) == 1
    assert np.all(sample_matrix("nonnegative", (2, 2), rng).real >= 0)
    with pytest.raises(DomainError):
        sample_matrix("wishart", (2, 2), rng)


def test_block_embedding_random(rng):
    for _ in range(5):
        m, n = rng.integers(1, 5, size=2)
        e = block_embedding(crandn(rng, m, n))
        c = e.checks
        assert c["cbb_P"] == pytest.approx(4, abs=1e-5)
        assert c["trace_QP"] == pytest.approx(4, abs=1e-5)
        assert c["schur_Q"] == pytest.approx(1, abs=1e-6)
        assert c["max_diag_Q"] <= 1 + 1e-8
        assert c["B_P_consistent"]
        assert c["displayed_slack"] >= -1e-6
        assert np.linalg.eigvalsh(e.P)[0] >= -1e-9
        assert np.linalg.norm(e.gamma) == pytest.approx(1, abs=1e-9)


def test_block_embedding_rank_one(rng):
    e = block_embedding(np.outer(crandn(rng, 3), crandn(rng, 2)))
    assert e.checks["B_X"][0] == pytest.approx(1, abs=1e-6)
    assert e.checks["B_P"][0] == pytest.approx(4, abs=1e-5)


def test_block_embedding_trims_support():
    X = np.array([[1.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        e = block_embedding(X)
    assert any("vanishing" in str(x.message) for x in w)
    assert e.X.shape == (1, 2)
    assert list(e.rows) == [0] and list(e.cols) == [0, 2]
    with pytest.raises(DomainError):
        block_embedding(np.zeros((2, 2)))


def test_scan_ratio_examples():
    r, cert = _scan_ratio("positive", np.ones((2, 2)), DEFAULT_BUDGET, DEFAULT_TOL)
    assert r == pytest.approx(1, abs=1e-8) and cert
    rep = ratio_scan("general", (3, 2), 10, seed=1, ensemble="rank_one")
    assert np.allclose(rep.ratios, 1, atol=1e-6)


def test_positive_ensemble_validated_on_small_grid():
    # on 3 x 3 Gram samples the torus search matches an exhaustive phase grid
    seeds = sample_seeds(11, 6)
    for s in seeds:
        P = sample_matrix("gram", (3, 3), np.random.default_rng(s))
        got = max_quadratic_torus(P).lower
        ref = brute_quadratic(P, 240)
        assert got >= ref * (1 - 1e-6)
        assert got <= ref * (1 + 1e-3)


def test_ratio_scan_report():
    rep = ratio_scan("positive", 4, 12, seed=3, ensemble="gram")
    assert rep.samples == 12
    assert rep.within_bound and rep.max_ratio <= KG_LITTLE + 1e-3
    assert np.all(rep.ratios >= 1 - 1e-9)
    assert rep.histogram.sum() == 12 and len(rep.histogram) == 64
    assert len(HIST_EDGES) == 65
    d = rep.to_dict()
    assert d["samples"] == 12 and d["argmax_seed"] == rep.seeds[rep.argmax]
    assert rep.argmax_matrix.shape == (4, 4)
    again = ratio_scan("positive", 4, 12, seed=3, ensemble="gram")
    assert np.array_equal(rep.ratios, again.ratios)


def test_little_and_general_scans():
    rep = ratio_scan("little", (3, 4), 10, seed=5)
    assert rep.max_ratio <= np.sqrt(KG_LITTLE) + 1e-3
    rep = ratio_scan("general", (3, 3), 10, seed=5)
    assert rep.max_ratio <= KG_GENERAL_BOUND + 1e-2
    assert rep.to_dict()["context"]["literature_window"] == [1.338, 1.4049]


def test_ratio_scan_errors():
    with pytest.raises(DomainError):
        ratio_scan("huge", 3, 1)
    with pytest.raises(DomainError):
        ratio_scan("positive", 3, 0)
    with pytest.raises(DomainError):
        ratio_scan("positive", (2, 3), 1)
    with pytest.raises(DomainError):
        ratio_scan("general", 3, 1, ensemble="cauchy")


def test_suite_empty():
    r = inequality_suite(samples=0)
    assert r["checks"] == [] and r["status"] == "pass"


def test_suite_single_rank_one_sample():
    r = inequality_suite(seed=1, samples=1, families=["rank_one"])
    assert r["status"] == "pass"
    assert len(r["checks"]) == 10
    assert all(c["count"] == 1 and c["pass"] for c in r["checks"])


def test_suite_small_run_is_reproducible():
    fams = ["nonnegative", "cbb_chain", "duality", "little"]
    a = dumps(inequality_suite(seed=7, samples=3, max_size=3, families=fams))
    b = dumps(inequality_suite(seed=7, samples=3, max_size=3, families=fams))
    assert a == b
    assert '"status": "pass"' in a
    with pytest.raises(DomainError):
        inequality_suite(samples=1, families=["nope"])
