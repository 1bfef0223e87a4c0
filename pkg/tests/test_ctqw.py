"""Propagator and site-distribution behavior."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwtopo.ctqw import (
    ConcatenatedDistribution,
    ProbeState,
    SiteDistribution,
    TimeGrid,
    batch_site_distributions,
    concatenated_distribution,
    site_distribution,
    spectral_propagator,
)
from qwtopo.errors import ShapeError
from qwtopo.graph import CouplingString, TopologyKind, TopologySpec, build_topology, to_hamiltonian


def random_coupling(n: int, rng: np.random.Generator) -> CouplingString:
    return CouplingString(rng.integers(0, 2, size=n * (n - 1) // 2, dtype=np.uint8), n)


def taylor_propagator(h: np.ndarray, t: float, terms: int = 30) -> np.ndarray:
    """Independent oracle: truncated series sum (-iHt)^m / m!."""
    n = h.shape[0]
    result = np.zeros((n, n), dtype=complex)
    term = np.eye(n, dtype=complex)
    for m in range(terms + 1):
        result += term
        term = term @ (-1j * t * h) / (m + 1)
    return result


def test_probe_state_requires_normalization() -> None:
    with pytest.raises(ValueError):
        ProbeState(np.array([1.0, 1.0]))


def test_probe_state_rejects_bad_shape() -> None:
    with pytest.raises(ShapeError):
        ProbeState(np.ones((2, 2)) / 2)


def test_probe_constructors() -> None:
    ramp = ProbeState.ramp(4)
    expected = np.array([1, 2, 3, 4]) / math.sqrt(30)
    assert np.allclose(ramp.amplitudes, expected)
    assert (ramp.amplitudes > 0).all()

    uniform = ProbeState.uniform(4)
    assert np.allclose(uniform.amplitudes, 0.5)

    localized = ProbeState.localized(3, site=1)
    assert np.allclose(localized.amplitudes, [0, 1, 0])
    with pytest.raises(ShapeError):
        ProbeState.localized(3, site=3)


def test_time_grid_validation() -> None:
    with pytest.raises(ShapeError):
        TimeGrid(())
    with pytest.raises(ShapeError):
        TimeGrid((-0.1, 0.5))
    with pytest.raises(ShapeError):
        TimeGrid((0.5, 0.5))
    with pytest.raises(ShapeError):
        TimeGrid((0.6, 0.5))
    assert TimeGrid((0.0, 0.5)).times == (0.0, 0.5)


def test_time_grid_parse() -> None:
    assert TimeGrid.parse("0.5,0.6,1").times == (0.5, 0.6, 1.0)
    with pytest.raises(ShapeError):
        TimeGrid.parse("0.5,x")


def test_site_distribution_validation() -> None:
    with pytest.raises(ValueError):
        SiteDistribution(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        SiteDistribution(np.array([-0.1, 1.1]))


def test_propagator_zero_hamiltonian_is_identity() -> None:
    for n in (1, 2, 5):
        u = spectral_propagator(np.zeros((n, n)), 0.7)
        assert np.allclose(u, np.eye(n), atol=1e-12)


def test_propagator_zero_time_is_identity() -> None:
    h = to_hamiltonian(build_topology(TopologySpec(TopologyKind.CIRCLE), 5))
    assert np.allclose(spectral_propagator(h, 0.0), np.eye(5), atol=1e-12)


def test_propagator_two_node_closed_form() -> None:
    # e^{-i sigma_x t} = cos t * I - i sin t * sigma_x
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    t = math.pi / 2
    u = spectral_propagator(h, t)
    assert np.allclose(np.abs(u), [[0, 1], [1, 0]], atol=1e-10)
    expected = math.cos(t) * np.eye(2) - 1j * math.sin(t) * h
    assert np.allclose(u, expected, atol=1e-10)


def test_propagator_rejects_bad_input() -> None:
    with pytest.raises(ShapeError):
        spectral_propagator(np.zeros((2, 3)), 0.5)
    with pytest.raises(ShapeError):
        spectral_propagator(np.array([[0.0, 1.0], [0.5, 0.0]]), 0.5)


def test_propagator_unitary_random() -> None:
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        h = to_hamiltonian(random_coupling(n, rng))
        t = float(rng.uniform(0, 3))
        u = spectral_propagator(h, t)
        assert np.max(np.abs(u @ u.conj().T - np.eye(n))) < 1e-10


def test_propagator_composition() -> None:
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        h = to_hamiltonian(random_coupling(n, rng))
        t1, t2 = rng.uniform(0, 2, size=2)
        u12 = spectral_propagator(h, t1 + t2)
        assert np.max(np.abs(u12 - spectral_propagator(h, t1) @ spectral_propagator(h, t2))) < 1e-9


def test_propagator_matches_taylor_series() -> None:
    rng = np.random.default_rng(13)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        h = to_hamiltonian(random_coupling(n, rng))
        t = float(rng.uniform(0, 1))
        u = spectral_propagator(h, t)
        assert np.max(np.abs(u - taylor_propagator(h, t))) < 1e-9


def test_site_distribution_at_time_zero() -> None:
    rng = np.random.default_rng(14)
    cs = random_coupling(5, rng)
    psi0 = ProbeState.ramp(5)
    dist = site_distribution(cs, psi0, 0.0)
    assert np.allclose(dist.probs, np.abs(psi0.amplitudes) ** 2, atol=1e-12)


def test_site_distribution_two_node_closed_form() -> None:
    cs = CouplingString(np.array([1]), 2)
    psi0 = ProbeState.localized(2)
    for t in (0.1, 0.5, 0.6, 1.0, math.pi / 2):
        dist = site_distribution(cs, psi0, t)
        assert abs(dist.probs[0] - math.cos(t) ** 2) < 1e-10
        assert abs(dist.probs[1] - math.sin(t) ** 2) < 1e-10


def test_site_distribution_uniform_probe_is_stationary_on_complete() -> None:
    cs = build_topology(TopologySpec(TopologyKind.COMPLETE), 5)
    psi0 = ProbeState.uniform(5)
    for t in (0.3, 0.9, 2.0):
        dist = site_distribution(cs, psi0, t)
        assert np.allclose(dist.probs, 0.2, atol=1e-10)


def test_site_distribution_rejects_mismatched_probe() -> None:
    cs = CouplingString(np.array([1]), 2)
    with pytest.raises(ShapeError):
        site_distribution(cs, ProbeState.ramp(3), 0.5)


def test_site_distribution_single_node() -> None:
    cs = CouplingString(np.zeros(0, dtype=np.uint8), 1)
    dist = site_distribution(cs, ProbeState.ramp(1), 0.8)
    assert np.allclose(dist.probs, [1.0], atol=1e-12)


def test_concatenated_single_slice_matches_site_distribution() -> None:
    rng = np.random.default_rng(15)
    cs = random_coupling(6, rng)
    psi0 = ProbeState.ramp(6)
    combined = concatenated_distribution(cs, psi0, TimeGrid((0.7,)))
    single = site_distribution(cs, psi0, 0.7)
    assert combined.k == 1
    assert np.allclose(combined.slices[0].probs, single.probs, atol=1e-12)


def test_concatenated_two_node_example() -> None:
    cs = CouplingString(np.array([1]), 2)
    psi0 = ProbeState.localized(2)
    dist = concatenated_distribution(cs, psi0, TimeGrid((0.5, 0.6)))
    expected = [
        math.cos(0.5) ** 2,
        math.sin(0.5) ** 2,
        math.cos(0.6) ** 2,
        math.sin(0.6) ** 2,
    ]
    assert np.allclose(dist.flat, expected, atol=1e-10)
    # four-decimal reference values; the closed form above is authoritative
    assert np.allclose(dist.flat, [0.7702, 0.2298, 0.6812, 0.3188], atol=5e-5)


def test_concatenated_empty_graph_repeats_initial_state() -> None:
    cs = CouplingString(np.zeros(10, dtype=np.uint8), 5)
    psi0 = ProbeState.ramp(5)
    dist = concatenated_distribution(cs, psi0, TimeGrid((0.5, 0.6, 1.0)))
    expected = np.abs(psi0.amplitudes) ** 2
    for s in dist.slices:
        assert np.allclose(s.probs, expected, atol=1e-12)


def test_concatenated_matrix_round_trip() -> None:
    rng = np.random.default_rng(16)
    cs = random_coupling(4, rng)
    dist = concatenated_distribution(cs, ProbeState.ramp(4), TimeGrid((0.5, 0.6)))
    rebuilt = ConcatenatedDistribution.from_matrix(dist.as_matrix())
    assert np.array_equal(rebuilt.flat, dist.flat)
    assert rebuilt.n == 4 and rebuilt.k == 2


def test_concatenated_validation() -> None:
    with pytest.raises(ShapeError):
        ConcatenatedDistribution(())
    a = SiteDistribution(np.array([0.5, 0.5]))
    b = SiteDistribution(np.array([0.2, 0.3, 0.5]))
    with pytest.raises(ShapeError):
        ConcatenatedDistribution((a, b))
    with pytest.raises(ShapeError):
        ConcatenatedDistribution.from_matrix(np.zeros(4))


def test_every_distribution_normalized() -> None:
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        cs = random_coupling(n, rng)
        amps = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi0 = ProbeState(amps / np.linalg.norm(amps))
        t = float(rng.uniform(0, 3))
        dist = site_distribution(cs, psi0, t)
        assert abs(dist.probs.sum() - 1) < 1e-10


@settings(deadline=None, max_examples=30)
@given(
    st.integers(min_value=2, max_value=7),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_relabeling_covariance(n: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    cs = random_coupling(n, rng)
    perm = rng.permutation(n)
    psi0 = ProbeState.ramp(n)

    relabeled_bits = np.zeros_like(cs.bits)
    for x in range(n):
        for y in range(x + 1, n):
            px, py = sorted((perm[x], perm[y]))
            relabeled_bits[
                px * n - px * (px + 1) // 2 + py - px - 1
            ] = cs.bits[x * n - x * (x + 1) // 2 + y - x - 1]
    relabeled = CouplingString(relabeled_bits, n)
    moved = np.zeros(n, dtype=complex)
    moved[perm] = psi0.amplitudes
    psi_moved = ProbeState(moved)

    t = 0.8
    base = site_distribution(cs, psi0, t).probs
    mapped = site_distribution(relabeled, psi_moved, t).probs
    assert np.allclose(mapped[perm], base, atol=1e-10)


def test_batch_matches_scalar_pipeline() -> None:
    rng = np.random.default_rng(18)
    bits = rng.integers(0, 2, size=(6, 10), dtype=np.uint8)
    psi0 = ProbeState.ramp(5)
    times = (0.5, 0.6)
    batch = batch_site_distributions(bits, 5, psi0.amplitudes, times)
    for row, slab in zip(bits, batch):
        direct = concatenated_distribution(CouplingString(row, 5), psi0, TimeGrid(times))
        assert np.array_equal(slab.reshape(-1), direct.flat)
