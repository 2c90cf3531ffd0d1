import inspect

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import ensembles
import mcmqubit.oracle as oracle_mod
from mcmqubit.baselines import TwoStateProblem, helstrom_error
from mcmqubit.families import FamilySpec, build, golden
from mcmqubit.mcm import mcm, mcm_all
from mcmqubit.oracle import (
    GridSpec,
    OracleError,
    brute_min_inconclusive,
    dual_feasibility,
    grid_max_confidence,
    grid_min_error,
    sphere_grid,
)
from mcmqubit.qubit import bloch_to_density


def test_oracle_is_independent_of_engine():
    src = inspect.getsource(oracle_mod)
    for name in ("mcm", "inconclusive", "families", "baselines"):
        assert f"from .{name}" not in src and f"import {name}" not in src


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=10)
    with pytest.raises(ValueError):
        GridSpec(iterations=0)
    with pytest.raises(ValueError):
        GridSpec(shrink=1.0)


def test_sphere_grid_layout():
    g = sphere_grid(72)
    assert g.shape == (36 * 72, 3)
    assert np.allclose(np.linalg.norm(g, axis=1), 1)
    z = g[::72, 2]
    assert np.all(np.diff(z) < 0)  # theta increases row by row
    assert np.allclose(np.diff(z), np.diff(z)[0])  # cos(theta) uniformly spaced


def test_grid_examples():
    trine = build(FamilySpec("geometric_uniform", n=3, theta=np.pi / 2))
    assert grid_max_confidence(trine, 0).value == pytest.approx(2 / 3, abs=1e-6)
    tet = build(FamilySpec("tetrahedron", p=1.0))
    assert grid_max_confidence(tet, 2).value == pytest.approx(0.5, abs=1e-6)
    asym = build(FamilySpec("asymmetric_I", theta=np.pi))
    assert grid_max_confidence(asym, 0).value == pytest.approx(2 / 5, abs=1e-6)


def test_grid_is_deterministic():
    ens = build(FamilySpec("tetrahedron", p=0.0))  # every direction ties
    a = grid_max_confidence(ens, 1)
    b = grid_max_confidence(ens, 1)
    assert np.array_equal(a.direction, b.direction) and a.value == b.value
    assert np.array_equal(a.direction, sphere_grid(GridSpec().resolution)[0])


GOLDEN_CASES = [FamilySpec("two_noisy", p=p, theta=t) for p in (0.3, 1.0) for t in (0.4, 1.2, 2.5)] + [
    FamilySpec("geometric_uniform", n=n, theta=t) for n in (3, 5) for t in (0.5, np.pi / 2)] + [
    FamilySpec("tetrahedron", p=p) for p in (0.25, 1.0)] + [
    FamilySpec("asymmetric_I", theta=t) for t in (0.5, 2.0, np.pi)] + [
    FamilySpec("asymmetric_II", theta=t) for t in (0.3, 1.7)]


@pytest.mark.parametrize("spec", GOLDEN_CASES, ids=str)
def test_grid_agrees_with_golden_and_engine(spec):
    ens = build(spec)
    gold = golden(spec)
    for r in mcm_all(ens):
        found = grid_max_confidence(ens, r.index)
        assert abs(found.value - gold.confidence[r.index]) <= 1e-6
        assert found.direction @ r.m_hat >= 1 - 1e-8


def test_dual_feasibility_examples():
    ens = build(FamilySpec("asymmetric_I", theta=1.0))
    for r in mcm_all(ens):
        assert dual_feasibility(ens, r.index, 1.0) > 0
        assert -1e-9 <= dual_feasibility(ens, r.index, r.confidence) <= 1e-8
        assert dual_feasibility(ens, r.index, r.confidence - 0.01) < 0


@given(ensembles())
def test_dual_feasibility_monotone(ens):
    for x in range(len(ens)):
        vals = [dual_feasibility(ens, x, lam) for lam in np.linspace(0, 1, 10)]
        assert np.all(np.diff(vals) >= -1e-12)


def test_brute_inconclusive_examples():
    two = build(FamilySpec("two_noisy", p=1.0, theta=np.pi / 3))
    _, q = brute_min_inconclusive(two, [r.m_hat for r in mcm_all(two)])
    assert q == pytest.approx(0.5, abs=1e-5)
    gu = build(FamilySpec("geometric_uniform", n=3, theta=2 * np.pi / 5))
    _, q = brute_min_inconclusive(gu, [r.m_hat for r in mcm_all(gu)])
    assert q == pytest.approx(abs(np.cos(2 * np.pi / 5)), abs=1e-5)
    trine = build(FamilySpec("geometric_uniform", n=3, theta=np.pi / 2))
    a, q = brute_min_inconclusive(trine, [r.m_hat for r in mcm_all(trine)])
    assert q == pytest.approx(0.0, abs=1e-5)
    assert np.allclose(a, 2 / 3, atol=1e-3)


def test_brute_inconclusive_limits():
    ens = build(FamilySpec("tetrahedron", p=0.5))
    dirs = [r.m_hat for r in mcm_all(ens)]
    with pytest.raises(ValueError):
        brute_min_inconclusive(ens, dirs)
    with pytest.raises(OracleError):
        brute_min_inconclusive(ens, dirs[:2], slack=-1.0)


@settings(max_examples=30)
@given(ensembles(min_size=2, max_size=2))
def test_grid_min_error_matches_helstrom(ens):
    q0, q1 = ens.priors
    prob = TwoStateProblem(q0, q1, *ens.states)
    assert grid_min_error(q0, ens.states[0], q1, ens.states[1]) == pytest.approx(helstrom_error(prob), abs=1e-6)


def test_grid_min_error_example():
    th = np.pi / 4
    r0, r1 = bloch_to_density([np.sin(th), 0, np.cos(th)]), bloch_to_density([-np.sin(th), 0, np.cos(th)])
    assert grid_min_error(0.5, r0, 0.5, r1) == pytest.approx(0.5 * (1 - np.sin(th)), abs=1e-9)
