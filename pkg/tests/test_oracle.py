import numpy as np
import pytest

from bergerflow.geometry import PeriodicGrid, sectional_curvatures
from bergerflow.initial_data import NeckBumpParams, neck_bump, product_data
from bergerflow.oracle import curvature_gap, riemann_oracle

from helpers import cosine_profile

NECK = NeckBumpParams(alpha=0.01, beta=0.05, eta=0.9, lambda_big=4.0,
                      delta_smooth=0.6)


def gap_at(profile):
    return curvature_gap(sectional_curvatures(profile), riemann_oracle(profile))


def test_round_product_exact():
    p = product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(512))
    oracle = riemann_oracle(p)
    assert np.allclose(oracle.kappa12, 1.0, atol=1e-12)
    assert np.allclose(oracle.kappa01, 0.0, atol=1e-12)
    assert gap_at(p)["max"] <= 1e-8


def test_berger_product_vertical_triple():
    p = product_data(0.5, 1, 1, 1.0, PeriodicGrid.of_size(512))
    oracle = riemann_oracle(p)
    assert oracle.kappa12[0] == pytest.approx(0.25, abs=1e-6)
    assert oracle.kappa23[0] == pytest.approx(3.25, abs=1e-6)
    assert oracle.kappa31[0] == pytest.approx(0.25, abs=1e-6)
    assert gap_at(p)["max"] <= 1e-6


def test_oracle_fiber_curvatures_generic():
    p = product_data(1, 2, 3, 1.0, PeriodicGrid.of_size(64))
    oracle = riemann_oracle(p)
    assert oracle.hat12[0] == pytest.approx(-4.0, abs=1e-12)


@pytest.mark.parametrize("family", ["cosine", "neck_bump"])
def test_refinement_order(family):
    gaps = []
    for n in (512, 1024, 2048):
        if family == "cosine":
            profile = cosine_profile(n)
        else:
            profile = neck_bump(NECK, PeriodicGrid.of_size(n))
        gaps.append(gap_at(profile)["max"])
    for coarse, fine in zip(gaps, gaps[1:]):
        assert coarse / fine >= 12.0, f"gaps {gaps}"
