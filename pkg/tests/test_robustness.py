import csv
import math

import numpy as np
import pytest

from edlkit import robustness, states
from edlkit.robustness import MisalignmentSpec, ToleranceCurve, crossover, default_grid, misalign_expr, tolerance_curve, write_curves_csv
from edlkit.witness import ObservableExpr, evaluate, load_paper_witness, p_noise, projector_witness

D4_RHO = states.density(states.make_state("D4"))


def test_zero_angle_is_identity():
    w = load_paper_witness("D4", 5)
    for mode in robustness.MODES:
        out = misalign_expr(w.expr, MisalignmentSpec(0.0, mode))
        assert out.isclose(w.expr)


def test_all_axes_letter_substitution():
    theta = 0.3
    c, s = math.cos(theta), math.sin(theta)
    spec = MisalignmentSpec(theta, "all_axes")
    out = misalign_expr(ObservableExpr(1, {"X": 1.0}), spec)
    assert out.terms == pytest.approx({"X": c, "Y": s})
    out = misalign_expr(ObservableExpr(1, {"Y": 1.0}), spec)
    assert out.terms == pytest.approx({"Y": c, "Z": s})
    out = misalign_expr(ObservableExpr(1, {"Z": 1.0}), spec)
    assert out.terms == pytest.approx({"Z": c, "X": s})


def test_y_only_leaves_x_and_z():
    theta = 0.25
    spec = MisalignmentSpec(theta, "y_only")
    expr = ObservableExpr(2, {"XZ": 0.5, "YI": 1.0})
    out = misalign_expr(expr, spec)
    assert out.terms == pytest.approx(
        {"XZ": 0.5, "YI": math.cos(theta), "ZI": math.sin(theta)}
    )


def test_misalignment_preserves_trace_and_identity():
    w = load_paper_witness("C4", 4)
    out = misalign_expr(w.expr, MisalignmentSpec(0.4, "all_axes"))
    assert out.trace() == pytest.approx(w.expr.trace(), abs=1e-12)
    assert out.identity_coeff == pytest.approx(w.expr.identity_coeff, abs=1e-14)


def test_misaligned_word_is_a_product_of_unit_observables():
    # each tilted letter has unit Bloch norm, so the square of the one-qubit
    # misaligned X is the identity
    spec = MisalignmentSpec(0.7, "all_axes")
    m = misalign_expr(ObservableExpr(1, {"X": 1.0}), spec).matrix()
    assert np.max(np.abs(m @ m - np.eye(2))) < 1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        MisalignmentSpec(0.1, "sideways")
    with pytest.raises(ValueError):
        MisalignmentSpec(float("nan"), "all_axes")
    with pytest.warns(UserWarning):
        MisalignmentSpec(2.0, "all_axes")


def test_default_grid():
    grid = default_grid()
    assert len(grid) == 121
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(0.6)
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_tolerance_curve_at_zero_matches_clean_p_noise():
    w = load_paper_witness("D4", 5)
    curve = tolerance_curve(w, D4_RHO, default_grid(), mode="all_axes")
    assert curve.witness_label == "D4-5"
    assert curve.tolerances[0] == pytest.approx(p_noise(w.expr, D4_RHO), abs=1e-12)
    assert curve.tolerances[0] == pytest.approx(0.3131, abs=2e-3)


def test_tolerance_curve_decreases_then_dies():
    w = load_paper_witness("W3", 2)
    rho = states.density(states.make_state("W3"))
    curve = tolerance_curve(w, rho, default_grid(stop=1.5, step=0.05))
    tail_none = [t for t in curve.tolerances if t is None]
    head = [t for t in curve.tolerances if t is not None]
    assert head[0] > head[-1]        # misalignment costs tolerance overall
    assert tail_none                 # far enough out the witness goes blind
    # None entries appear only after the last detected angle
    first_none = curve.tolerances.index(None)
    assert all(t is None for t in curve.tolerances[first_none:])


def test_tolerance_curve_grid_validation():
    w = load_paper_witness("D4", 5)
    with pytest.raises(ValueError):
        tolerance_curve(w, D4_RHO, [])
    with pytest.raises(ValueError):
        tolerance_curve(w, D4_RHO, [0.2, 0.1])


def test_curve_length_mismatch_rejected():
    with pytest.raises(ValueError):
        ToleranceCurve(thetas=(0.0, 0.1), tolerances=(0.5,), witness_label="x")


def test_crossover_d4_witness_vs_projector():
    w5 = load_paper_witness("D4", 5)
    proj = projector_witness(states.make_state("D4"), label="projector")
    theta_all = crossover(w5, proj, D4_RHO, mode="all_axes")
    theta_y = crossover(w5, proj, D4_RHO, mode="y_only")
    assert theta_all == pytest.approx(0.2649, abs=5e-4)
    assert theta_y == pytest.approx(0.2937, abs=5e-4)
    # the projector starts higher but decays faster: it wins below the
    # crossover and loses above it
    for theta, proj_wins in ((theta_all / 2, True), (0.35, False)):
        spec = MisalignmentSpec(theta, "all_axes")
        pa = p_noise(misalign_expr(w5.expr, spec), D4_RHO)
        pb = p_noise(misalign_expr(proj.expr, spec), D4_RHO)
        assert (pb > pa) == proj_wins


def test_crossover_requires_a_sign_change():
    w = load_paper_witness("D4", 5)
    with pytest.raises(ValueError):
        crossover(w, w, D4_RHO)


def test_write_curves_csv_roundtrip(tmp_path):
    w = load_paper_witness("W3", 1)
    rho = states.density(states.make_state("W3"))
    grid = default_grid(stop=1.2, step=0.1)
    curve_a = tolerance_curve(w, rho, grid)
    curve_b = tolerance_curve(projector_witness(states.make_state("W3")), rho, grid)
    path = tmp_path / "curves.csv"
    write_curves_csv(path, curve_a, curve_b)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(grid)
    assert set(rows[0]) == {"theta", "tolerance_a", "tolerance_b"}
    for row, ta in zip(rows, curve_a.tolerances):
        if ta is None:
            assert row["tolerance_a"] == ""
        else:
            assert float(row["tolerance_a"]) == ta  # repr() round-trips exactly


def test_write_curves_csv_grid_mismatch(tmp_path):
    w = load_paper_witness("W3", 1)
    rho = states.density(states.make_state("W3"))
    a = tolerance_curve(w, rho, default_grid(stop=0.2, step=0.1))
    b = tolerance_curve(w, rho, default_grid(stop=0.3, step=0.1))
    with pytest.raises(ValueError):
        write_curves_csv(tmp_path / "x.csv", a, b)
