import math

import numpy as np
import pytest

from edlkit import measure, states
from edlkit.measure import (
    CountTable,
    ExpectationRecord,
    MeasurementSetting,
    combine,
    combine_plan,
    estimate_expectations,
    fidelity_settings,
    outcome_probabilities,
    parse_operator,
    plan_settings,
    read_count_file,
    read_expectation_csv,
    sample_counts,
    simulate_counts,
    write_count_files,
    write_expectation_csv,
)
from edlkit.witness import ObservableExpr, evaluate, load_paper_witness


# --- operator grammar ------------------------------------------------------

def test_parse_plain_word():
    op = parse_operator("XZY", 3)
    assert op.axes == ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.0, 1.0, 0.0))
    assert op.expr().terms == {"XZY": pytest.approx(1.0)}


def test_parse_identity_word():
    op = parse_operator("III", 3)
    assert op.axes == (None, None, None)
    assert op.expr().terms == {"III": pytest.approx(1.0)}


def test_parse_indexed_factors():
    op = parse_operator("Z1Y3Y4", 4)
    assert op.expr().terms == {"ZIYY": pytest.approx(1.0)}
    assert parse_operator("X1X2", 4).expr().terms == {"XXII": pytest.approx(1.0)}


def test_parse_whitespace_ignored():
    assert parse_operator(" Z1 Z2 ", 3).text == "Z1Z2"


def test_parse_composite_uniform():
    op = parse_operator("[(Z+X)/r2]x2", 2)
    terms = op.expr().terms
    assert terms == pytest.approx({"ZZ": 0.5, "ZX": 0.5, "XZ": 0.5, "XX": 0.5})
    minus = parse_operator("[(Z-Y)/r2]x2", 2).expr().terms
    assert minus == pytest.approx({"ZZ": 0.5, "ZY": -0.5, "YZ": -0.5, "YY": 0.5})


def test_parse_composite_subset():
    op = parse_operator("[(Z+X)/r2]_1,3", 3)
    assert op.axes[1] is None
    terms = op.expr().terms
    assert terms == pytest.approx({"ZIZ": 0.5, "ZIX": 0.5, "XIZ": 0.5, "XIX": 0.5})


@pytest.mark.parametrize("bad", [
    "", "XX", "XXXXX", "[(X+X)/r2]x3", "[(Z+X)/r2]x4", "[(Z+X)/r2]_0,2",
    "X1X1", "X9", "Q1", "X1+X2", "[(Z*X)/r2]x3",
])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_operator(bad, 3)


def test_outcome_sign():
    op = parse_operator("ZIZ", 3)
    # outcome bits: qubit 1 is the most significant
    assert op.outcome_sign(0b000) == 1
    assert op.outcome_sign(0b100) == -1
    assert op.outcome_sign(0b101) == 1
    assert op.outcome_sign(0b010) == 1  # middle qubit not measured


# --- settings --------------------------------------------------------------

def test_setting_from_word_and_label():
    s = MeasurementSetting.from_word("XIZ")
    assert s.label() == "XIZ"
    assert s.axes[1] is None


def test_setting_label_for_tilted_axis():
    op = parse_operator("[(Z+X)/r2]x2", 2)
    s = MeasurementSetting(2, op.axes)
    assert s.label().count("(") == 2  # non-Pauli axes print as vectors


def test_setting_covers_marginals():
    full = MeasurementSetting.from_word("ZZZ")
    assert full.covers(parse_operator("Z1Z2", 3))
    assert full.covers(parse_operator("Z2", 3))
    assert not full.covers(parse_operator("X1", 3))
    assert not full.covers(parse_operator("Z1Z2", 2))


def test_setting_axis_validation():
    with pytest.raises(ValueError):
        MeasurementSetting(2, ((1.0, 1.0, 0.0), None))
    with pytest.raises(ValueError):
        MeasurementSetting(2, (None,))


def test_plan_settings_grouping():
    expr = ObservableExpr(3, {"ZZI": 1.0, "IZZ": 0.5, "ZIZ": 0.25, "XXI": -1.0, "III": 0.1})
    plan = plan_settings(expr)
    # all Z words share one setting; XX needs its own
    assert len(plan) == 2
    labels = sorted(setting.label() for setting, _ in plan)
    assert labels == ["XXI", "ZZZ"]
    covered = sorted(w for _, words in plan for w in words)
    assert covered == ["IZZ", "XXI", "ZIZ", "ZZI"]


def test_plan_settings_covers_catalog_witness():
    w = load_paper_witness("D4", 5)
    plan = plan_settings(w.expr)
    words = {word for _, group in plan for word in group}
    assert words == {t for t in w.expr.terms if set(t) != {"I"}}
    for setting, group in plan:
        for word in group:
            assert setting.covers(parse_operator(word, 4))


# --- simulation ------------------------------------------------------------

def test_outcome_probabilities_computational_basis():
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = 1.0  # |01>
    probs = outcome_probabilities(rho, MeasurementSetting.from_word("ZZ"))
    assert probs == pytest.approx([0, 1, 0, 0])


def test_outcome_probabilities_unmeasured_qubit_reports_plus():
    rho = np.eye(4, dtype=complex) / 4
    probs = outcome_probabilities(rho, MeasurementSetting.from_word("ZI"))
    assert probs == pytest.approx([0.5, 0.0, 0.5, 0.0])


def test_outcome_probabilities_x_basis():
    plus = np.full((2, 2), 0.5, dtype=complex)
    probs = outcome_probabilities(plus, MeasurementSetting.from_word("X"))
    assert probs == pytest.approx([1.0, 0.0], abs=1e-12)


def test_outcome_probabilities_dimension_check():
    with pytest.raises(ValueError):
        outcome_probabilities(np.eye(4) / 4, MeasurementSetting.from_word("Z"))


def test_sample_counts_deterministic():
    rho = states.density(states.make_state("W3"))
    s = MeasurementSetting.from_word("ZZZ")
    a = sample_counts(rho, s, 5000, seed=9)
    b = sample_counts(rho, s, 5000, seed=9)
    assert np.array_equal(a.counts, b.counts)
    assert a.counts.sum() == 5000
    c = sample_counts(rho, s, 5000, seed=10)
    assert not np.array_equal(a.counts, c.counts)


def test_simulate_counts_per_setting_seeds():
    rho = states.density(states.make_state("W3"))
    settings = [MeasurementSetting.from_word("ZZZ"), MeasurementSetting.from_word("ZZZ")]
    tables = measure.simulate_counts(rho, settings, 2000, seed=4)
    # same setting, different derived seed: the draws differ
    assert not np.array_equal(tables[0].counts, tables[1].counts)
    again = measure.simulate_counts(rho, settings, 2000, seed=4)
    assert np.array_equal(tables[0].counts, again[0].counts)


def test_count_table_validation():
    s = MeasurementSetting.from_word("Z")
    with pytest.raises(ValueError):
        CountTable(setting=s, counts=np.array([3, 2, 1]), shots=6)
    with pytest.raises(ValueError):
        CountTable(setting=s, counts=np.array([3, 2]), shots=6)
    with pytest.raises(ValueError):
        CountTable(setting=s, counts=np.array([-1, 7]), shots=6)


def test_outcome_string():
    s = MeasurementSetting.from_word("ZZ")
    t = CountTable(setting=s, counts=np.array([1, 0, 0, 0]), shots=1)
    assert [t.outcome_string(i) for i in range(4)] == ["++", "+-", "-+", "--"]


# --- estimation ------------------------------------------------------------

def test_estimate_expectations_exact_limit():
    rho = states.density(states.make_state("C4"))
    ops = [parse_operator(t, 4) for t in ("Z1Z2", "Z3Z4", "ZZZZ")]
    tables = simulate_counts(rho, [MeasurementSetting.from_word("ZZZZ")], 200_000, seed=0)
    records = estimate_expectations(tables, ops)
    for rec, op in zip(records, ops):
        exact = evaluate(op.expr(), rho)
        assert abs(rec.value - exact) < 5 * max(rec.sigma, 1e-4)
        assert rec.product is op


def test_estimate_sigma_is_binomial():
    rho = states.density(states.make_state("W3"))
    tables = simulate_counts(rho, [MeasurementSetting.from_word("ZZZ")], 10_000, seed=1)
    (rec,) = estimate_expectations(tables, [parse_operator("Z1", 3)])
    assert rec.sigma == pytest.approx(math.sqrt((1 - rec.value**2) / 10_000), abs=1e-15)


def test_estimate_requires_covering_table():
    rho = states.density(states.make_state("W3"))
    tables = simulate_counts(rho, [MeasurementSetting.from_word("ZZZ")], 100, seed=0)
    with pytest.raises(ValueError):
        estimate_expectations(tables, [parse_operator("X1", 3)])


def test_combine_reproduces_expression_value():
    rho = states.density(states.make_state("D4"))
    w = load_paper_witness("D4", 1)
    words = [t for t in w.expr.terms if set(t) != {"I"}]
    # exact records: zero sigma, value = true expectation
    records = [
        ExpectationRecord(
            operator=ObservableExpr(4, {word: 1.0}),
            value=evaluate(ObservableExpr(4, {word: 1.0}), rho),
            sigma=0.0,
        )
        for word in words
    ]
    value, sigma = combine(records, w.expr)
    assert value == pytest.approx(evaluate(w.expr, rho), abs=1e-12)
    assert sigma == 0.0


def test_combine_error_propagation_in_quadrature():
    expr = ObservableExpr(2, {"ZI": 2.0, "IZ": -1.0})
    records = [
        ExpectationRecord(ObservableExpr(2, {"ZI": 1.0}), 0.5, 0.1),
        ExpectationRecord(ObservableExpr(2, {"IZ": 1.0}), 0.25, 0.2),
    ]
    value, sigma = combine(records, expr)
    assert value == pytest.approx(2 * 0.5 - 0.25)
    assert sigma == pytest.approx(math.hypot(2 * 0.1, 1 * 0.2))


def test_combine_missing_and_duplicate_records():
    expr = ObservableExpr(2, {"ZZ": 1.0})
    rec = ExpectationRecord(ObservableExpr(2, {"ZZ": 1.0}), 0.9, 0.01)
    with pytest.raises(ValueError):
        combine([], expr)
    with pytest.raises(ValueError):
        combine([rec, rec], expr)


# --- fidelity plans ---------------------------------------------------------

@pytest.mark.parametrize("state,n_settings", [("W3", 5), ("W4", 7), ("D4", 9), ("C4", 9)])
def test_fidelity_plan_setting_counts(state, n_settings):
    plan = fidelity_settings(state)
    assert len(plan.settings) == n_settings


def test_fidelity_plan_reconstructs_projector():
    for state in ("W3", "D4"):
        plan = fidelity_settings(state)
        psi = states.make_state(state)
        proj = np.outer(psi, psi.conj())
        assert np.max(np.abs(plan.reconstruction.matrix() - proj)) < 1e-10


def test_fidelity_plan_unknown_state():
    with pytest.raises(ValueError):
        fidelity_settings("GHZ3")


def test_combine_plan_on_simulated_counts():
    plan = fidelity_settings("C4")
    rho = states.white_noise(states.density(states.make_state("C4")), 0.2)
    tables = simulate_counts(rho, plan.settings, 50_000, seed=5)
    ops = [parse_operator(text, plan.n) for _, text in plan.record_combo]
    records = estimate_expectations(tables, ops)
    value, sigma = combine_plan(records, plan)
    assert abs(value - (0.8 + 0.2 / 16)) < 5 * sigma
    assert 0 < sigma < 0.01


def test_combine_plan_exact_stabilizer_state_has_zero_error():
    # every C4 stabilizer outcome is deterministic on the exact state
    plan = fidelity_settings("C4")
    rho = states.density(states.make_state("C4"))
    tables = simulate_counts(rho, plan.settings, 1000, seed=0)
    ops = [parse_operator(text, plan.n) for _, text in plan.record_combo]
    value, sigma = combine_plan(estimate_expectations(tables, ops), plan)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert sigma == 0.0


def test_combine_plan_needs_exactly_one_match():
    plan = fidelity_settings("W3")
    with pytest.raises(ValueError):
        combine_plan([], plan)


# --- file round-trips --------------------------------------------------------

def test_expectation_csv_roundtrip(tmp_path):
    # include a composite text with a comma to exercise the quoting
    texts = ["Z1Z2", "[(Z+X)/r2]_1,3", "[(Z-Y)/r2]x3", "XXX"]
    ops = [parse_operator(t, 3) for t in texts]
    records = [
        ExpectationRecord(op.expr(), value=0.1 * k - 0.05, sigma=0.01 * k, product=op)
        for k, op in enumerate(ops)
    ]
    path = tmp_path / "exp.csv"
    write_expectation_csv(path, records)
    back = read_expectation_csv(path, 3)
    assert len(back) == len(records)
    for orig, re_read in zip(records, back):
        assert re_read.product.text == orig.product.text
        assert re_read.value == orig.value  # repr round-trips floats exactly
        assert re_read.sigma == orig.sigma
        assert re_read.operator.isclose(orig.operator)


def test_write_expectation_csv_requires_product(tmp_path):
    rec = ExpectationRecord(ObservableExpr(2, {"ZZ": 1.0}), 0.5, 0.1)
    with pytest.raises(ValueError):
        write_expectation_csv(tmp_path / "x.csv", [rec])


def test_read_expectation_csv_header_check(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("op,val,err\nZ1,0.5,0.1\n")
    with pytest.raises(ValueError):
        read_expectation_csv(path, 3)


def test_expectation_record_sigma_validation():
    with pytest.raises(ValueError):
        ExpectationRecord(ObservableExpr(1, {"Z": 1.0}), 0.5, -0.1)


def test_count_files_roundtrip(tmp_path):
    rho = states.density(states.make_state("W3"))
    settings = [MeasurementSetting.from_word(w) for w in ("ZZZ", "XXX")]
    tables = simulate_counts(rho, settings, 3000, seed=12)
    manifest = write_count_files(tmp_path, tables, seed=12)
    assert manifest["seed"] == 12
    assert len(manifest["settings"]) == 2
    assert (tmp_path / "manifest.json").exists()
    for entry, table in zip(manifest["settings"], tables):
        back = read_count_file(tmp_path / entry["file"], table.setting)
        assert np.array_equal(back.counts, table.counts)
        assert entry["label"] == table.setting.label()
        assert entry["shots"] == 3000


def test_read_count_file_rejects_bad_outcomes(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("outcome,count\n+*,3\n")
    with pytest.raises(ValueError):
        read_count_file(path, MeasurementSetting.from_word("ZZ"))
