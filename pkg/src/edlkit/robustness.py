"""Noise-tolerance behavior under measurement-axis misalignment.

Misalignment replaces each non-identity Pauli letter by a tilted axis —
all_axes: X -> cos(t)X + sin(t)Y, Y -> cos(t)Y + sin(t)Z, Z -> cos(t)Z + sin(t)X;
y_only applies just the Y rule. The substitution is applied termwise and
recollected, which is its unique linear extension to arbitrary expressions.
"""

from __future__ import annotations

import contextlib
import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .witness import ObservableExpr, Witness, p_noise

MODES = ("all_axes", "y_only")


@dataclass(frozen=True)
class MisalignmentSpec:
    """Tilt angle in radians plus which axes tilt."""

    theta: float
    mode: str = "all_axes"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if not 0.0 <= self.theta <= math.pi / 2:
            warnings.warn(
                f"theta={self.theta:.4g} is outside [0, pi/2]; the substitution "
                "is still applied but sweeps normally stay inside that range",
                stacklevel=2,
            )


def _letter_rules(spec: MisalignmentSpec) -> dict[str, tuple[tuple[str, float], ...]]:
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    if spec.mode == "all_axes":
        rules = {"X": (("X", c), ("Y", s)), "Y": (("Y", c), ("Z", s)), "Z": (("Z", c), ("X", s))}
    else:
        rules = {"X": (("X", 1.0),), "Y": (("Y", c), ("Z", s)), "Z": (("Z", 1.0),)}
    rules["I"] = (("I", 1.0),)
    return rules


def misalign_expr(expr: ObservableExpr, spec: MisalignmentSpec) -> ObservableExpr:
    """Expression with every letter of every term replaced by its tilted axis.

    Identity letters are untouched, so the trace is preserved exactly; each
    tilted letter keeps unit Bloch norm, so it still squares to the identity.
    """
    rules = _letter_rules(spec)
    out: dict[str, float] = {}
    for word, coeff in expr.terms.items():
        expansions = [("", coeff)]
        for letter in word:
            expansions = [
                (prefix + sub, c * weight)
                for prefix, c in expansions
                for sub, weight in rules[letter]
            ]
        for new_word, c in expansions:
            out[new_word] = out.get(new_word, 0.0) + c
    return ObservableExpr(expr.n, out)


@dataclass(frozen=True)
class ToleranceCurve:
    """White-noise tolerance of one witness across a misalignment grid.

    tolerances[i] is None where the misaligned expectation is nonnegative
    (the witness no longer detects the state there).
    """

    thetas: tuple[float, ...]
    tolerances: tuple[float | None, ...]
    witness_label: str

    def __post_init__(self):
        if len(self.thetas) != len(self.tolerances):
            raise ValueError("thetas and tolerances must have the same length")


def default_grid(stop: float = 0.6, step: float = 0.005) -> tuple[float, ...]:
    """Sweep grid 0..stop inclusive; the default covers both published figures."""
    count = int(round(stop / step))
    return tuple(i * step for i in range(count + 1))


def tolerance_curve(
    w: Witness, rho: np.ndarray, grid, mode: str = "all_axes"
) -> ToleranceCurve:
    """Per-angle white-noise tolerance of the misaligned witness on rho."""
    thetas = tuple(float(t) for t in grid)
    if not thetas:
        raise ValueError("grid must be nonempty")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("grid must be strictly ascending")
    tolerances = tuple(
        p_noise(misalign_expr(w.expr, MisalignmentSpec(t, mode)), rho) for t in thetas
    )
    return ToleranceCurve(thetas=thetas, tolerances=tolerances, witness_label=w.label)


def crossover(
    w_a: Witness,
    w_b: Witness,
    rho: np.ndarray,
    mode: str = "all_axes",
    hi: float = math.pi / 4,
    tol: float = 1e-4,
) -> float:
    """Angle where the two witnesses' tolerance curves cross, by bisection.

    Raises ValueError when the difference has no sign change (or more than
    one) on the part of (0, hi) where both witnesses still detect rho.
    """

    def try_diff(theta: float) -> float | None:
        spec = MisalignmentSpec(theta, mode)
        pa = p_noise(misalign_expr(w_a.expr, spec), rho)
        pb = p_noise(misalign_expr(w_b.expr, spec), rho)
        if pa is None or pb is None:
            return None
        return pa - pb

    def diff(theta: float) -> float:
        value = try_diff(theta)
        if value is None:
            raise ValueError(f"tolerance absent at theta={theta:.6f}; curves do not cross cleanly")
        return value

    scan = [hi * k / 32 for k in range(33)]
    values = []
    for t in scan:  # stop where either witness goes blind; the bracket ends there
        value = try_diff(t)
        if value is None:
            break
        values.append(value)
    if all(v == 0 for v in values):
        raise ValueError("no sign change: tolerance curves coincide on the bracket")
    flips = [
        (scan[i], scan[i + 1])
        for i in range(len(values) - 1)
        if values[i] == 0 or (values[i] < 0) != (values[i + 1] < 0)
    ]
    if not flips:
        raise ValueError("no sign change: tolerance curves do not cross on the bracket")
    if len(flips) > 1:
        raise ValueError("tolerance curves cross more than once on the bracket")
    lo, up = flips[0]
    while up - lo > tol:
        mid = 0.5 * (lo + up)
        if (diff(lo) < 0) != (diff(mid) < 0):
            up = mid
        else:
            lo = mid
    return 0.5 * (lo + up)


def write_curves_csv(path, curve_a: ToleranceCurve, curve_b: ToleranceCurve) -> None:
    """Two-curve sweep as CSV rows theta,tolerance_a,tolerance_b ('' = absent)."""
    if curve_a.thetas != curve_b.thetas:
        raise ValueError("curves must share one theta grid")
    ctx = (
        contextlib.nullcontext(path)
        if hasattr(path, "write")
        else open(path, "w", newline="")
    )
    with ctx as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "tolerance_a", "tolerance_b"])
        for theta, ta, tb in zip(curve_a.thetas, curve_a.tolerances, curve_b.tolerances):
            writer.writerow([
                f"{theta:.6g}",
                "" if ta is None else repr(ta),
                "" if tb is None else repr(tb),
            ])
