"""Local measurement settings, counting simulation, and table ingestion.

A product observable is measured one qubit at a time along a Bloch axis; a
*setting* fixes one axis per qubit (or leaves the qubit unmeasured). Counts
are multinomial over the 2^n outcome strings, expectations are signed count
sums, and witnesses/fidelities are linear combinations of such records with
errors combined in quadrature across settings.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from . import pauli
from .witness import ObservableExpr

SQRT2 = math.sqrt(2.0)

PAULI_AXES = {
    "X": (1.0, 0.0, 0.0),
    "Y": (0.0, 1.0, 0.0),
    "Z": (0.0, 0.0, 1.0),
}

_PAULI_VECTOR = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _axis_matrix(axis) -> np.ndarray:
    ax, ay, az = axis
    return ax * _PAULI_VECTOR["X"] + ay * _PAULI_VECTOR["Y"] + az * _PAULI_VECTOR["Z"]


@dataclass(frozen=True)
class MeasurementSetting:
    """One Bloch axis per qubit; None marks a qubit that is not measured."""

    n: int
    axes: tuple

    def __post_init__(self):
        if len(self.axes) != self.n:
            raise ValueError("one axis entry per qubit required")
        for i, axis in enumerate(self.axes):
            if axis is None:
                continue
            if abs(math.sqrt(sum(a * a for a in axis)) - 1.0) > 1e-10:
                raise ValueError(f"axis for qubit {i + 1} is not unit length")

    @classmethod
    def from_word(cls, word: str) -> "MeasurementSetting":
        pauli.check_word(word)
        return cls(len(word), tuple(None if c == "I" else PAULI_AXES[c] for c in word))

    def covers(self, op: "ProductOp") -> bool:
        """True when every measured factor of op matches this setting's axis."""
        if op.n != self.n:
            return False
        for mine, theirs in zip(self.axes, op.axes):
            if theirs is None:
                continue
            if mine is None or any(abs(a - b) > 1e-10 for a, b in zip(mine, theirs)):
                return False
        return True

    def label(self) -> str:
        parts = []
        for axis in self.axes:
            if axis is None:
                parts.append("I")
                continue
            for letter, vec in PAULI_AXES.items():
                if all(abs(a - b) <= 1e-10 for a, b in zip(axis, vec)):
                    parts.append(letter)
                    break
            else:
                parts.append("(" + ",".join(f"{a:.3f}" for a in axis) + ")")
        return "".join(parts)


@dataclass(frozen=True)
class ProductOp:
    """Tensor product of per-qubit ±1 observables (axis per qubit, None = I)."""

    n: int
    axes: tuple
    text: str

    def expr(self) -> ObservableExpr:
        """Pauli expansion: each axis factor becomes ax*X + ay*Y + az*Z."""
        expansions = [("", 1.0)]
        for axis in self.axes:
            if axis is None:
                expansions = [(w + "I", c) for w, c in expansions]
                continue
            step = []
            for letter, component in zip("XYZ", axis):
                if abs(component) > 1e-14:
                    step.extend((w + letter, c * component) for w, c in expansions)
            expansions = step
        terms: dict[str, float] = {}
        for word, coeff in expansions:
            terms[word] = terms.get(word, 0.0) + coeff
        return ObservableExpr(self.n, terms)

    def outcome_sign(self, outcome_index: int) -> int:
        """Product of this operator's measured-qubit signs in one outcome."""
        sign = 1
        for q, axis in enumerate(self.axes):
            if axis is not None and (outcome_index >> (self.n - 1 - q)) & 1:
                sign = -sign
        return sign


@dataclass(frozen=True)
class CountTable:
    """Multinomial counts over the 2^n ±1 outcome strings of one setting."""

    setting: MeasurementSetting
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (2**self.setting.n,):
            raise ValueError("counts must have one entry per outcome string")
        if (counts < 0).any() or counts.sum() != self.shots:
            raise ValueError("counts must be nonnegative and sum to shots")
        object.__setattr__(self, "counts", counts)

    def outcome_string(self, index: int) -> str:
        n = self.setting.n
        return "".join("-" if (index >> (n - 1 - q)) & 1 else "+" for q in range(n))


@dataclass(frozen=True)
class ExpectationRecord:
    """Measured expectation of one product operator with its standard error."""

    operator: ObservableExpr
    value: float
    sigma: float
    product: ProductOp | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


# --- operator grammar ---------------------------------------------------

_COMPOSITE = re.compile(r"^\[\(([XYZ])([+-])([XYZ])\)/r2\](x(\d+)|_([\d,]+))$")
_INDEXED = re.compile(r"([XYZ])(\d+)")


def parse_operator(text: str, n: int) -> ProductOp:
    """Product operator from table text.

    Accepted forms: an n-letter word over {I,X,Y,Z}; concatenated indexed
    factors like ``X1X2`` or ``Z1Y3Y4`` (unlisted qubits are identity);
    ``[(A+B)/r2]x<n>`` for a uniform tilted product; ``[(A+B)/r2]_<i,j>``
    for tilted factors on the listed qubits. Whitespace is ignored.
    """
    compact = "".join(text.split())
    if not compact:
        raise ValueError("empty operator text")

    m = _COMPOSITE.match(compact)
    if m:
        a, sign, b, _, uniform, listed = m.groups()
        if a == b:
            raise ValueError(f"{text!r}: composite axis ({a}{sign}{b})/r2 is not unit length")
        va, vb = PAULI_AXES[a], PAULI_AXES[b]
        factor = tuple(
            (x + (y if sign == "+" else -y)) / SQRT2 for x, y in zip(va, vb)
        )
        if uniform is not None:
            if int(uniform) != n:
                raise ValueError(f"{text!r}: uniform product is over {uniform} qubits, expected {n}")
            axes = tuple(factor for _ in range(n))
        else:
            qubits = sorted({int(q) for q in listed.split(",") if q})
            if not qubits or qubits[0] < 1 or qubits[-1] > n:
                raise ValueError(f"{text!r}: qubit list out of range 1..{n}")
            axes = tuple(factor if q + 1 in set(qubits) else None for q in range(n))
        return ProductOp(n=n, axes=axes, text=compact)

    if re.fullmatch(r"[IXYZ]+", compact) and len(compact) == n and not compact[1:2].isdigit():
        return ProductOp(
            n=n,
            axes=tuple(None if c == "I" else PAULI_AXES[c] for c in compact),
            text=compact,
        )

    pos = 0
    seen: dict[int, str] = {}
    for m in _INDEXED.finditer(compact):
        if m.start() != pos:
            raise ValueError(f"{text!r}: syntax error at position {pos}")
        letter, qubit = m.group(1), int(m.group(2))
        if not 1 <= qubit <= n:
            raise ValueError(f"{text!r}: qubit {qubit} out of range 1..{n}")
        if qubit in seen:
            raise ValueError(f"{text!r}: qubit {qubit} listed twice")
        seen[qubit] = letter
        pos = m.end()
    if pos != len(compact) or not seen:
        raise ValueError(f"{text!r}: syntax error at position {pos}")
    axes = tuple(PAULI_AXES[seen[q + 1]] if q + 1 in seen else None for q in range(n))
    return ProductOp(n=n, axes=axes, text=compact)


# --- planning -----------------------------------------------------------


def plan_settings(expr: ObservableExpr) -> list[tuple[MeasurementSetting, list[str]]]:
    """Greedy first-fit grouping of Pauli terms into joint settings.

    Two words share a setting iff on every qubit their letters agree or at
    least one is identity. Deterministic: words are visited in lexicographic
    order and fall into the first open setting that fits.
    """
    n = expr.n
    words = sorted(w for w in expr.terms if set(w) != {"I"})
    groups: list[tuple[list[str], list[str]]] = []  # (per-qubit letters, covered words)
    for word in words:
        for letters, covered in groups:
            if all(a == b or "I" in (a, b) for a, b in zip(letters, word)):
                for q, letter in enumerate(word):
                    if letter != "I":
                        letters[q] = letter
                covered.append(word)
                break
        else:
            groups.append(([c for c in word], [word]))
    return [
        (MeasurementSetting.from_word("".join(letters)), covered)
        for letters, covered in groups
    ]


# --- simulation ---------------------------------------------------------


def outcome_probabilities(rho: np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    """Born probabilities of the 2^n ±1 outcome strings under the setting.

    Unmeasured qubits report '+' deterministically (their projector is the
    identity for '+' and zero for '-').
    """
    rho = np.asarray(rho, dtype=complex)
    n = setting.n
    if rho.shape != (2**n, 2**n):
        raise ValueError("state dimension does not match the setting")
    eye = np.eye(2, dtype=complex)
    zero = np.zeros((2, 2), dtype=complex)
    projectors = []
    for axis in setting.axes:
        if axis is None:
            projectors.append((eye, zero))
        else:
            obs = _axis_matrix(axis)
            projectors.append(((eye + obs) / 2, (eye - obs) / 2))
    probs = np.empty(2**n)
    for idx in range(2**n):
        factors = [
            projectors[q][(idx >> (n - 1 - q)) & 1] for q in range(n)
        ]
        probs[idx] = np.trace(rho @ pauli.kron_all(factors)).real
    if (probs < -1e-12).any():
        raise ValueError("negative outcome probability beyond tolerance")
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {total}, not 1")
    return probs / total


def sample_counts(rho: np.ndarray, setting: MeasurementSetting, shots: int, seed) -> CountTable:
    """One multinomial draw of counting statistics; deterministic given seed."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    probs = outcome_probabilities(rho, setting)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return CountTable(setting=setting, counts=counts, shots=shots)


def simulate_counts(
    rho: np.ndarray, settings, shots: int, seed: int
) -> list[CountTable]:
    """Independent count tables, one per setting, with derived seeds (seed, k)."""
    return [
        sample_counts(rho, setting, shots, (seed, k))
        for k, setting in enumerate(settings)
    ]


# --- estimation ---------------------------------------------------------


def estimate_expectations(tables, operators) -> list[ExpectationRecord]:
    """Signed-count estimates of product operators from covering tables.

    Marginal operators (e.g. a pair inside a full product setting) reuse the
    same counts by summing over the unmeasured qubits' outcomes. sigma is the
    binomial standard error sqrt((1 - value^2)/shots).
    """
    records = []
    for op in operators:
        table = next((t for t in tables if t.setting.covers(op)), None)
        if table is None:
            raise ValueError(f"no table's setting covers operator {op.text!r}")
        signs = np.array([op.outcome_sign(i) for i in range(len(table.counts))])
        value = float(signs @ table.counts) / table.shots
        variance = max(0.0, (1.0 - value * value) / table.shots)
        records.append(
            ExpectationRecord(
                operator=op.expr(), value=value, sigma=math.sqrt(variance), product=op
            )
        )
    return records


def combine(records, expr: ObservableExpr) -> tuple[float, float]:
    """Expression value from per-term records, errors in quadrature.

    Every non-identity term of expr must match exactly one record holding
    that single Pauli word with unit coefficient.
    """
    by_word: dict[str, ExpectationRecord] = {}
    for rec in records:
        terms = rec.operator.terms
        if len(terms) == 1:
            (word, coeff), = terms.items()
            if abs(coeff - 1.0) <= 1e-12 and set(word) != {"I"}:
                if word in by_word:
                    raise ValueError(f"operator {word} matched by more than one record")
                by_word[word] = rec
    value = expr.identity_coeff
    variance = 0.0
    for word, coeff in expr.terms.items():
        if set(word) == {"I"}:
            continue
        rec = by_word.get(word)
        if rec is None:
            raise ValueError(f"no record for operator {word}")
        value += coeff * rec.value
        variance += (coeff * rec.sigma) ** 2
    return value, math.sqrt(variance)


def combine_plan(records, plan: "FidelityPlan") -> tuple[float, float]:
    """Fidelity estimate from a plan's record-basis combination."""
    value = plan.constant
    variance = 0.0
    for coeff, text in plan.record_combo:
        op = parse_operator(text, plan.n)
        target = op.expr()
        matches = [r for r in records if r.operator.isclose(target, tol=1e-10)]
        if len(matches) != 1:
            raise ValueError(
                f"operator {text!r} matched {len(matches)} records, expected exactly 1"
            )
        value += coeff * matches[0].value
        variance += (coeff * matches[0].sigma) ** 2
    return value, math.sqrt(variance)


# --- fidelity measurement plans ------------------------------------------


@dataclass(frozen=True)
class FidelityPlan:
    """Settings plus the record combination reconstructing |psi><psi|."""

    state: str
    n: int
    settings: tuple
    reconstruction: ObservableExpr
    record_combo: tuple
    constant: float


def _subset_texts(pair: str, sign: str, n: int):
    """Marginal composite texts [(A±B)/r2]_S for every nonempty qubit subset."""
    out = []
    for mask in range(1, 2**n):
        qubits = [q + 1 for q in range(n) if (mask >> q) & 1]
        size = len(qubits)
        if size == n:
            text = f"[({pair[0]}{sign}{pair[1]})/r2]x{n}"
        else:
            text = f"[({pair[0]}{sign}{pair[1]})/r2]_{','.join(map(str, qubits))}"
        out.append((text, size))
    return out


def _even_subset_words(letter: str, n: int):
    """Pauli words with the letter on an even-size (nonempty) subset."""
    out = []
    for mask in range(1, 2**n):
        qubits = [q for q in range(n) if (mask >> q) & 1]
        if len(qubits) % 2 == 0:
            out.append("".join(letter if q in set(qubits) else "I" for q in range(n)))
    return out


def fidelity_settings(state: str) -> FidelityPlan:
    """Measurement plan whose record combination equals the state projector.

    The reconstruction (a Pauli expression) equals |psi><psi| exactly; the
    record combination expresses the same operator over the plan's settings'
    directly-measurable products, which is what table ingestion consumes.
    """
    from . import states  # local import: states never imports measure

    if state not in states.STATE_NAMES:
        raise ValueError(f"unknown state {state!r}; expected one of {states.STATE_NAMES}")
    n = 3 if state == "W3" else 4
    combo: list[tuple[float, str]] = []

    if state in ("W3", "W4"):
        # 1/24 (n=3) or 1/64 (n=4) of [ c0*I + sum ck Z_subsets
        #   + (I+Z+X)^xn + (I+Z-X)^xn + (I+Z+Y)^xn + (I+Z-Y)^xn
        #   - 2 X^xn - 2 Y^xn (n=4 only) ]
        denom = 24.0 if n == 3 else 64.0
        settings = ["Z" * n]
        constant = (4.0 - 1.0) / denom if n == 3 else 4.0 / denom
        z_coeffs = {1: -3.0, 2: -5.0, 3: -7.0} if n == 3 else {1: -2.0, 2: -4.0, 3: -6.0, 4: -8.0}
        for mask in range(1, 2**n):
            qubits = [q for q in range(n) if (mask >> q) & 1]
            word = "".join("Z" if q in set(qubits) else "I" for q in range(n))
            combo.append((z_coeffs[len(qubits)] / denom, word))
        if n == 4:
            settings += ["X" * n, "Y" * n]
            combo.append((-2.0 / denom, "X" * n))
            combo.append((-2.0 / denom, "Y" * n))
        for pair in ("ZX", "ZY"):
            for sign in "+-":
                settings.append(f"[({pair[0]}{sign}{pair[1]})/r2]x{n}")
                for text, size in _subset_texts(pair, sign, n):
                    combo.append((SQRT2**size / denom, text))
    elif state == "D4":
        # 1/96 of [ 4X4 + 2(X+I)^x4 + 2(X-I)^x4 + (same for Y) + 16Z4
        #           - (Z+I)^x4 - (Z-I)^x4 - 2(X±Z)^x4 - 2(Y±Z)^x4 + (X±Y)^x4 ]
        settings = ["XXXX", "YYYY", "ZZZZ"]
        constant = 6.0 / 96.0
        for letter, base, wfull in (("X", 4.0, 8.0), ("Y", 4.0, 8.0), ("Z", -2.0, 14.0)):
            for word in _even_subset_words(letter, 4):
                combo.append(((wfull if set(word) == {letter} else base) / 96.0, word))
        for pair, weight in (("XZ", -8.0), ("YZ", -8.0), ("XY", 4.0)):
            for sign in "+-":
                settings.append(f"[({pair[0]}{sign}{pair[1]})/r2]x4")
                combo.append((weight / 96.0, f"[({pair[0]}{sign}{pair[1]})/r2]x4"))
    else:  # C4: all stabilizer products are plain Pauli settings
        signed_words = [
            (1, "ZZII"), (1, "XXZI"), (1, "IZXX"), (1, "IIZZ"), (-1, "YYZI"),
            (1, "ZIXX"), (1, "ZZZZ"), (1, "XYYX"), (1, "XXIZ"), (-1, "IZYY"),
            (1, "YXYX"), (-1, "YYIZ"), (-1, "ZIYY"), (1, "XYXY"), (1, "YXXY"),
        ]
        constant = 1.0 / 16.0
        combo = [(s / 16.0, w) for s, w in signed_words]
        stab_expr = ObservableExpr(4, {w: 1.0 for _, w in signed_words})
        settings = [s.label() for s, _ in plan_settings(stab_expr)]

    reconstruction_terms: dict[str, float] = {"I" * n: constant}
    for coeff, text in combo:
        for word, c in parse_operator(text, n).expr().terms.items():
            reconstruction_terms[word] = reconstruction_terms.get(word, 0.0) + coeff * c
    setting_objs = tuple(
        MeasurementSetting(n, parse_operator(s, n).axes) for s in settings
    )
    return FidelityPlan(
        state=state,
        n=n,
        settings=setting_objs,
        reconstruction=ObservableExpr(n, reconstruction_terms),
        record_combo=tuple(combo),
        constant=constant,
    )


# --- file formats --------------------------------------------------------


def read_expectation_csv(path, n: int) -> list[ExpectationRecord]:
    """Records from CSV with header operator,value,sigma."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["operator", "value", "sigma"]:
            raise ValueError(f"{path}: expected header operator,value,sigma")
        for row in reader:
            op = parse_operator(row["operator"], n)
            records.append(
                ExpectationRecord(
                    operator=op.expr(),
                    value=float(row["value"]),
                    sigma=float(row["sigma"]),
                    product=op,
                )
            )
    return records


def write_expectation_csv(path, records) -> None:
    ctx = (
        contextlib.nullcontext(path)
        if hasattr(path, "write")
        else open(path, "w", newline="")
    )
    with ctx as fh:
        writer = csv.writer(fh)
        writer.writerow(["operator", "value", "sigma"])
        for rec in records:
            if rec.product is None:
                raise ValueError("record has no product text to serialize")
            writer.writerow([rec.product.text, repr(rec.value), repr(rec.sigma)])


def write_count_files(directory, tables, seed: int, prefix: str = "setting") -> dict:
    """One outcome,count CSV per table plus a manifest; returns the manifest."""
    import os

    manifest = {"seed": seed, "settings": []}
    for k, table in enumerate(tables):
        name = f"{prefix}-{k}.csv"
        with open(os.path.join(directory, name), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["outcome", "count"])
            for idx, count in enumerate(table.counts):
                writer.writerow([table.outcome_string(idx), int(count)])
        manifest["settings"].append(
            {
                "index": k,
                "label": table.setting.label(),
                "axes": [list(a) if a is not None else None for a in table.setting.axes],
                "shots": int(table.shots),
                "file": name,
            }
        )
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def read_count_file(path, setting: MeasurementSetting) -> CountTable:
    """Counts back from an outcome,count CSV written by write_count_files."""
    n = setting.n
    counts = np.zeros(2**n, dtype=np.int64)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["outcome", "count"]:
            raise ValueError(f"{path}: expected header outcome,count")
        for row in reader:
            outcome = row["outcome"]
            if len(outcome) != n or any(c not in "+-" for c in outcome):
                raise ValueError(f"{path}: bad outcome string {outcome!r}")
            idx = 0
            for c in outcome:
                idx = (idx << 1) | (c == "-")
            counts[idx] += int(row["count"])
    return CountTable(setting=setting, counts=counts, shots=int(counts.sum()))
