"""Dense Pauli-string operator algebra for small qubit registers.

Conventions used throughout the package:

* Qubit 1 is the leftmost letter of a Pauli word and the most significant
  tensor factor, so basis index ``b`` of a ``2**n`` vector reads as the bit
  string ``q1 q2 ... qn``.
* Pauli words are plain strings over the alphabet ``IXYZ`` (e.g. ``"XXII"``).
* Qubit subsets are collections of 1-based indices.

Everything here is a pure function over immutable inputs; results may be
cached module-level but are never mutated.
"""

from __future__ import annotations

import functools
import itertools
import re
from collections.abc import Iterable

import numpy as np

LETTERS = "IXYZ"

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def check_word(word: str) -> str:
    """Validate a Pauli word; returns it unchanged."""
    if not word or any(c not in LETTERS for c in word):
        raise ValueError(f"not a Pauli word over IXYZ: {word!r}")
    return word


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, first factor most significant."""
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(word: str) -> np.ndarray:
    """Dense 2^n x 2^n matrix of an n-letter Pauli word such as ``"XZI"``."""
    check_word(word)
    return kron_all(PAULI_1Q[c] for c in word)


@functools.lru_cache(maxsize=8)
def all_words(n: int) -> tuple[str, ...]:
    """All 4^n Pauli words of length n in lexicographic (I<X<Y<Z) index order."""
    return tuple("".join(p) for p in itertools.product(LETTERS, repeat=n))


def word_index(word: str) -> int:
    """Position of ``word`` in the ``all_words`` enumeration (base-4, I,X,Y,Z = 0..3)."""
    idx = 0
    for c in check_word(word):
        idx = 4 * idx + LETTERS.index(c)
    return idx


@functools.lru_cache(maxsize=8)
def _letter_digits(n: int) -> np.ndarray:
    """(4^n, n) array of base-4 letter codes per word, qubit 1 in column 0."""
    idx = np.arange(4**n)
    cols = [(idx >> (2 * (n - 1 - q))) & 3 for q in range(n)]
    return np.stack(cols, axis=1).astype(np.uint8)


@functools.lru_cache(maxsize=6)
def pauli_basis(n: int) -> np.ndarray:
    """Stack of all 4^n Pauli matrices, shape (4^n, 2^n, 2^n). Read-only."""
    mats_1q = np.stack([PAULI_1Q[c] for c in LETTERS])
    stack = np.eye(1, dtype=complex)[None]
    for _ in range(n):
        stack = np.einsum("pab,lcd->placbd", stack, mats_1q).reshape(
            stack.shape[0] * 4, stack.shape[1] * 2, stack.shape[2] * 2
        )
    stack.setflags(write=False)
    return stack


@functools.lru_cache(maxsize=6)
def _basis_flat(n: int) -> np.ndarray:
    """(4^n, 4^n) matrix whose row p is pauli_basis(n)[p] flattened row-major."""
    d = 2**n
    flat = pauli_basis(n).reshape(4**n, d * d).copy()
    flat.setflags(write=False)
    return flat


def to_pauli_coords(m: np.ndarray) -> np.ndarray:
    """Real Pauli coordinates x with m = sum_P x_P P, for Hermitian m."""
    d = m.shape[0]
    n = _infer_n(d)
    trs = _basis_flat(n) @ np.asarray(m, dtype=complex).T.reshape(-1)
    return np.real(trs) / d


def from_pauli_coords(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_pauli_coords`."""
    x = np.asarray(x, dtype=float)
    n = _infer_n_coords(x.size)
    d = 2**n
    return (x @ _basis_flat(n)).reshape(d, d)


def _infer_n(dim: int) -> int:
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def _infer_n_coords(size: int) -> int:
    n = (size.bit_length() - 1) // 2
    if 4**n != size:
        raise ValueError(f"coordinate vector length {size} is not a power of 4")
    return n


def word_from_factors(n: int, factors: str) -> str:
    """Indexed single-qubit factors to an n-letter word: "X1X2" -> "XXI" (n=3).

    Factors are letter+index tokens with 1-based indices; omitted qubits get I.
    """
    letters = ["I"] * n
    for m in re.finditer(r"([IXYZ])(\d+)|(.)", factors.replace(" ", "")):
        if m.group(3) is not None:
            raise ValueError(f"bad factor token near {m.group(3)!r} in {factors!r}")
        letter, idx = m.group(1), int(m.group(2))
        if not 1 <= idx <= n:
            raise ValueError(f"qubit index {idx} outside 1..{n}")
        if letters[idx - 1] != "I":
            raise ValueError(f"qubit {idx} assigned twice in {factors!r}")
        letters[idx - 1] = letter
    return "".join(letters)


def word_support(word: str) -> frozenset[int]:
    """1-based qubit positions carrying a non-identity letter."""
    return frozenset(i + 1 for i, c in enumerate(word) if c != "I")


def bipartitions(n: int) -> tuple[frozenset[int], ...]:
    """Canonical bipartition halves: all proper subsets containing qubit 1.

    Deduplicates A|A^c against A^c|A; there are 2^(n-1) - 1 entries.
    """
    if n < 2:
        raise ValueError("need at least 2 qubits for a bipartition")
    rest = range(2, n + 1)
    out = []
    for r in range(n - 1):
        for extra in itertools.combinations(rest, r):
            out.append(frozenset((1,) + extra))
    return tuple(out)


def partial_transpose(m: np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """Transpose the tensor indices of the qubits in ``subset`` (1-based)."""
    m = np.asarray(m, dtype=complex)
    n = _infer_n(m.shape[0])
    subset = set(subset)
    if not subset <= set(range(1, n + 1)):
        raise ValueError(f"subset {sorted(subset)} out of range for n={n}")
    t = m.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in subset:
        axes[q - 1], axes[n + q - 1] = axes[n + q - 1], axes[q - 1]
    return t.transpose(axes).reshape(m.shape)


@functools.lru_cache(maxsize=64)
def pt_signs(n: int, subset: frozenset[int]) -> np.ndarray:
    """Per-word signs of the partial transpose in Pauli coordinates.

    T_A maps a Pauli word to itself times (-1)^(number of Y letters inside A);
    the returned vector holds that sign for every word index.
    """
    digits = _letter_digits(n)
    ys = np.zeros(4**n, dtype=np.int64)
    for q in subset:
        ys += digits[:, q - 1] == 2
    signs = np.where(ys % 2 == 1, -1.0, 1.0)
    signs.setflags(write=False)
    return signs


def partial_trace(m: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not in ``keep``; result dimension 2^len(keep)."""
    m = np.asarray(m, dtype=complex)
    n = _infer_n(m.shape[0])
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[-1] > n or keep[0] < 1:
        raise ValueError(f"keep set {keep} out of range for n={n}")
    t = m.reshape((2,) * (2 * n))
    remaining = list(range(1, n + 1))
    for q in reversed([q for q in remaining if q not in keep]):
        i = remaining.index(q)
        t = np.trace(t, axis1=i, axis2=i + len(remaining))
        remaining.pop(i)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def hermitian_eigen(m: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects inputs whose anti-Hermitian part exceeds ``tol`` instead of
    silently symmetrizing them.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(np.asarray(m, dtype=complex))[0])
