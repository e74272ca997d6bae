"""Reference states, the white-noise channel, fidelity, and Schmidt quantities.

Pure states are 1-D complex amplitude vectors of length 2^n and density
matrices are 2^n x 2^n complex Hermitian arrays; both follow the qubit
ordering convention of :mod:`edlkit.pauli`.
"""

from __future__ import annotations

import numpy as np

from . import pauli

STATE_NAMES = ("W3", "W4", "D4", "C4")


def make_state(name: str) -> np.ndarray:
    """One of the four reference states as an amplitude vector.

    W3  = (|001> + |010> + |100>)/sqrt(3)
    W4  = (|0001> + |0010> + |0100> + |1000>)/2
    D4  = uniform superposition of the six weight-2 four-qubit basis kets
    C4  = (|0000> + |0011> + |1100> - |1111>)/2
    """
    key = name.upper()
    if key == "W3":
        psi = np.zeros(8, dtype=complex)
        psi[[0b001, 0b010, 0b100]] = 1.0 / np.sqrt(3.0)
    elif key == "W4":
        psi = np.zeros(16, dtype=complex)
        psi[[0b0001, 0b0010, 0b0100, 0b1000]] = 0.5
    elif key == "D4":
        psi = np.zeros(16, dtype=complex)
        psi[[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]] = 1.0 / np.sqrt(6.0)
    elif key == "C4":
        psi = np.zeros(16, dtype=complex)
        psi[[0b0000, 0b0011, 0b1100]] = 0.5
        psi[0b1111] = -0.5
    else:
        raise ValueError(f"unknown state name: {name!r}")
    return psi


def num_qubits(state: np.ndarray) -> int:
    """Qubit count of an amplitude vector or density matrix."""
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def density(psi: np.ndarray) -> np.ndarray:
    """Outer product |psi><psi| of a normalized amplitude vector."""
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state vector not normalized: |psi| = {norm}")
    return np.outer(psi, psi.conj())


def assert_density(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate trace-1 Hermitian PSD-within-tolerance; returns rho."""
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("density matrix trace is not 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix has a significantly negative eigenvalue")
    return rho


def white_noise(rho: np.ndarray, p: float) -> np.ndarray:
    """(1 - p) * rho + p * I / 2^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise weight must lie in [0, 1], got {p}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (1.0 - p) * rho + (p / d) * np.eye(d)


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """Overlap <psi| rho |psi> with a pure target."""
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if rho.shape[0] != psi.shape[0]:
        raise ValueError("state dimensions do not match")
    return float(np.real(psi.conj() @ rho @ psi))


def schmidt_lambda_max(psi: np.ndarray) -> float:
    """Largest squared Schmidt coefficient over all canonical bipartitions.

    Equals the largest eigenvalue of any one-sided marginal of |psi><psi|;
    this is the constant of the projector witness.
    """
    psi = np.asarray(psi, dtype=complex)
    n = num_qubits(psi)
    if n < 2:
        raise ValueError("need at least 2 qubits")
    rho = np.outer(psi, psi.conj())
    best = 0.0
    for part in pauli.bipartitions(n):
        marginal = pauli.partial_trace(rho, part)
        best = max(best, float(np.linalg.eigvalsh(marginal)[-1]))
    return best
