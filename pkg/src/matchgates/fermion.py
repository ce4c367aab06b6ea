"""Polynomial-time simulation of nearest-neighbor matchgate circuits.

Works in the Majorana covariance picture.  Conventions (fixed here because
the literature varies in signs):

* Majorana operators, 0-indexed:  c_{2k} = (prod_{j<k} Z_j) X_k  and
  c_{2k+1} = (prod_{j<k} Z_j) Y_k.
* Covariance matrix  M_{uv} = -i <[c_u, c_v]> / 2, real antisymmetric, so
  M_{2k,2k+1} = <Z_k> and p(bit_k = 0) = (1 + M_{2k,2k+1}) / 2.
* A matchgate G on qubits (s, s+1) acts by  G^dag c_u G = sum_v R_{uv} c_v
  with R in SO(4) embedded at Majorana indices 2s..2s+3, and the state
  updates as  M -> R M R^T.

R is obtained from the quadratic generator expansion of G: with
G = e^{i delta} exp(i H),  H = sum_{u<v} alpha_{uv} (-i c_u c_v),  one has
R = exp(2 alpha).  Nonmatchgate parity-preserving gates have a Z x Z term in
their log (an interaction quartic in fermion operators), so they are refused.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, schur

from .analysis import classify
from .circuits import Circuit
from .errors import (
    BackendRefusal,
    BadSampleCount,
    BadTargets,
    DimensionMismatch,
    NotMatchgate,
)
from .gates import DEFAULT_TOL, I2, PAULIS, Mat2, Mat4, ToleranceConfig, det2, kron

# Probability below which a measurement outcome is treated as impossible.
PROB_FLOOR = 1e-12


@dataclass
class CovarianceState:
    n: int
    m: np.ndarray

    def copy(self) -> "CovarianceState":
        return CovarianceState(self.n, self.m.copy())

    def expectation_z(self, k: int) -> float:
        if not 0 <= k < self.n:
            raise BadTargets(f"qubit {k} out of range")
        return float(self.m[2 * k, 2 * k + 1])

    def antisymmetry_defect(self) -> float:
        return float(np.max(np.abs(self.m + self.m.T)))

    def purity_defect(self) -> float:
        return float(np.max(np.abs(self.m @ self.m.T - np.eye(2 * self.n))))


@dataclass(frozen=True)
class MajoranaRotation:
    """SO(2n) action on Majorana modes; ``block`` is the 4x4 piece at
    Majorana indices 2*site .. 2*site+3."""

    n: int
    site: int
    block: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        r = np.eye(2 * self.n)
        s = 2 * self.site
        r[s : s + 4, s : s + 4] = self.block
        return r


def _su2_log(m: Mat2) -> Mat2:
    """Hermitian h with exp(i h) = m for m in SU(2); h = t (n . sigma),
    t in [0, pi]."""
    cos_t = ((m[0, 0] + m[1, 1]) / 2.0).real
    skew = (m - m.conj().T) / 2j
    s = float(np.linalg.norm(skew, "fro")) / math.sqrt(2.0)
    if s < 1e-12:
        if cos_t > 0:
            return np.zeros((2, 2), dtype=complex)
        return math.pi * PAULIS["Z"]  # m = -I; any axis works, pin Z
    t = math.atan2(s, min(max(cos_t, -1.0), 1.0))
    return (t / s) * skew


def _pauli_coeffs(h: Mat2) -> tuple[float, float, float]:
    return (
        float((np.trace(PAULIS["X"] @ h) / 2.0).real),
        float((np.trace(PAULIS["Y"] @ h) / 2.0).real),
        float((np.trace(PAULIS["Z"] @ h) / 2.0).real),
    )


def matchgate_generator_coefficients(g: Mat4, tol: ToleranceConfig = DEFAULT_TOL) -> dict[str, float]:
    """Coefficients of a matchgate's Hamiltonian on the six quadratic
    generators {XX, YY, XY, YX, ZI, IZ}, via per-block su(2) logarithms."""
    cls = classify(g, tol)
    if not cls.is_pp:
        raise NotMatchgate("gate is not parity-preserving, hence not a matchgate")
    if not cls.is_matchgate:
        raise NotMatchgate(
            f"det(A)/det(B) = {cls.det_ratio:.6f} != 1: the gate's generator has a "
            "Z x Z component (a fermionic interaction), no quadratic expansion exists"
        )
    a, b = cls.blocks
    pa = cmath.phase(det2(a)) / 2.0
    pb = cmath.phase(det2(b)) / 2.0
    h_a = _su2_log(a * np.exp(-1j * pa))
    h_b = _su2_log(b * np.exp(-1j * pb))
    ax, ay, az = _pauli_coeffs(h_a)
    bx, by, bz = _pauli_coeffs(h_b)
    return {
        "XX": (ax + bx) / 2.0,
        "YY": (bx - ax) / 2.0,
        "XY": (ay - by) / 2.0,
        "YX": (ay + by) / 2.0,
        "ZI": (az + bz) / 2.0,
        "IZ": (az - bz) / 2.0,
    }


def principal_log_pauli_coefficients(g: Mat4) -> dict[str, float]:
    """Projection of the principal log of a P.P. gate onto its Pauli support
    {II, XX, YY, XY, YX, ZI, IZ, ZZ}.

    Cross-check for the matchgate test: the gate is a matchgate iff the ZZ
    coefficient is 0 mod pi/2 (the principal branch can land on +-pi/2 for
    legitimate matchgates, which is why the rotation extraction above works
    blockwise instead).
    """
    g = np.asarray(g, dtype=complex)
    t, z = schur(g, output="complex")
    h = z @ np.diag(np.angle(np.diag(t))) @ z.conj().T
    labels = {
        "II": kron(I2, I2),
        "XX": kron(PAULIS["X"], PAULIS["X"]),
        "YY": kron(PAULIS["Y"], PAULIS["Y"]),
        "XY": kron(PAULIS["X"], PAULIS["Y"]),
        "YX": kron(PAULIS["Y"], PAULIS["X"]),
        "ZI": kron(PAULIS["Z"], I2),
        "IZ": kron(I2, PAULIS["Z"]),
        "ZZ": kron(PAULIS["Z"], PAULIS["Z"]),
    }
    coeffs = {k: float((np.trace(p @ h) / 4.0).real) for k, p in labels.items()}
    recon = sum(c * labels[k] for k, c in coeffs.items())
    coeffs["residual"] = float(np.max(np.abs(h - recon)))
    return coeffs


def matchgate_to_rotation(
    g: Mat4, site: int, n: int, tol: ToleranceConfig = DEFAULT_TOL
) -> MajoranaRotation:
    """SO(4) Majorana rotation of a matchgate acting on qubits (site, site+1)."""
    if not 0 <= site < n - 1:
        raise BadTargets(f"site {site} has no right neighbor in n={n}")
    coeff = matchgate_generator_coefficients(g, tol)
    alpha = np.zeros((4, 4))
    alpha[0, 1] = coeff["ZI"]
    alpha[2, 3] = coeff["IZ"]
    alpha[1, 2] = coeff["XX"]
    alpha[0, 3] = -coeff["YY"]
    alpha[1, 3] = coeff["XY"]
    alpha[0, 2] = -coeff["YX"]
    alpha -= alpha.T
    block = expm(2.0 * alpha)
    return MajoranaRotation(n=n, site=site, block=block)


def init_covariance(n: int, bits: int | str = 0) -> CovarianceState:
    """Covariance matrix of a computational basis state."""
    if isinstance(bits, str):
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise BadTargets(f"bad basis label {bits!r} for n={n}")
        values = [int(ch) for ch in bits]
    else:
        values = [(int(bits) >> (n - 1 - k)) & 1 for k in range(n)]
    m = np.zeros((2 * n, 2 * n))
    for k, bit in enumerate(values):
        sign = 1.0 - 2.0 * bit
        m[2 * k, 2 * k + 1] = sign
        m[2 * k + 1, 2 * k] = -sign
    return CovarianceState(n, m)


def evolve(state: CovarianceState, rot: MajoranaRotation) -> CovarianceState:
    """M -> R M R^T; local O(n) update using the 4x4 block."""
    if rot.n != state.n:
        raise DimensionMismatch(f"rotation is for n={rot.n}, state has n={state.n}")
    m = state.m.copy()
    s = 2 * rot.site
    sl = slice(s, s + 4)
    m[sl, :] = rot.block @ m[sl, :]
    m[:, sl] = m[:, sl] @ rot.block.T
    return CovarianceState(state.n, m)


def measure_z(
    state: CovarianceState,
    k: int,
    seed_or_rng: int | np.random.Generator,
    force_outcome: int | None = None,
) -> tuple[int, CovarianceState]:
    """Measure Z_k; returns (outcome bit, post-measurement state).

    ``force_outcome`` post-selects (used by exact-distribution oracles); it
    is an error to force an outcome of probability below PROB_FLOOR.
    """
    if not 0 <= k < state.n:
        raise BadTargets(f"qubit {k} out of range")
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    u, v = 2 * k, 2 * k + 1
    m = state.m
    p0 = min(max((1.0 + m[u, v]) / 2.0, 0.0), 1.0)
    if force_outcome is None:
        if p0 >= 1.0 - PROB_FLOOR:
            outcome = 0
        elif p0 <= PROB_FLOOR:
            outcome = 1
        else:
            outcome = 0 if rng.random() < p0 else 1
    else:
        outcome = int(force_outcome)
    sign = 1.0 - 2.0 * outcome
    p_out = (1.0 + sign * m[u, v]) / 2.0
    if p_out < PROB_FLOOR:
        raise BadSampleCount(f"outcome {outcome} on qubit {k} has probability ~0")

    col_u = m[:, u].copy()
    col_v = m[:, v].copy()
    new = m + (sign / (2.0 * p_out)) * (np.outer(col_v, col_u) - np.outer(col_u, col_v))
    new[(u, v), :] = 0.0
    new[:, (u, v)] = 0.0
    new[u, v] = sign
    new[v, u] = -sign
    return outcome, CovarianceState(state.n, new)


def measurement_probability(state: CovarianceState, k: int, outcome: int) -> float:
    mz = state.m[2 * k, 2 * k + 1]
    return float((1.0 + (1.0 - 2.0 * outcome) * mz) / 2.0)


def _op_rotation(op, n: int, tol: ToleranceConfig, index: int) -> MajoranaRotation:
    """Rotation for a circuit op, embedding single-qubit gates into a
    nearest-neighbor pair; refusals name the op index."""
    gate, targets = op.gate, op.targets
    if len(targets) == 1:
        (q,) = targets
        if q < n - 1:
            gate, targets = kron(gate, I2), (q, q + 1)
        else:
            gate, targets = kron(I2, gate), (q - 1, q)
    if targets[1] != targets[0] + 1:
        if targets[0] == targets[1] + 1:
            # Reversed pair: conjugate by the index swap to normal order.
            swap = np.array(
                [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
            )
            gate, targets = swap @ gate @ swap, (targets[1], targets[0])
        else:
            raise BackendRefusal(
                f"op {index} ({op.name or 'gate'} on {op.targets}) is not nearest-neighbor"
            )
    try:
        return matchgate_to_rotation(gate, targets[0], n, tol)
    except NotMatchgate as exc:
        raise BackendRefusal(
            f"op {index} ({op.name or 'gate'} on {op.targets}) is not a matchgate: {exc}"
        ) from exc


def circuit_rotations(
    circuit: Circuit, tol: ToleranceConfig = DEFAULT_TOL
) -> list[MajoranaRotation]:
    """Validate a matchgate circuit and return its per-op Majorana rotations."""
    return [
        _op_rotation(op, circuit.n, tol, idx) for idx, op in enumerate(circuit.flat())
    ]


def run_covariance(
    circuit: Circuit,
    initial: int | str = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> CovarianceState:
    state = init_covariance(circuit.n, initial)
    m = state.m
    for idx, op in enumerate(circuit.flat()):
        rot = _op_rotation(op, circuit.n, tol, idx)
        s = 2 * rot.site
        sl = slice(s, s + 4)
        m[sl, :] = rot.block @ m[sl, :]
        m[:, sl] = m[:, sl] @ rot.block.T
    return state


def sample_covariance(state: CovarianceState, shots: int, seed: int) -> dict[int, int]:
    """Full-register measurement histogram, qubits read left to right.

    Vectorized across shots: every shot conditions its own covariance copy,
    so the joint statistics are exact.
    """
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise BadSampleCount(f"shots must be a positive integer, got {shots!r}")
    n = state.n
    rng = np.random.default_rng(seed)
    m = np.broadcast_to(state.m, (shots, 2 * n, 2 * n)).copy()
    bits = np.zeros((shots, n), dtype=np.int64)
    for k in range(n):
        u, v = 2 * k, 2 * k + 1
        p0 = np.clip((1.0 + m[:, u, v]) / 2.0, 0.0, 1.0)
        out = (rng.random(shots) >= p0).astype(np.int64)
        # Clamp effectively-certain outcomes so conditioning never divides by ~0.
        out[p0 >= 1.0 - PROB_FLOOR] = 0
        out[p0 <= PROB_FLOOR] = 1
        bits[:, k] = out
        sign = 1.0 - 2.0 * out
        p_out = np.maximum((1.0 + sign * m[:, u, v]) / 2.0, PROB_FLOOR)
        col_u = m[:, :, u].copy()
        col_v = m[:, :, v].copy()
        scale = sign / (2.0 * p_out)
        upd = np.einsum("s,sj,sl->sjl", scale, col_v, col_u)
        m += upd - upd.transpose(0, 2, 1)
        m[:, (u, v), :] = 0.0
        m[:, :, (u, v)] = 0.0
        m[:, u, v] = sign
        m[:, v, u] = -sign
    weights = 1 << np.arange(n - 1, -1, -1)
    values = bits @ weights
    hist: dict[int, int] = {}
    for val, count in zip(*np.unique(values, return_counts=True)):
        hist[int(val)] = int(count)
    return hist
