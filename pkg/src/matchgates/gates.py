"""Dense two-qubit gate algebra: parity-preserving constructors and the gate zoo.

Conventions used throughout the package:

* Two-qubit basis order is |q0 q1> with qubit 0 the most-significant bit,
  i.e. rows/cols run |00>, |01>, |10>, |11>.
* A parity-preserving gate G(A, B) carries A on the even-parity block
  {|00>, |11>} and B on the odd-parity block {|01>, |10>}::

      G(A, B) = [[A00, 0,   0,   A01],
                 [0,   B00, B01, 0  ],
                 [0,   B10, B11, 0  ],
                 [A10, 0,   0,   A11]]

* ``nl(a, b, c)`` is exp(i(a XX + b YY + c ZZ)), evaluated in closed form.
* RX/RY/RZ use the standard half-angle convention exp(-i theta P / 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadArity, NonUnitaryInput, NotParityPreserving, UnknownGate

# Gates are plain complex128 ndarrays; 2x2 for one qubit, 4x4 for two.
Mat2 = np.ndarray
Mat4 = np.ndarray


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used by checks and classification."""

    tol_unitary: float = 1e-9
    tol_classify: float = 1e-9
    tol_phase: float = 1e-9

    def __post_init__(self):
        for name in ("tol_unitary", "tol_classify", "tol_phase"):
            v = getattr(self, name)
            if not (0.0 < v < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {v!r}")


DEFAULT_TOL = ToleranceConfig()

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def det2(m: Mat2) -> complex:
    """Explicit 2x2 determinant; avoids LU sign noise (-0.0 imaginary parts
    flip the branch of arg at the cut) for exact-valued gates."""
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL.tol_unitary) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol


def _require_unitary(m: np.ndarray, tol: float, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not is_unitary(m, tol):
        raise NonUnitaryInput(f"{what} is not unitary within {tol:g}")
    return m


def rx(theta: float) -> Mat2:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> Mat2:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> Mat2:
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)


def phase_rz(chi: float) -> Mat2:
    """diag(e^{i chi}, e^{-i chi}); the Z-rotation convention of the
    parity-preserving decomposition (equals rz(-2 chi))."""
    return np.array([[np.exp(1j * chi), 0], [0, np.exp(-1j * chi)]], dtype=complex)


def build_pp(a: Mat2, b: Mat2, tol: ToleranceConfig = DEFAULT_TOL) -> Mat4:
    """Assemble the parity-preserving gate G(A, B) from its unitary blocks."""
    a = _require_unitary(a, tol.tol_unitary, "even block A")
    b = _require_unitary(b, tol.tol_unitary, "odd block B")
    g = np.zeros((4, 4), dtype=complex)
    g[0, 0], g[0, 3], g[3, 0], g[3, 3] = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    g[1, 1], g[1, 2], g[2, 1], g[2, 2] = b[0, 0], b[0, 1], b[1, 0], b[1, 1]
    return g


def extract_blocks(g: Mat4) -> tuple[Mat2, Mat2]:
    """Return (A, B) of a gate laid out as G(A, B); no parity check."""
    g = np.asarray(g, dtype=complex)
    a = np.array([[g[0, 0], g[0, 3]], [g[3, 0], g[3, 3]]])
    b = np.array([[g[1, 1], g[1, 2]], [g[2, 1], g[2, 2]]])
    return a, b


def off_block_weight(g: Mat4) -> float:
    """Largest modulus among the eight entries that vanish for a P.P. gate."""
    g = np.asarray(g, dtype=complex)
    mask = np.array(
        [
            [0, 1, 1, 0],
            [1, 0, 0, 1],
            [1, 0, 0, 1],
            [0, 1, 1, 0],
        ],
        dtype=bool,
    )
    return float(np.max(np.abs(g[mask])))


def pp_product(g1: Mat4, g2: Mat4, tol: ToleranceConfig = DEFAULT_TOL) -> Mat4:
    """Product of two parity-preserving unitaries; blocks multiply blockwise."""
    for i, g in enumerate((g1, g2)):
        g = _require_unitary(g, tol.tol_unitary, f"factor {i + 1}")
        if off_block_weight(g) > tol.tol_classify:
            raise NotParityPreserving(
                f"factor {i + 1} has off-block weight {off_block_weight(g):.3e}"
            )
    return np.asarray(g1, dtype=complex) @ np.asarray(g2, dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; qubit 0 (the left factor) is the most-significant bit."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def nl(a: float, b: float, c: float) -> Mat4:
    """exp(i(a XX + b YY + c ZZ)) by closed-form block evaluation.

    The even block is e^{ic}(cos(a-b) I + i sin(a-b) X), the odd block
    e^{-ic}(cos(a+b) I + i sin(a+b) X).
    """
    ea, eb = np.exp(1j * c), np.exp(-1j * c)
    cm, sm = np.cos(a - b), np.sin(a - b)
    cp, sp = np.cos(a + b), np.sin(a + b)
    return np.array(
        [
            [ea * cm, 0, 0, 1j * ea * sm],
            [0, eb * cp, 1j * eb * sp, 0],
            [0, 1j * eb * sp, eb * cp, 0],
            [1j * ea * sm, 0, 0, ea * cm],
        ],
        dtype=complex,
    )


def equal_up_to_global_phase(
    m: np.ndarray, n: np.ndarray, tol: float = DEFAULT_TOL.tol_phase
) -> bool:
    """True iff e^{i phi} m == n entry-wise within ``tol`` for some real phi.

    The phase is anchored on the first entry of ``n`` with modulus >= 0.5
    (every row of a unitary has one; falls back to the largest entry).
    """
    m = np.asarray(m, dtype=complex)
    n = np.asarray(n, dtype=complex)
    if m.shape != n.shape:
        return False
    flat_n = n.ravel()
    big = np.flatnonzero(np.abs(flat_n) >= 0.5)
    idx = big[0] if big.size else int(np.argmax(np.abs(flat_n)))
    ref = m.ravel()[idx]
    if abs(ref) < 1e-300:
        return False
    phi = flat_n[idx] / ref
    phi /= abs(phi)
    return bool(np.max(np.abs(phi * m - n)) <= tol)


def _as_angle_list(params, arity: int, name: str):
    if len(params) != arity:
        raise BadArity(f"{name} takes {arity} parameter(s), got {len(params)}")
    return [float(p) for p in params]


_FIXED: dict[str, np.ndarray] = {}


def _register_fixed():
    swap = build_pp(I2, X)
    iswap = build_pp(I2, 1j * X)
    fswap = build_pp(Z, X)
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    _FIXED.update(
        {
            "I": I2,
            "X": X,
            "Y": Y,
            "Z": Z,
            "H": H,
            "S": S,
            "T": T,
            "SWAP": swap,
            "ISWAP": iswap,
            "FSWAP": fswap,
            "CZ": cz,
            "CNOT": cnot,
            "CX": cnot,
        }
    )


_register_fixed()

_PARAMETRIC = {
    "RX": (1, lambda p: rx(p[0])),
    "RY": (1, lambda p: ry(p[0])),
    "RZ": (1, lambda p: rz(p[0])),
    "NL": (3, lambda p: nl(p[0], p[1], p[2])),
}


def gate_library(name: str, params=()) -> np.ndarray:
    """Look up a standard gate by name; parametric gates take radians."""
    key = name.upper()
    if key in _FIXED:
        if params:
            raise BadArity(f"{name} takes no parameters")
        return _FIXED[key].copy()
    if key in _PARAMETRIC:
        arity, builder = _PARAMETRIC[key]
        return builder(_as_angle_list(params, arity, name))
    raise UnknownGate(f"unknown gate {name!r}")


def gate_names() -> list[str]:
    return sorted(_FIXED) + sorted(_PARAMETRIC)
