"""Circuit container shared by the simulators and the compiler.

A circuit is an ordered list of gate applications on an n-qubit line.  Ops
are either a single :class:`CircuitOp` or a :class:`RepeatedSegment`, a
grouped repetition of a short op body.  Repetition groups exist so compiled
circuits with thousands of identical entangler blocks stay compact and so
the unitary builder can use matrix powers; semantically a segment is exactly
its body repeated ``count`` times, and :meth:`Circuit.flat` yields that
flattening.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import BadTargets


@dataclass(frozen=True)
class CircuitOp:
    """One gate application.

    ``targets`` is ordered: the gate's most-significant index bit acts on
    ``targets[0]``.  ``tag`` marks special roles (the compiler tags the
    supplied nonmatchgate as ``"target"``).
    """

    gate: np.ndarray
    targets: tuple[int, ...]
    name: str | None = None
    params: tuple[float, ...] = ()
    tag: str | None = None

    @property
    def n_qubits(self) -> int:
        return len(self.targets)

    @property
    def nearest_neighbor(self) -> bool:
        """True for single-qubit ops and adjacent two-qubit ops."""
        if len(self.targets) == 1:
            return True
        return abs(self.targets[0] - self.targets[1]) == 1


@dataclass(frozen=True)
class RepeatedSegment:
    body: tuple[CircuitOp, ...]
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("repetition count must be >= 1")


@dataclass
class Circuit:
    n: int
    ops: list[CircuitOp | RepeatedSegment] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def _check_targets(self, gate: np.ndarray, targets: tuple[int, ...]):
        k = len(targets)
        if k not in (1, 2):
            raise BadTargets(f"gates act on 1 or 2 qubits, got {k} targets")
        if len(set(targets)) != k:
            raise BadTargets(f"repeated target in {targets}")
        if any(t < 0 or t >= self.n for t in targets):
            raise BadTargets(f"targets {targets} out of range for n={self.n}")
        if gate.shape != (2**k, 2**k):
            raise BadTargets(
                f"gate shape {gate.shape} does not match {k} target qubit(s)"
            )

    def append(
        self,
        gate: np.ndarray,
        targets: Iterable[int],
        name: str | None = None,
        params: Iterable[float] = (),
        tag: str | None = None,
    ) -> CircuitOp:
        gate = np.asarray(gate, dtype=complex)
        targets = tuple(int(t) for t in targets)
        self._check_targets(gate, targets)
        op = CircuitOp(gate, targets, name, tuple(params), tag)
        self.ops.append(op)
        return op

    def append_segment(self, body: Iterable[CircuitOp], count: int) -> RepeatedSegment:
        seg = RepeatedSegment(tuple(body), int(count))
        for op in seg.body:
            self._check_targets(op.gate, op.targets)
        self.ops.append(seg)
        return seg

    def flat(self) -> Iterator[CircuitOp]:
        """Yield every op with repetition groups expanded."""
        for entry in self.ops:
            if isinstance(entry, RepeatedSegment):
                for _ in range(entry.count):
                    yield from entry.body
            else:
                yield entry

    def flat_count(self) -> int:
        total = 0
        for entry in self.ops:
            if isinstance(entry, RepeatedSegment):
                total += entry.count * len(entry.body)
            else:
                total += 1
        return total

    def two_qubit_ops_nearest_neighbor(self) -> bool:
        return all(op.nearest_neighbor for op in self.flat())
