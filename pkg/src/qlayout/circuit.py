"""Circuit intermediate representation and dependency preprocessing.

A circuit is an ordered list of opaque 1- and 2-qubit gates over M logical
qubits. Layout synthesis only cares about gate arity and operand identity,
so gate names are carried through untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace


class CircuitError(ValueError):
    """Raised for malformed circuit text or invalid derived inputs."""


@dataclass(frozen=True)
class Gate:
    index: int
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.qubits) not in (1, 2):
            raise CircuitError(f"gate {self.index}: expected 1 or 2 operands")
        if len(self.qubits) == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"gate {self.index}: repeated operand q{self.qubits[0]}")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    # (l, l') pairs with l < l', lexicographically sorted; None until derived.
    collisions: tuple[tuple[int, int], ...] | None = None
    dependencies: tuple[tuple[int, int], ...] | None = None
    longest_chain: int | None = None

    @property
    def num_gates(self) -> int:
        return len(self.gates)

    @property
    def num_two_qubit(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def single_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if not g.is_two_qubit]

    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_two_qubit]


_QUBIT_RE = re.compile(r"^q(\d+)$")


def _statements(text: str):
    """Yield (line_number, statement) pairs, splitting on newlines and ';'."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if stmt:
                yield lineno, stmt


def parse_program(text: str) -> Circuit:
    """Parse gate-list text into a Circuit.

    Grammar: first statement is "qubits M"; every following statement is
    "<name> q<i>" or "<name> q<i> q<j>". "#" starts a comment and ";" may
    separate statements on one line.
    """
    num_qubits = None
    gates: list[Gate] = []
    for lineno, stmt in _statements(text):
        tokens = stmt.split()
        if num_qubits is None:
            if len(tokens) != 2 or tokens[0] != "qubits":
                raise CircuitError(f"line {lineno}: expected 'qubits <M>' header")
            try:
                num_qubits = int(tokens[1])
            except ValueError:
                raise CircuitError(f"line {lineno}: bad qubit count {tokens[1]!r}") from None
            if num_qubits < 0:
                raise CircuitError(f"line {lineno}: negative qubit count")
            continue
        name, operands = tokens[0], tokens[1:]
        if not operands or len(operands) > 2:
            raise CircuitError(f"line {lineno}: gate needs 1 or 2 operands, got {len(operands)}")
        qubits = []
        for tok in operands:
            m = _QUBIT_RE.match(tok)
            if not m:
                raise CircuitError(f"line {lineno}: bad operand {tok!r}, expected q<i>")
            q = int(m.group(1))
            if q >= num_qubits:
                raise CircuitError(f"line {lineno}: q{q} out of range for {num_qubits} qubits")
            qubits.append(q)
        if len(qubits) == 2 and qubits[0] == qubits[1]:
            raise CircuitError(f"line {lineno}: repeated operand {operands[0]}")
        gates.append(Gate(index=len(gates), name=name, qubits=tuple(qubits)))
    if num_qubits is None:
        raise CircuitError("empty program: missing 'qubits <M>' header")
    return Circuit(num_qubits=num_qubits, gates=tuple(gates))


def derive_collisions(circuit: Circuit) -> Circuit:
    """Populate the collision list: all gate pairs sharing a logical qubit."""
    pairs = []
    gates = circuit.gates
    for j in range(len(gates)):
        qs = set(gates[j].qubits)
        for i in range(j):
            if qs.intersection(gates[i].qubits):
                pairs.append((i, j))
    pairs.sort()
    return replace(circuit, collisions=tuple(pairs))


def derive_dependencies(circuit: Circuit, user_deps=None) -> Circuit:
    """Populate dependencies: the collision list by default, user pairs otherwise.

    Passing an explicit empty list declares all gates free to commute.
    """
    if circuit.collisions is None:
        raise CircuitError("collisions must be derived before dependencies")
    if user_deps is None:
        deps = circuit.collisions
    else:
        seen = set()
        for pair in user_deps:
            l, lp = pair
            if not (0 <= l < lp < circuit.num_gates):
                raise CircuitError(f"dependency {pair}: need 0 <= l < l' < L")
            seen.add((l, lp))
        deps = tuple(sorted(seen))
    out = replace(circuit, dependencies=deps)
    return replace(out, longest_chain=longest_dependency_chain(out))


def longest_dependency_chain(circuit: Circuit) -> int:
    """Length in gates of the longest path in the dependency DAG (0 when empty)."""
    if circuit.dependencies is None:
        raise CircuitError("dependencies must be derived first")
    n = circuit.num_gates
    if n == 0:
        return 0
    preds: list[list[int]] = [[] for _ in range(n)]
    for l, lp in circuit.dependencies:
        preds[lp].append(l)
    chain = [1] * n
    # Every edge satisfies l < l', so index order is a topological order.
    for j in range(n):
        if preds[j]:
            chain[j] = 1 + max(chain[i] for i in preds[j])
    return max(chain)


def preprocess(circuit: Circuit, user_deps=None) -> Circuit:
    """Convenience: collisions, dependencies, and chain length in one call."""
    return derive_dependencies(derive_collisions(circuit), user_deps)


def load_circuit(text: str, user_deps=None) -> Circuit:
    """Parse and fully preprocess a gate-list program."""
    return preprocess(parse_program(text), user_deps)
