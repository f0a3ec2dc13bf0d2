"""Gate-list parsing and dependency preprocessing."""

import pytest
from hypothesis import given, strategies as st

from qlayout.circuit import (
    Circuit,
    CircuitError,
    Gate,
    derive_collisions,
    derive_dependencies,
    load_circuit,
    longest_dependency_chain,
    parse_program,
    preprocess,
)

OR_TEXT = """\
qubits 3
x q0
x q1
h q2
ry q2
cx q1 q2
ry q2
cx q0 q2
"""


def test_parse_basic():
    c = parse_program("qubits 2\nh q0\ncx q0 q1\n")
    assert c.num_qubits == 2
    assert c.num_gates == 2
    assert c.gates[0] == Gate(index=0, name="h", qubits=(0,))
    assert c.gates[1].qubits == (0, 1)
    assert c.gates[1].is_two_qubit


def test_parse_comments_and_semicolons():
    c = parse_program("# leading comment\nqubits 2; h q0; cx q0 q1 # tail\n")
    assert c.num_gates == 2


def test_parse_empty_circuit():
    c = parse_program("qubits 4\n")
    assert c.num_qubits == 4
    assert c.num_gates == 0


@pytest.mark.parametrize("text", [
    "",                          # no header
    "h q0\n",                    # gate before header
    "qubits two\n",              # non-integer count
    "qubits -1\n",               # negative count
    "qubits 2\ncx q0 q1 q0\n",   # 3 operands
    "qubits 2\ncx q0 q0\n",      # repeated operand
    "qubits 2\nh q2\n",          # out of range
    "qubits 2\nh 0\n",           # operand not q<i>
])
def test_parse_rejects(text):
    with pytest.raises(CircuitError):
        parse_program(text)


def test_collisions_shared_qubit_pairs():
    c = derive_collisions(parse_program(OR_TEXT))
    # q2 appears in gates 2,3,4,5,6; q1 in 1,4; q0 in 0,6
    assert (2, 3) in c.collisions
    assert (1, 4) in c.collisions
    assert (0, 6) in c.collisions
    assert (0, 1) not in c.collisions
    assert all(l < lp for l, lp in c.collisions)
    assert list(c.collisions) == sorted(c.collisions)


def test_dependencies_default_to_collisions():
    c = preprocess(parse_program(OR_TEXT))
    assert c.dependencies == c.collisions


def test_user_dependencies_override():
    c = derive_collisions(parse_program(OR_TEXT))
    c = derive_dependencies(c, user_deps=[(0, 1)])
    assert c.dependencies == ((0, 1),)
    assert c.longest_chain == 2


def test_empty_user_dependencies_mean_full_commutation():
    c = derive_collisions(parse_program(OR_TEXT))
    c = derive_dependencies(c, user_deps=[])
    assert c.dependencies == ()
    assert c.longest_chain == 1


def test_user_dependency_validation():
    c = derive_collisions(parse_program(OR_TEXT))
    with pytest.raises(CircuitError):
        derive_dependencies(c, user_deps=[(3, 3)])
    with pytest.raises(CircuitError):
        derive_dependencies(c, user_deps=[(5, 2)])
    with pytest.raises(CircuitError):
        derive_dependencies(c, user_deps=[(0, 99)])


def test_longest_chain_or_circuit():
    c = preprocess(parse_program(OR_TEXT))
    # q2 threads gates 2,3,4,5,6 in sequence
    assert c.longest_chain == 5


def test_longest_chain_empty():
    c = preprocess(parse_program("qubits 3\n"))
    assert c.longest_chain == 0


def test_chain_requires_dependencies():
    c = parse_program(OR_TEXT)
    with pytest.raises(CircuitError):
        longest_dependency_chain(c)


def test_load_circuit_is_preprocessed():
    c = load_circuit(OR_TEXT)
    assert c.collisions is not None
    assert c.dependencies is not None
    assert c.longest_chain == 5


names = st.sampled_from(["h", "x", "t", "cx", "cz", "swap"])


@st.composite
def programs(draw):
    m = draw(st.integers(min_value=1, max_value=5))
    lines = [f"qubits {m}"]
    for _ in range(draw(st.integers(min_value=0, max_value=8))):
        name = draw(names)
        if m >= 2 and draw(st.booleans()):
            a = draw(st.integers(min_value=0, max_value=m - 1))
            b = draw(st.integers(min_value=0, max_value=m - 1).filter(lambda x: x != a))
            lines.append(f"{name} q{a} q{b}")
        else:
            a = draw(st.integers(min_value=0, max_value=m - 1))
            lines.append(f"{name} q{a}")
    return "\n".join(lines) + "\n"


@given(programs())
def test_parse_roundtrip_stable(text):
    c = parse_program(text)
    rebuilt = "\n".join(
        [f"qubits {c.num_qubits}"]
        + [g.name + " " + " ".join(f"q{q}" for q in g.qubits) for g in c.gates]
    ) + "\n"
    again = parse_program(rebuilt)
    assert again.num_qubits == c.num_qubits
    assert [(g.name, g.qubits) for g in again.gates] == \
        [(g.name, g.qubits) for g in c.gates]


@given(programs())
def test_chain_bounds(text):
    c = preprocess(parse_program(text))
    if c.num_gates == 0:
        assert c.longest_chain == 0
    else:
        assert 1 <= c.longest_chain <= c.num_gates
