"""Device model: validation, derived structures, fidelity scaling."""

import math

import pytest
from hypothesis import given, strategies as st
from importlib import resources

from qlayout.device import (
    DeviceError,
    build_device,
    incident_edges,
    load_device,
    overlapping_pairs,
    scaled_log_fidelity,
    serialize_device,
    swap_log_fidelity,
)


def bundled(name):
    return (resources.files("qlayout") / "data" / name).read_text()


def test_qx2_shape():
    d = load_device(bundled("qx2.json"))
    assert d.num_physical == 5
    assert d.num_edges == 6
    assert d.is_connected()
    # every edge pair of QX2 shares an endpoint except the 5 disjoint ones
    assert len(overlapping_pairs(d)) == 10


def test_grid_devices_connected():
    for name, n in (("grid2x3.json", 6), ("grid2x4.json", 8), ("grid4x4.json", 16)):
        d = load_device(bundled(name))
        assert d.num_physical == n
        assert d.is_connected()


def test_build_canonicalizes_edges():
    d = build_device(3, [(2, 1), (0, 1)])
    assert d.edges == ((1, 2), (0, 1))
    assert d.edge_index(1, 2) == 0
    assert d.edge_index(2, 1) == 0
    with pytest.raises(DeviceError):
        d.edge_index(0, 2)


def test_incident_lists():
    d = build_device(3, [(0, 1), (1, 2)])
    assert incident_edges(d, 1) == (0, 1)
    assert incident_edges(d, 0) == (0,)
    with pytest.raises(DeviceError):
        incident_edges(d, 3)


@pytest.mark.parametrize("nodes,edges", [
    (2, [(0, 0)]),            # self loop
    (2, [(0, 1), (1, 0)]),    # duplicate
    (2, [(0, 2)]),            # out of range
    (-1, []),                 # bad count
    (2, [(0, 1, 2)]),         # arity
])
def test_build_rejects(nodes, edges):
    with pytest.raises(DeviceError):
        build_device(nodes, edges)


def test_fidelity_validation():
    with pytest.raises(DeviceError):
        build_device(2, [(0, 1)], {"single": [0.9]})
    with pytest.raises(DeviceError):
        build_device(2, [(0, 1)], {"two": [1.5]})
    with pytest.raises(DeviceError):
        build_device(2, [(0, 1)], {"measure": [0.9, 0.0]})


def test_disconnected_detected():
    assert not build_device(4, [(0, 1), (2, 3)]).is_connected()
    assert build_device(1, []).is_connected()
    assert build_device(0, []).is_connected()


def test_serialize_roundtrip():
    d = load_device(bundled("qx2.json"))
    text = serialize_device(d)
    again = load_device(text)
    assert again == d
    assert serialize_device(again) == text


def test_load_rejects_malformed():
    with pytest.raises(DeviceError):
        load_device("not json")
    with pytest.raises(DeviceError):
        load_device("{}")
    with pytest.raises(DeviceError):
        load_device("[1, 2]")


def test_scaled_log_fidelity_values():
    assert scaled_log_fidelity(1.0) == 0
    assert scaled_log_fidelity(0.99) == -10
    assert scaled_log_fidelity(0.97) == -30
    with pytest.raises(DeviceError):
        scaled_log_fidelity(0.0)
    with pytest.raises(DeviceError):
        scaled_log_fidelity(-0.5)


def test_scaled_log_rounds_half_away_from_zero():
    # straddle the -0.5 boundary; round-trip error through exp/log is ~1e-13
    assert scaled_log_fidelity(math.exp(-0.000500001)) == -1
    assert scaled_log_fidelity(math.exp(-0.000499999)) == 0


def test_swap_log_fidelity_triples():
    d = build_device(2, [(0, 1)], {"two": [0.97]})
    assert swap_log_fidelity(d, 0) == 3 * scaled_log_fidelity(0.97)


@given(st.floats(min_value=0.01, max_value=1.0))
def test_scaled_log_close_to_real(f):
    s = scaled_log_fidelity(f)
    assert abs(1000.0 * math.log(f) - s) <= 0.5
