"""Coupling-graph model: edges, overlap structure, and fidelity profile."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

# Uniform defaults applied when a device file carries no fidelity block.
DEFAULT_MEASURE_FIDELITY = 0.99
DEFAULT_SINGLE_FIDELITY = 0.99
DEFAULT_TWO_FIDELITY = 0.98


class DeviceError(ValueError):
    """Raised for malformed device descriptions."""


@dataclass(frozen=True)
class Device:
    num_physical: int
    edges: tuple[tuple[int, int], ...]
    # Unordered overlapping-edge pairs, stored as (k, k') with k < k'.
    overlap_pairs: frozenset[tuple[int, int]]
    # incident[p] lists edge indices touching node p, ascending.
    incident: tuple[tuple[int, ...], ...]
    f_measure: tuple[float, ...]
    f_single: tuple[float, ...]
    f_two: tuple[float, ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_index(self, p: int, q: int) -> int:
        key = (min(p, q), max(p, q))
        try:
            return self.edges.index(key)
        except ValueError:
            raise DeviceError(f"no edge between p{p} and p{q}") from None

    def is_connected(self) -> bool:
        if self.num_physical <= 1:
            return True
        seen = {0}
        frontier = [0]
        adj = [[] for _ in range(self.num_physical)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        while frontier:
            nxt = []
            for p in frontier:
                for q in adj[p]:
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        return len(seen) == self.num_physical


def _check_fidelity(values, count, label):
    if len(values) != count:
        raise DeviceError(f"fidelity list '{label}' has {len(values)} entries, expected {count}")
    for v in values:
        if not (isinstance(v, (int, float)) and 0.0 < v <= 1.0):
            raise DeviceError(f"fidelity list '{label}': value {v!r} outside (0, 1]")
    return tuple(float(v) for v in values)


def build_device(num_physical: int, edges, fidelity: dict | None = None) -> Device:
    """Validate raw fields and precompute O and the per-node incidence lists."""
    if num_physical < 0:
        raise DeviceError("negative node count")
    canon = []
    seen = set()
    for e in edges:
        if len(e) != 2:
            raise DeviceError(f"edge {e!r} must have two endpoints")
        a, b = int(e[0]), int(e[1])
        if a == b:
            raise DeviceError(f"self-loop on node {a}")
        if not (0 <= a < num_physical and 0 <= b < num_physical):
            raise DeviceError(f"edge ({a},{b}) references node >= {num_physical}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise DeviceError(f"duplicate edge ({a},{b})")
        seen.add(key)
        canon.append(key)
    edges_t = tuple(canon)
    incident = tuple(
        tuple(k for k, e in enumerate(edges_t) if p in e) for p in range(num_physical)
    )
    overlap = frozenset(
        (i, j)
        for i in range(len(edges_t))
        for j in range(i + 1, len(edges_t))
        if set(edges_t[i]) & set(edges_t[j])
    )
    fidelity = fidelity or {}
    f0 = _check_fidelity(
        fidelity.get("measure", [DEFAULT_MEASURE_FIDELITY] * num_physical),
        num_physical, "measure")
    f1 = _check_fidelity(
        fidelity.get("single", [DEFAULT_SINGLE_FIDELITY] * num_physical),
        num_physical, "single")
    f2 = _check_fidelity(
        fidelity.get("two", [DEFAULT_TWO_FIDELITY] * len(edges_t)),
        len(edges_t), "two")
    return Device(
        num_physical=num_physical,
        edges=edges_t,
        overlap_pairs=overlap,
        incident=incident,
        f_measure=f0,
        f_single=f1,
        f_two=f2,
    )


def load_device(text: str) -> Device:
    """Load a device from its JSON form (see serialize_device)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeviceError(f"device JSON: {exc}") from None
    if not isinstance(obj, dict) or "num_qubits" not in obj or "edges" not in obj:
        raise DeviceError("device JSON needs 'num_qubits' and 'edges'")
    return build_device(int(obj["num_qubits"]), obj["edges"], obj.get("fidelity"))


def serialize_device(device: Device) -> str:
    """Canonical JSON form; load_device(serialize_device(d)) reproduces d."""
    obj = {
        "num_qubits": device.num_physical,
        "edges": [list(e) for e in device.edges],
        "fidelity": {
            "measure": list(device.f_measure),
            "single": list(device.f_single),
            "two": list(device.f_two),
        },
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def overlapping_pairs(device: Device) -> frozenset[tuple[int, int]]:
    """All unordered pairs of distinct edges sharing an endpoint."""
    return device.overlap_pairs


def bipartition(device: Device):
    """2-coloring of the coupling graph, or None if it has an odd cycle."""
    n = device.num_physical
    color = [-1] * n
    for start in range(n):
        if color[start] != -1:
            continue
        color[start] = 0
        frontier = [start]
        while frontier:
            p = frontier.pop()
            for k in device.incident[p]:
                a, b = device.edges[k]
                q = a + b - p
                if color[q] == -1:
                    color[q] = 1 - color[p]
                    frontier.append(q)
                elif color[q] == color[p]:
                    return None
    return tuple(color)


def enumerate_automorphisms(device: Device, cap: int = 5000):
    """Every node permutation preserving the edge set, identity included.

    Returns a list of N-tuples, or None when the group has more than cap
    elements (callers should then treat the device as too symmetric to
    exploit). Exhaustive backtracking pruned by iterated neighborhood
    coloring; fine for the device sizes this toolkit targets.
    """
    N = device.num_physical
    if N == 0:
        return [()]
    adj = [set() for _ in range(N)]
    for a, b in device.edges:
        adj[a].add(b)
        adj[b].add(a)
    # refine colors until stable; automorphisms preserve these classes
    color = [len(adj[p]) for p in range(N)]
    while True:
        sig = [(color[p], tuple(sorted(color[q] for q in adj[p])))
               for p in range(N)]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [rank[s] for s in sig]
        if new == color:
            break
        color = new
    order = sorted(range(N), key=lambda p: (color[p], p))
    img = [-1] * N
    used = [False] * N
    found: list[tuple[int, ...]] = []

    def extend(i: int) -> bool:
        if i == N:
            if len(found) >= cap:
                return False
            found.append(tuple(img))
            return True
        p = order[i]
        for t in range(N):
            if used[t] or color[t] != color[p]:
                continue
            if any((order[j] in adj[p]) != (img[order[j]] in adj[t])
                   for j in range(i)):
                continue
            img[p] = t
            used[t] = True
            ok = extend(i + 1)
            used[t] = False
            img[p] = -1
            if not ok:
                return False
        return True

    if not extend(0):
        return None
    return sorted(found)


def incident_edges(device: Device, node: int) -> tuple[int, ...]:
    """Edge indices touching the node, ascending."""
    if not (0 <= node < device.num_physical):
        raise DeviceError(f"node {node} out of range")
    return device.incident[node]


def scaled_log_fidelity(f: float) -> int:
    """round(1000 * ln f) with ties away from zero."""
    if f <= 0.0:
        raise DeviceError(f"fidelity {f!r} must be positive")
    x = 1000.0 * math.log(f)
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def swap_log_fidelity(device: Device, edge: int) -> int:
    """A SWAP costs three two-qubit gates on its edge: 3 * scaled log f2."""
    return 3 * scaled_log_fidelity(device.f_two[edge])
