"""Synthesis result records and their JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class ResultError(ValueError):
    """Raised for malformed result documents."""


@dataclass(frozen=True)
class GatePlacement:
    gate_id: int
    time: int
    # Physical node index for 1-qubit gates, edge index for 2-qubit gates.
    location: int


@dataclass(frozen=True)
class SwapPlacement:
    edge: int
    finish_time: int


@dataclass(frozen=True)
class SynthesisResult:
    solver_T: int
    depth_slots: int
    swap_count: int
    fidelity_scaled: int
    initial_mapping: tuple[int, ...]
    gates: tuple[GatePlacement, ...]
    swaps: tuple[SwapPlacement, ...]
    # mapping_trajectory[t][q] = physical node of logical q at slot t.
    mapping_trajectory: tuple[tuple[int, ...], ...]
    # Coarse block count; set by the transition-based and QAOA flows only.
    depth_blocks: int | None = None

    def to_json(self) -> str:
        obj = {
            "solver_T": self.solver_T,
            "depth_slots": self.depth_slots,
            "swap_count": self.swap_count,
            "fidelity_scaled": self.fidelity_scaled,
            "initial_mapping": list(self.initial_mapping),
            "gates": [
                {"id": g.gate_id, "time": g.time, "location": g.location}
                for g in self.gates
            ],
            "swaps": [
                {"edge": s.edge, "finish_time": s.finish_time} for s in self.swaps
            ],
            "mapping_trajectory": [list(row) for row in self.mapping_trajectory],
        }
        if self.depth_blocks is not None:
            obj["depth_blocks"] = self.depth_blocks
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def result_from_json(text: str) -> SynthesisResult:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResultError(f"result JSON: {exc}") from None
    try:
        gates = tuple(
            GatePlacement(int(g["id"]), int(g["time"]), int(g["location"]))
            for g in obj["gates"]
        )
        swaps = tuple(
            SwapPlacement(int(s["edge"]), int(s["finish_time"])) for s in obj["swaps"]
        )
        return SynthesisResult(
            solver_T=int(obj["solver_T"]),
            depth_slots=int(obj["depth_slots"]),
            swap_count=int(obj["swap_count"]),
            fidelity_scaled=int(obj["fidelity_scaled"]),
            initial_mapping=tuple(int(p) for p in obj["initial_mapping"]),
            gates=gates,
            swaps=swaps,
            mapping_trajectory=tuple(
                tuple(int(p) for p in row) for row in obj["mapping_trajectory"]
            ),
            depth_blocks=int(obj["depth_blocks"]) if "depth_blocks" in obj else None,
        )
    except (KeyError, TypeError) as exc:
        raise ResultError(f"result JSON missing field: {exc}") from None


@dataclass(frozen=True)
class TransitionPlan:
    """Coarse-grain plan: gate blocks under fixed mappings, SWAPs between."""

    num_blocks: int
    gate_block: tuple[int, ...]  # per-gate coarse time
    # block_mapping[b][q] = physical node of logical q during block b.
    block_mapping: tuple[tuple[int, ...], ...]
    # (between-block index j, edges): SWAPs between block j and j+1.
    transitions: tuple[tuple[int, frozenset[int]], ...]
