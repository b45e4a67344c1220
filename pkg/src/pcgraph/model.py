"""Communication-volume model used to pick a scatter mode per partition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

SC = 0
PC = 1
MODE_NAMES = {SC: "sc", PC: "pc"}

INDEX_BYTES = 4
DEFAULT_BW_RATIO = 2.0


@dataclass(frozen=True)
class ModeInputs:
    active_vertices: int
    active_edges: int
    edges: int
    ratio: float
    sum_pdeg: int
    k: int
    index_bytes: int = INDEX_BYTES
    value_bytes: int = 4
    bw_ratio: float = DEFAULT_BW_RATIO
    # exact number of source-centric messages; None uses ratio * active_edges
    exact_messages: Optional[int] = None


def sc_volume(m: ModeInputs) -> float:
    """Bytes moved by a source-centric scatter and its gather."""
    msgs = m.ratio * m.active_edges if m.exact_messages is None else m.exact_messages
    return (2 * msgs * m.value_bytes + 3 * m.active_edges * m.index_bytes
            + m.active_vertices * m.index_bytes)


def pc_volume(m: ModeInputs) -> float:
    """Bytes moved by a partition-centric scatter and its gather."""
    r = m.ratio
    return m.edges * ((r + 1) * m.index_bytes + 2 * r * m.value_bytes) + m.k * m.index_bytes


def select_mode(m: ModeInputs) -> int:
    if m.active_vertices == 0:
        return SC
    return PC if pc_volume(m) <= m.bw_ratio * sc_volume(m) else SC
