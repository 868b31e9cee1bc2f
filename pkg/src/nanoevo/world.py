"""2D grid world: cell placement, nano-agent movement, perception, FIFO memory.

Cells occupy at most one per site; nano-agents may share sites with each other
and with cells. Dead cells leave the grid immediately, so occupancy always
means a living cell.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .kinetics import CellKind, NAState, NanoAgentGenome, ResistanceModifier

Position = tuple[int, int]

MOORE_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class VisibleSignature:
    """Fixed-length bit vector by which nano-agents recognize cells."""
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("signature bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "VisibleSignature":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=length)))

    def flipped(self, flip_prob: float, rng: np.random.Generator) -> "VisibleSignature":
        """Copy with each bit flipped independently with probability flip_prob."""
        draws = rng.random(len(self.bits))
        return VisibleSignature(tuple(b ^ 1 if u < flip_prob else b
                                      for b, u in zip(self.bits, draws)))

    def hamming(self, other: "VisibleSignature") -> int:
        return sum(a != b for a, b in zip(self.bits, other.bits))


@dataclass
class CellAgent:
    id: int
    kind: CellKind
    signature: VisibleSignature
    position: Position
    resistance: ResistanceModifier | None = None
    alive: bool = True

    def __post_init__(self) -> None:
        if self.kind is CellKind.HC and self.resistance is not None:
            raise ValueError("healthy cells never carry a resistance modifier")


@dataclass
class NanoAgent:
    id: int
    genome: NanoAgentGenome
    position: Position
    memory: deque  # deque[VisibleSignature] with maxlen = memory capacity
    state: NAState = NAState.FREE
    target_id: int | None = None
    cc_killed: int = 0
    hc_killed: int = 0


class GridWorld:
    """Lattice of cells plus the nano-agent population and the run's RNG."""

    def __init__(self, cfg: SimConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.width = cfg.world.width
        self.height = cfg.world.height
        self.rng = rng
        self.step_index = 0
        self.cells_by_pos: dict[Position, CellAgent] = {}
        self.cells_by_id: dict[int, CellAgent] = {}
        self.agents: list[NanoAgent] = []
        self._next_cell_id = 0
        self._next_agent_id = 0

    # -- id allocation ---------------------------------------------------
    def next_cell_id(self) -> int:
        cid = self._next_cell_id
        self._next_cell_id += 1
        return cid

    def next_agent_id(self) -> int:
        aid = self._next_agent_id
        self._next_agent_id += 1
        return aid

    # -- geometry --------------------------------------------------------
    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos[0] < self.height and 0 <= pos[1] < self.width

    def moore_neighbors(self, pos: Position) -> list[Position]:
        r, c = pos
        return [(r + dr, c + dc) for dr, dc in MOORE_OFFSETS
                if self.in_bounds((r + dr, c + dc))]

    def empty_neighbors(self, pos: Position) -> list[Position]:
        return [p for p in self.moore_neighbors(pos) if p not in self.cells_by_pos]

    # -- cells -----------------------------------------------------------
    def place_cell(self, cell: CellAgent) -> None:
        if cell.position in self.cells_by_pos:
            raise ValueError(f"site {cell.position} already holds a cell")
        if not self.in_bounds(cell.position):
            raise ValueError(f"position {cell.position} outside the grid")
        self.cells_by_pos[cell.position] = cell
        self.cells_by_id[cell.id] = cell

    def remove_cell(self, cell: CellAgent) -> None:
        """Drop a dead cell from the occupancy map (it stays in cells_by_id)."""
        occupant = self.cells_by_pos.get(cell.position)
        if occupant is cell:
            del self.cells_by_pos[cell.position]

    def cell_at(self, pos: Position) -> CellAgent | None:
        cell = self.cells_by_pos.get(pos)
        if cell is not None and cell.alive:
            return cell
        return None

    def living_cells(self, kind: CellKind | None = None) -> list[CellAgent]:
        cells = (c for c in self.cells_by_pos.values() if c.alive)
        if kind is not None:
            cells = (c for c in cells if c.kind is kind)
        return sorted(cells, key=lambda c: c.id)

    def count_alive(self, kind: CellKind) -> int:
        return sum(1 for c in self.cells_by_pos.values() if c.alive and c.kind is kind)

    # -- agents ----------------------------------------------------------
    def spawn_agent(self, genome: NanoAgentGenome, position: Position) -> NanoAgent:
        agent = NanoAgent(
            id=self.next_agent_id(),
            genome=genome,
            position=position,
            memory=deque(maxlen=self.cfg.world.memory_capacity),
        )
        self.agents.append(agent)
        return agent


def _clustered_sites(cfg: SimConfig) -> list[Position]:
    """All grid sites sorted by distance from the centre (row/col tie-break)."""
    h, w = cfg.world.height, cfg.world.width
    cr, cc = (h - 1) / 2.0, (w - 1) / 2.0
    sites = [(r, c) for r in range(h) for c in range(w)]
    sites.sort(key=lambda p: ((p[0] - cr) ** 2 + (p[1] - cc) ** 2, p[0], p[1]))
    return sites


def init_world(cfg: SimConfig, seed: int, populate_agents: bool = True) -> GridWorld:
    """Build the initial world: CC cluster, HC band, resistance, nano-agents.

    Identical (config, seed) pairs produce identical worlds.
    """
    from .evolution import assign_resistance  # local import avoids a module cycle

    cfg.validate()
    rng = np.random.default_rng(seed)
    world = GridWorld(cfg, rng)
    w_cfg = cfg.world

    if w_cfg.placement == "clustered":
        ordered = _clustered_sites(cfg)
    else:
        ordered = [(r, c) for r in range(w_cfg.height) for c in range(w_cfg.width)]
        perm = rng.permutation(len(ordered))
        ordered = [ordered[i] for i in perm]
    cc_sites = ordered[:w_cfg.n_cc]
    hc_sites = ordered[w_cfg.n_cc:w_cfg.n_cc + w_cfg.n_hc]

    if w_cfg.signature_init == "per_kind":
        cc_sig = VisibleSignature.random(w_cfg.signature_length, rng)
        hc_sig = cc_sig
        while hc_sig == cc_sig:
            hc_sig = VisibleSignature.random(w_cfg.signature_length, rng)
        sig_for = lambda kind: cc_sig if kind is CellKind.CC else hc_sig
    else:
        sig_for = lambda kind: VisibleSignature.random(w_cfg.signature_length, rng)

    for pos in cc_sites:
        world.place_cell(CellAgent(world.next_cell_id(), CellKind.CC,
                                   sig_for(CellKind.CC), pos))
    for pos in hc_sites:
        world.place_cell(CellAgent(world.next_cell_id(), CellKind.HC,
                                   sig_for(CellKind.HC), pos))

    assign_resistance(world.living_cells(CellKind.CC), cfg.evolution, rng)

    if populate_agents:
        for _ in range(w_cfg.n_agents):
            pos = (int(rng.integers(w_cfg.height)), int(rng.integers(w_cfg.width)))
            world.spawn_agent(NanoAgentGenome.random(rng, cfg.kinetics.speed_max,
                                                     cfg.kinetics.init_prob_max), pos)
    return world


def move_agent(world: GridWorld, agent: NanoAgent) -> Position:
    """Random walk of up to genome.speed Moore hops, stopping on a living cell."""
    if agent.state is not NAState.FREE:
        raise ValueError("only free agents move")
    for _ in range(agent.genome.speed):
        neighbors = world.moore_neighbors(agent.position)
        agent.position = neighbors[int(world.rng.integers(len(neighbors)))]
        if world.cell_at(agent.position) is not None:
            break
    return agent.position


def perceive(world: GridWorld, agent: NanoAgent) -> CellAgent | None:
    """The living cell sharing the agent's site, if any."""
    return world.cell_at(agent.position)


def is_familiar(agent: NanoAgent, sig: VisibleSignature) -> bool:
    return sig in agent.memory


def memorize(agent: NanoAgent, sig: VisibleSignature) -> None:
    """Append a new signature; the deque evicts the oldest entry when full."""
    if sig in agent.memory:
        raise ValueError("signature already memorized; caller must skip")
    agent.memory.append(sig)
