"""Exact maximum clique over bitset adjacency.

Vertices are 0..N-1 and adjacency[v] is a Python int whose bit w is set when
v and w are adjacent. The search is colour-bounded branch and bound: the
candidate set is greedily coloured and a branch is cut as soon as the clique
plus the colour count of what remains cannot beat the incumbent.
"""
import logging
import sys
import time
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

logger = logging.getLogger(__name__)

_RECURSION_FLOOR = 20_000


class CliqueResult(BaseModel):
    clique: List[int]
    size: int
    nodes: int
    completed: bool
    elapsed: float


class _BudgetExhausted(Exception):
    pass


def adjacency_from_matrix(matrix: np.ndarray) -> List[int]:
    """Bitset rows from a boolean adjacency matrix; the diagonal is ignored"""
    matrix = np.asarray(matrix, dtype=bool).copy()
    np.fill_diagonal(matrix, False)
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def degeneracy_order(adjacency: Sequence[int], vertices: int) -> List[int]:
    """Vertices in reverse smallest-last order (densest core first)"""
    remaining = vertices
    done = np.iinfo(np.int64).max
    degree = np.full(len(adjacency), done, dtype=np.int64)
    for v in _bits(vertices):
        degree[v] = (adjacency[v] & vertices).bit_count()
    removed = []
    while remaining:
        v = int(np.argmin(degree))
        degree[v] = done
        removed.append(v)
        remaining &= ~(1 << v)
        for w in _bits(adjacency[v] & remaining):
            degree[w] -= 1
    removed.reverse()
    return removed


def is_clique(adjacency: Sequence[int], clique: Sequence[int]) -> bool:
    for a in range(len(clique)):
        for b in range(a + 1, len(clique)):
            if not adjacency[clique[a]] >> clique[b] & 1:
                return False
    return True


class _Search:
    def __init__(self, adjacency: List[int], budget: Optional[int], incumbent: List[int]):
        self.adjacency = adjacency
        self.budget = budget
        self.best = list(incumbent)
        self.nodes = 0

    def colour_sort(self, candidates: int):
        order, colours = [], []
        colour = 0
        uncoloured = candidates
        while uncoloured:
            colour += 1
            available = uncoloured
            while available:
                low = available & -available
                v = low.bit_length() - 1
                available &= ~low & ~self.adjacency[v]
                uncoloured &= ~low
                order.append(v)
                colours.append(colour)
        return order, colours

    def expand(self, clique: List[int], candidates: int) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _BudgetExhausted()
        order, colours = self.colour_sort(candidates)
        for index in range(len(order) - 1, -1, -1):
            if len(clique) + colours[index] <= len(self.best):
                return
            v = order[index]
            clique.append(v)
            narrowed = candidates & self.adjacency[v]
            if narrowed:
                self.expand(clique, narrowed)
            elif len(clique) > len(self.best):
                self.best = list(clique)
            clique.pop()
            candidates &= ~(1 << v)


def max_clique(adjacency: Sequence[int], candidates: Optional[int] = None,
               budget: Optional[int] = None, incumbent: Sequence[int] = ()) -> CliqueResult:
    """Maximum clique inside the candidate vertex set.

    Args:
        adjacency: bitset neighbourhood of every vertex
        candidates: bitset of allowed vertices (all vertices when None)
        budget: maximum number of search nodes; None for no limit
        incumbent: a known clique; only strictly larger cliques replace it

    Returns:
        CliqueResult whose clique is sorted; completed is False when the
        budget ran out before the search space was exhausted
    """
    started = time.perf_counter()
    adjacency = list(adjacency)
    if candidates is None:
        candidates = (1 << len(adjacency)) - 1
    if sys.getrecursionlimit() < _RECURSION_FLOOR:
        sys.setrecursionlimit(_RECURSION_FLOOR)

    # relabel so that the densest core gets the lowest bits
    order = degeneracy_order(adjacency, candidates)
    position = {v: i for i, v in enumerate(order)}
    relabelled = []
    for v in order:
        row = 0
        for w in _bits(adjacency[v] & candidates):
            row |= 1 << position[w]
        relabelled.append(row)

    search = _Search(relabelled, budget, [position[v] for v in incumbent if v in position])
    completed = True
    try:
        if order:
            search.expand([], (1 << len(order)) - 1)
    except _BudgetExhausted:
        completed = False
        logger.warning(f"Clique search stopped after {budget} nodes, best size {len(search.best)}")

    clique = sorted(order[v] for v in search.best) if len(search.best) > len(incumbent) else sorted(incumbent)
    elapsed = time.perf_counter() - started
    logger.debug(f"Clique search on {len(order)} vertices: size {len(clique)}, "
                 f"{search.nodes} nodes, {elapsed:.3f}s")
    return CliqueResult(clique=clique, size=len(clique), nodes=search.nodes,
                        completed=completed, elapsed=elapsed)
