"""Branch-and-bound search for large t-wFP codes.

Codes are built in canonical form: words strictly ascending, the first word
all zeros, and in every position a new word uses at most one symbol beyond
the largest symbol already seen there. Any code can be relabelled position by
position into this form, so nothing is lost by restricting the branching to it.

For t = 2 a candidate word is accepted by the incremental coincidence-family
test (every family stays a non 2-covering Sperner family); for other t the
definitional check is run on every extension.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

import config
from codes import Code, Word, agreement_mask, extension_is_frameproof, is_2wfp_structural, is_twfp_direct
from config import SCHEMA_VERSION
from oracles import split_budget
from setfam import full_mask

logger = logging.getLogger(__name__)

MAX_LENGTH = 20
MAX_ALPHABET = 8
# above this many words the candidate lists are no longer materialized
MATERIALIZE_LIMIT = 1 << 16
WARM_START_ATTEMPTS = 4096


class SearchParameterError(ValueError):
    """Invalid search parameters"""


class SearchStatus(str, Enum):
    OPTIMAL = "optimal"
    BUDGET_EXHAUSTED = "budget_exhausted"


class SearchResult(BaseModel):
    schema_version: str = SCHEMA_VERSION
    n: int
    q: int
    t: int
    budget: int
    best_code: Code
    size: int
    status: SearchStatus
    nodes_explored: int
    seed: int
    wall_time: float


class _BudgetExhausted(Exception):
    pass


class _PartialCode:
    """Words plus their pairwise coincidence masks, grown one word at a time"""

    def __init__(self, n: int, t: int, words: Sequence[Word] = ()):
        self.n = n
        self.t = t
        self.full = full_mask(n)
        self.words: List[Word] = []
        self.rows: List[List[int]] = []
        for word in words:
            self.push(word)

    def masks_against(self, word: Word) -> List[int]:
        return [agreement_mask(other, word) for other in self.words]

    def accepts(self, word: Word) -> bool:
        if self.t != 2:
            return extension_is_frameproof(self.words, word, self.n, self.t)
        new = self.masks_against(word)
        full = self.full
        # the new word's own family
        for a_idx in range(len(new)):
            a = new[a_idx]
            for b_idx in range(a_idx + 1, len(new)):
                b = new[b_idx]
                both = a & b
                if both == a or both == b or a | b == full:
                    return False
        # the new member I(i, w) of every existing family
        for i, row in enumerate(self.rows):
            a = new[i]
            for j, b in enumerate(row):
                if j == i:
                    continue
                both = a & b
                if both == a or both == b or a | b == full:
                    return False
        return True

    def push(self, word: Word) -> None:
        new = self.masks_against(word)
        for row, mask in zip(self.rows, new):
            row.append(mask)
        self.rows.append(new + [0])
        self.words.append(word)

    def pop(self) -> None:
        self.words.pop()
        self.rows.pop()
        for row in self.rows:
            row.pop()

    def column_limits(self) -> List[int]:
        """Largest symbol allowed per position for the next word"""
        return [max(word[p] for word in self.words) + 1 for p in range(self.n)]


def _canonical(word: Word, limits: Sequence[int]) -> bool:
    return all(symbol <= limit for symbol, limit in zip(word, limits))


def _words_above(last: Word, limits: Sequence[int], q: int) -> Iterator[Word]:
    """Words greater than last in lexicographic order with symbols within limits, ascending"""
    n = len(last)
    caps = [min(limit, q - 1) for limit in limits]

    def fill(prefix: List[int], position: int, tight: bool) -> Iterator[Word]:
        if position == n:
            if not tight:
                yield tuple(prefix)
            return
        low = last[position] if tight else 0
        for symbol in range(low, caps[position] + 1):
            prefix.append(symbol)
            yield from fill(prefix, position + 1, tight and symbol == last[position])
            prefix.pop()

    yield from fill([], 0, True)


class _Branch:
    """Depth-first search below one fixed second word"""

    def __init__(self, n: int, q: int, t: int, share: int, incumbent: Tuple[Word, ...]):
        self.n, self.q, self.t = n, q, t
        self.share = share
        self.best = incumbent
        self.nodes = 0

    def _visit(self, partial: _PartialCode) -> None:
        self.nodes += 1
        if self.nodes > self.share:
            raise _BudgetExhausted()
        if len(partial.words) > len(self.best):
            self.best = tuple(partial.words)

    def explore(self, partial: _PartialCode, candidates: List[Word]) -> None:
        self._visit(partial)
        if len(partial.words) + len(candidates) <= len(self.best):
            return
        limits = partial.column_limits()
        for index, word in enumerate(candidates):
            if len(partial.words) + len(candidates) - index <= len(self.best):
                return
            if not _canonical(word, limits):
                continue
            partial.push(word)
            narrowed = [w for w in candidates[index + 1:] if partial.accepts(w)]
            self.explore(partial, narrowed)
            partial.pop()

    def explore_lazily(self, partial: _PartialCode) -> None:
        self._visit(partial)
        limits = partial.column_limits()
        for word in _words_above(partial.words[-1], limits, self.q):
            if partial.accepts(word):
                partial.push(word)
                self.explore_lazily(partial)
                partial.pop()


def _second_words(n: int) -> List[Word]:
    return [word for word in product((0, 1), repeat=n) if any(word)]


def _explore_branches(task) -> List[Tuple[Tuple[Word, ...], int, bool]]:
    n, q, t, first, shares, incumbent = task
    zero = (0,) * n
    seconds = _second_words(n)
    materialized = q ** n <= MATERIALIZE_LIMIT
    everything = [w for w in product(range(q), repeat=n)] if materialized else []
    outcomes = []
    for offset, share in enumerate(shares):
        if share == 0:
            outcomes.append((incumbent, 0, False))
            continue
        second = seconds[first + offset]
        branch = _Branch(n, q, t, share, incumbent)
        partial = _PartialCode(n, t, [zero, second])
        try:
            if materialized:
                candidates = [w for w in everything if w > second and partial.accepts(w)]
                branch.explore(partial, candidates)
            else:
                branch.explore_lazily(partial)
            completed = True
        except _BudgetExhausted:
            completed = False
        outcomes.append((branch.best, branch.nodes, completed))
    return outcomes


def warm_start(n: int, q: int, t: int, seed: int) -> Tuple[Word, ...]:
    """Seeded random greedy code, used as the initial incumbent; words sorted"""
    rng = np.random.default_rng(seed)
    partial = _PartialCode(n, t, [(0,) * n])
    if q ** n <= MATERIALIZE_LIMIT:
        order = rng.permutation(q ** n)[:WARM_START_ATTEMPTS]
        draws = [tuple(int(d) for d in np.unravel_index(int(index), (q,) * n)) for index in order]
    else:
        draws = [tuple(int(s) for s in row) for row in rng.integers(0, q, size=(WARM_START_ATTEMPTS, n))]
    seen = set(partial.words)
    for word in draws:
        if word not in seen and partial.accepts(word):
            partial.push(word)
            seen.add(word)
    return tuple(sorted(partial.words))


def _better(candidate: Tuple[Word, ...], incumbent: Tuple[Word, ...]) -> bool:
    if len(candidate) != len(incumbent):
        return len(candidate) > len(incumbent)
    return tuple(sorted(candidate)) < tuple(sorted(incumbent))


def search_max_code(n: int, q: int, t: int = 2, budget: Optional[int] = None, seed: int = 0,
                    workers: Optional[int] = None) -> SearchResult:
    """Largest t-wFP code found within budget search nodes.

    The budget is split over the top-level branches (the second word) and
    every branch starts from the same warm-start incumbent, so the result is
    identical for every worker count. status is optimal only when every
    branch ran to completion within its share.
    """
    if not 1 <= n <= MAX_LENGTH:
        raise SearchParameterError(f"n must be in 1..{MAX_LENGTH}, got {n}")
    if not 2 <= q <= MAX_ALPHABET:
        raise SearchParameterError(f"q must be in 2..{MAX_ALPHABET}, got {q}")
    if t < 1:
        raise SearchParameterError(f"t must be at least 1, got {t}")
    if budget is None:
        budget = config.get_search_budget()
    if budget < 1:
        raise SearchParameterError(f"budget must be at least 1, got {budget}")
    if workers is None:
        workers = config.get_thread_count()
    if workers < 1:
        raise SearchParameterError(f"workers must be at least 1, got {workers}")

    started = time.perf_counter()
    logger.info(f"Searching ({n}, m, {q}) {t}-wFP codes: budget {budget}, seed {seed}, workers {workers}")
    incumbent = warm_start(n, q, t, seed)
    seconds = _second_words(n)
    shares = split_budget(budget, len(seconds)) if seconds else []

    if workers > 1 and len(seconds) > 1:
        chunk = -(-len(seconds) // workers)
        tasks = [(n, q, t, first, shares[first:first + chunk], incumbent)
                 for first in range(0, len(seconds), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = [item for part in executor.map(_explore_branches, tasks) for item in part]
    elif seconds:
        outcomes = _explore_branches((n, q, t, 0, shares, incumbent))
    else:
        outcomes = []

    best = incumbent
    nodes = 0
    completed = True
    for words, branch_nodes, branch_completed in outcomes:
        nodes += branch_nodes
        completed = completed and branch_completed
        if _better(words, best):
            best = words
    status = SearchStatus.OPTIMAL if completed else SearchStatus.BUDGET_EXHAUSTED
    if not completed:
        logger.warning(f"Search stopped at budget {budget}; best size {len(best)} is a lower bound")

    code = Code(n=n, q=q, words=tuple(sorted(best)))
    verdict = is_2wfp_structural(code) if t == 2 else is_twfp_direct(code, t)
    if not verdict.ok:
        logger.error(f"Search produced a code that fails verification: {verdict}")
        raise RuntimeError(f"search produced a code that is not {t}-frameproof")

    wall_time = time.perf_counter() - started
    logger.info(f"Search finished: size {code.m}, {status.value}, {nodes} nodes, {wall_time:.2f}s")
    return SearchResult(n=n, q=q, t=t, budget=budget, best_code=code, size=code.m, status=status,
                        nodes_explored=nodes, seed=seed, wall_time=wall_time)
