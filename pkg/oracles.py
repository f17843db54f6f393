"""Brute-force reference computations that certify small-scale ground truth.

Every oracle returns an OracleCertificate. A certificate is exact only when
the whole search space was exhausted within the node budget; otherwise its
optimum is the best value found and its status is inconclusive.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from itertools import combinations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

import config
from clique import adjacency_from_matrix, max_clique
from codes import Code, Word, extension_is_frameproof, is_twfp_direct
from config import SCHEMA_VERSION
from setfam import (
    Family,
    full_mask,
    is_non_2_covering,
    is_sperner,
    popcount,
    size_extremes,
    sperner_masks,
)

logger = logging.getLogger(__name__)

MAX_CODE_SPACE = 1 << 20
MAX_NON2COV_LENGTH = 12
MAX_SPERNER_LENGTH = 6
MAX_RANDOM_FAMILY_LENGTH = 16


class OracleRangeError(ValueError):
    """Instance outside the range an oracle accepts"""


class CertificateKind(str, Enum):
    MAX_CODE = "max-code"
    MAX_NON2COV_SPERNER = "max-non2cov-sperner"
    MAX_SPERNER = "max-sperner"
    MAX_SPERNER_EXTREMES = "max-sperner-extremes"


class CertificateStatus(str, Enum):
    EXACT = "exact"
    INCONCLUSIVE = "inconclusive"


class OracleCertificate(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: CertificateKind
    n: int
    q: Optional[int] = None
    t: Optional[int] = None
    l: Optional[int] = None
    u: Optional[int] = None
    optimum: int
    status: CertificateStatus
    witness_code: Optional[Code] = None
    witness_family: Optional[Family] = None
    search_space_size: int
    nodes_explored: int
    budget: Optional[int] = None
    elapsed: float = 0.0


class FamilyConstraint(str, Enum):
    SPERNER = "sperner"
    INTERSECTING = "intersecting"
    NON_2_COVERING = "non-2-covering"
    NON_2_COVERING_SPERNER = "non-2-covering-sperner"


def _status(completed: bool) -> CertificateStatus:
    return CertificateStatus.EXACT if completed else CertificateStatus.INCONCLUSIVE


def split_budget(budget: int, branches: int) -> List[int]:
    """Even split, the remainder going one node each to the first branches"""
    base, extra = divmod(budget, branches)
    return [base + (1 if index < extra else 0) for index in range(branches)]


# ---------------------------------------------------------------------------
# Family oracles
# ---------------------------------------------------------------------------

def _subset_graph(n: int, vertex_count: int, non_covering: bool) -> List[int]:
    """Bitset adjacency over masks 0..vertex_count-1: incomparable (and non-covering) pairs"""
    masks = np.arange(vertex_count, dtype=np.uint16)
    rows, cols = masks[:, None], masks[None, :]
    both = rows & cols
    edges = (both != rows) & (both != cols)
    if non_covering:
        edges &= (rows | cols) != full_mask(n)
    return adjacency_from_matrix(edges)


def _check_family_witness(family: Family, non_covering: bool) -> None:
    ok = is_sperner(family) and (not non_covering or is_non_2_covering(family))
    if not ok:
        logger.error(f"Oracle witness {family} fails its defining predicate")
        raise RuntimeError(f"oracle witness {family} fails its defining predicate")


def max_non2cov_sperner(n: int, budget: Optional[int] = None) -> OracleCertificate:
    """Largest non 2-covering Sperner family on [n] by maximum clique search"""
    if not 1 <= n <= MAX_NON2COV_LENGTH:
        raise OracleRangeError(f"oracle out of range: max_non2cov_sperner needs 1 ≤ n ≤ {MAX_NON2COV_LENGTH}, got n={n}")
    if budget is None:
        budget = config.get_oracle_budget()
    started = time.perf_counter()
    logger.info(f"Searching the largest non 2-covering Sperner family for n={n} (budget {budget})")

    vertex_count = (1 << n) - 1
    adjacency = _subset_graph(n, vertex_count, non_covering=True)
    # every ⌊(n-1)/2⌋-set pair is incomparable and misses at least one point
    warm = [mask for mask in range(vertex_count) if popcount(mask) == (n - 1) // 2]
    result = max_clique(adjacency, budget=budget, incumbent=warm)

    witness = Family(ground_size=n, masks=tuple(result.clique))
    _check_family_witness(witness, non_covering=True)
    elapsed = time.perf_counter() - started
    logger.info(f"max_non2cov_sperner({n}) = {result.size} ({_status(result.completed).value}, "
                f"{result.nodes} nodes, {elapsed:.2f}s)")
    return OracleCertificate(
        kind=CertificateKind.MAX_NON2COV_SPERNER,
        n=n,
        optimum=result.size,
        status=_status(result.completed),
        witness_family=witness,
        search_space_size=vertex_count,
        nodes_explored=result.nodes,
        budget=budget,
        elapsed=elapsed,
    )


def max_sperner_family(n: int, budget: Optional[int] = None) -> OracleCertificate:
    """Largest antichain in the power set of [n]"""
    if not 1 <= n <= MAX_SPERNER_LENGTH:
        raise OracleRangeError(f"oracle out of range: max_sperner_family needs 1 ≤ n ≤ {MAX_SPERNER_LENGTH}, got n={n}")
    if budget is None:
        budget = config.get_oracle_budget()
    started = time.perf_counter()
    vertex_count = 1 << n
    result = max_clique(_subset_graph(n, vertex_count, non_covering=False), budget=budget)
    witness = Family(ground_size=n, masks=tuple(result.clique))
    _check_family_witness(witness, non_covering=False)
    return OracleCertificate(
        kind=CertificateKind.MAX_SPERNER,
        n=n,
        optimum=result.size,
        status=_status(result.completed),
        witness_family=witness,
        search_space_size=vertex_count,
        nodes_explored=result.nodes,
        budget=budget,
        elapsed=time.perf_counter() - started,
    )


def max_sperner_with_extremes(n: int, l: int, u: int, budget: Optional[int] = None) -> OracleCertificate:
    """Largest Sperner family on [n] whose smallest member has size l and largest size u.

    Up to relabelling the ground set, the l-sized member is {1..l}; the search
    then tries every u-set beside it and completes the pair by a maximum clique.
    An optimum of 0 means no such family exists.
    """
    if not 1 <= n <= MAX_SPERNER_LENGTH:
        raise OracleRangeError(f"oracle out of range: max_sperner_with_extremes needs 1 ≤ n ≤ {MAX_SPERNER_LENGTH}, got n={n}")
    if not 0 <= l <= u <= n:
        raise OracleRangeError(f"oracle out of range: needs 0 ≤ l ≤ u ≤ n, got l={l}, u={u}")
    if budget is None:
        budget = config.get_oracle_budget()
    started = time.perf_counter()

    def certificate(optimum: int, masks: Sequence[int], nodes: int, completed: bool) -> OracleCertificate:
        witness = Family(ground_size=n, masks=tuple(masks))
        if masks:
            _check_family_witness(witness, non_covering=False)
            if size_extremes(witness) != (l, u):
                raise RuntimeError(f"oracle witness {witness} has the wrong size extremes")
        return OracleCertificate(
            kind=CertificateKind.MAX_SPERNER_EXTREMES, n=n, l=l, u=u, optimum=optimum,
            status=_status(completed), witness_family=witness, search_space_size=1 << n,
            nodes_explored=nodes, budget=budget, elapsed=time.perf_counter() - started,
        )

    if l == u:
        layer = [mask for mask in range(1 << n) if popcount(mask) == l]
        return certificate(len(layer), layer, 0, True)

    adjacency = _subset_graph(n, 1 << n, non_covering=False)
    anchor = full_mask(l)
    best: List[int] = []
    nodes = 0
    completed = True
    for top in combinations(range(n), u):
        top_mask = sum(1 << p for p in top)
        if anchor & top_mask == anchor:
            continue
        between = 0
        for mask in range(1 << n):
            if l <= popcount(mask) <= u and mask not in (anchor, top_mask):
                between |= 1 << mask
        between &= adjacency[anchor] & adjacency[top_mask]
        remaining = budget - nodes
        if remaining <= 0:
            completed = False
            break
        result = max_clique(adjacency, candidates=between, budget=remaining)
        nodes += result.nodes
        if not result.completed:
            completed = False
        if not best or result.size + 2 > len(best):
            best = sorted([anchor, top_mask] + result.clique)
        if not completed:
            break
    return certificate(len(best), best, nodes, completed)


# ---------------------------------------------------------------------------
# Code oracle
# ---------------------------------------------------------------------------

class _BranchBudgetExhausted(Exception):
    pass


class _CodeBranch:
    """Ordered backtracking below one fixed second word"""

    def __init__(self, n: int, q: int, t: int, share: int, incumbent: Tuple[Word, ...]):
        self.n, self.q, self.t = n, q, t
        self.share = share
        self.best = incumbent
        self.nodes = 0

    def _record(self, words: List[Word], leaf: bool) -> None:
        if len(words) <= len(self.best) and not leaf:
            return
        verdict = is_twfp_direct(Code(n=self.n, q=self.q, words=tuple(words)), self.t)
        if not verdict.ok:
            logger.error(f"Oracle node {words} fails the definitional check: {verdict}")
            raise RuntimeError(f"oracle code {words} fails the definitional {self.t}-frameproof check")
        if len(words) > len(self.best):
            self.best = tuple(words)

    def explore(self, words: List[Word], candidates: List[Word]) -> None:
        self.nodes += 1
        if self.nodes > self.share:
            raise _BranchBudgetExhausted()
        self._record(words, leaf=not candidates)
        for index, word in enumerate(candidates):
            if len(words) + len(candidates) - index <= len(self.best):
                return
            narrowed = [w for w in candidates[index + 1:]
                        if extension_is_frameproof(words + [word], w, self.n, self.t)]
            self.explore(words + [word], narrowed)


def _generation_order(n: int, symbols: Sequence[int]) -> List[Word]:
    zero = (0,) * n
    return [word for word in product(symbols, repeat=n) if word != zero]


def _explore_code_branches(task) -> List[Tuple[Tuple[Word, ...], int, bool]]:
    n, q, t, symbols, first, shares, incumbent = task
    others = _generation_order(n, symbols)
    zero = (0,) * n
    outcomes = []
    for offset, share in enumerate(shares):
        index = first + offset
        if share == 0:
            outcomes.append((incumbent, 0, False))
            continue
        second = others[index]
        branch = _CodeBranch(n, q, t, share, incumbent)
        candidates = [w for w in others[index + 1:]
                      if extension_is_frameproof((zero, second), w, n, t)]
        try:
            branch.explore([zero, second], candidates)
            completed = True
        except _BranchBudgetExhausted:
            completed = False
        outcomes.append((branch.best, branch.nodes, completed))
    return outcomes


def _greedy_code(n: int, t: int, others: Sequence[Word]) -> Tuple[Word, ...]:
    words = [(0,) * n]
    for word in others:
        if extension_is_frameproof(words, word, n, t):
            words.append(word)
    return tuple(words)


def _better(candidate: Tuple[Word, ...], incumbent: Tuple[Word, ...]) -> bool:
    if len(candidate) != len(incumbent):
        return len(candidate) > len(incumbent)
    return tuple(sorted(candidate)) < tuple(sorted(incumbent))


def exhaustive_max_code(n: int, q: int, t: int = 2, budget: Optional[int] = None,
                        workers: Optional[int] = None,
                        symbol_order: Optional[Sequence[int]] = None) -> OracleCertificate:
    """Exact maximum size of an (n, m, q) t-wFP code.

    The first word is fixed to all zeros; the remaining words are chosen as an
    increasing sequence in the lexicographic order induced by symbol_order
    (0 < 1 < ... by default). One branch per second word, each with its own
    share of the node budget, so the result does not depend on workers.
    """
    if n < 1 or q < 2 or t < 1:
        raise OracleRangeError(f"oracle out of range: needs n ≥ 1, q ≥ 2, t ≥ 1, got n={n}, q={q}, t={t}")
    space = q ** n
    if space > MAX_CODE_SPACE:
        raise OracleRangeError(f"oracle out of range: q^n = {q}^{n} exceeds 2^20")
    symbols = tuple(range(q)) if symbol_order is None else tuple(symbol_order)
    if sorted(symbols) != list(range(q)):
        raise OracleRangeError(f"symbol_order must be a permutation of 0..{q - 1}, got {list(symbols)}")
    if budget is None:
        budget = config.get_oracle_budget()
    if workers is None:
        workers = config.get_thread_count()
    started = time.perf_counter()
    logger.info(f"Exhaustive search for the largest ({n}, m, {q}) {t}-wFP code "
                f"(budget {budget}, workers {workers})")

    others = _generation_order(n, symbols)
    incumbent = _greedy_code(n, t, others)
    shares = split_budget(budget, len(others))
    if workers > 1 and len(others) > 1:
        chunk = -(-len(others) // workers)
        tasks = [(n, q, t, symbols, first, shares[first:first + chunk], incumbent)
                 for first in range(0, len(others), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = [item for part in executor.map(_explore_code_branches, tasks) for item in part]
    else:
        outcomes = _explore_code_branches((n, q, t, symbols, 0, shares, incumbent))

    best = incumbent
    nodes = 0
    completed = True
    for words, branch_nodes, branch_completed in outcomes:
        nodes += branch_nodes
        completed = completed and branch_completed
        if _better(words, best):
            best = words
    if not completed:
        logger.warning(f"Exhaustive code search hit its budget of {budget} nodes; result is a lower bound")

    witness = Code(n=n, q=q, words=tuple(sorted(best)))
    elapsed = time.perf_counter() - started
    logger.info(f"exhaustive_max_code({n}, {q}, {t}) = {witness.m} ({_status(completed).value}, "
                f"{nodes} nodes, {elapsed:.2f}s)")
    return OracleCertificate(
        kind=CertificateKind.MAX_CODE,
        n=n,
        q=q,
        t=t,
        optimum=witness.m,
        status=_status(completed),
        witness_code=witness,
        search_space_size=space,
        nodes_explored=nodes,
        budget=budget,
        elapsed=elapsed,
    )


# ---------------------------------------------------------------------------
# Seeded generators
# ---------------------------------------------------------------------------

def _decode(index: int, n: int, q: int) -> Word:
    digits = []
    for _ in range(n):
        index, digit = divmod(index, q)
        digits.append(digit)
    return tuple(reversed(digits))


def random_code(n: int, q: int, m: int, seed: int) -> Code:
    """m distinct uniformly sampled words; deterministic given seed"""
    if not (1 <= n <= 64 and 2 <= q <= 256 and m >= 1):
        raise OracleRangeError(f"random_code needs 1 ≤ n ≤ 64, 2 ≤ q ≤ 256, m ≥ 1, got n={n}, q={q}, m={m}")
    space = q ** n
    if m > space:
        raise OracleRangeError(f"random_code cannot draw m={m} distinct words from q^n={space}")
    rng = np.random.default_rng(seed)
    if space <= MAX_CODE_SPACE:
        picks = rng.choice(space, size=m, replace=False)
        words = tuple(_decode(int(index), n, q) for index in picks)
    else:
        chosen: List[Word] = []
        seen = set()
        while len(chosen) < m:
            word = tuple(int(s) for s in rng.integers(0, q, size=n))
            if word not in seen:
                seen.add(word)
                chosen.append(word)
        words = tuple(chosen)
    return Code(n=n, q=q, words=words)


def _fits(constraint: FamilyConstraint, accepted: List[int], mask: int, n: int, k: int) -> bool:
    grown = accepted + [mask]
    if constraint in (FamilyConstraint.SPERNER, FamilyConstraint.NON_2_COVERING_SPERNER):
        if not sperner_masks(grown):
            return False
    if constraint in (FamilyConstraint.NON_2_COVERING, FamilyConstraint.NON_2_COVERING_SPERNER):
        if mask == full_mask(n) or any(mask | other == full_mask(n) for other in accepted):
            return False
        if mask in accepted:
            return False
    if constraint == FamilyConstraint.INTERSECTING:
        if popcount(mask) < k or any(popcount(mask & other) < k for other in accepted):
            return False
        if mask in accepted:
            return False
    return True


def random_family(n: int, layer_sizes: Sequence[int], constraint: FamilyConstraint, seed: int,
                  max_members: Optional[int] = None, k: int = 1) -> Family:
    """Greedy random family of distinct members with sizes in layer_sizes.

    Candidates are visited in a seeded random order and kept whenever the
    family still satisfies the constraint (k-intersecting for INTERSECTING).
    """
    if not 1 <= n <= MAX_RANDOM_FAMILY_LENGTH:
        raise OracleRangeError(f"random_family needs 1 ≤ n ≤ {MAX_RANDOM_FAMILY_LENGTH}, got n={n}")
    constraint = FamilyConstraint(constraint)
    sizes = set(layer_sizes)
    pool = np.array([mask for mask in range(1 << n) if popcount(mask) in sizes], dtype=np.int64)
    rng = np.random.default_rng(seed)
    accepted: List[int] = []
    for mask in rng.permutation(pool):
        if max_members is not None and len(accepted) >= max_members:
            break
        mask = int(mask)
        if _fits(constraint, accepted, mask, n, k):
            accepted.append(mask)
    if not accepted:
        raise OracleRangeError(
            f"constraint {constraint.value} unsatisfiable for member sizes {sorted(sizes)} over [{n}]"
        )
    return Family(ground_size=n, masks=tuple(accepted))
