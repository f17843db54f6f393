"""Subset and set-family algebra over a ground set [n].

Subsets are n-bit characteristic vectors held in a Python int: position p
(1-indexed) is bit p-1. Families are ordered multisets of such masks, so
duplicates are kept and count against the Sperner property.
"""
import logging
from itertools import combinations
from math import comb
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

MAX_GROUND_SIZE = 64
# Anything that walks the whole power set (chain decomposition, oracles)
MAX_MATERIALIZED_SIZE = 24


class SetFamilyError(ValueError):
    """Invalid argument to a set-family operation"""


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_from_positions(positions: Iterable[int]) -> int:
    mask = 0
    for p in positions:
        mask |= 1 << (p - 1)
    return mask


def positions_of(mask: int) -> List[int]:
    """1-indexed positions set in mask, ascending"""
    result = []
    p = 1
    while mask:
        if mask & 1:
            result.append(p)
        mask >>= 1
        p += 1
    return result


def format_mask(mask: int) -> str:
    if mask == 0:
        return "∅"
    return "{" + ",".join(str(p) for p in positions_of(mask)) + "}"


def _check_ground_size(n: int, limit: int = MAX_GROUND_SIZE) -> None:
    if not 1 <= n <= limit:
        raise SetFamilyError(f"ground size must be in 1..{limit}, got {n}")


class Subset(BaseModel):
    """A subset of [n] as a characteristic bit vector"""
    model_config = ConfigDict(frozen=True)

    ground_size: int = Field(ge=1, le=MAX_GROUND_SIZE)
    bits: int = Field(ge=0)

    @model_validator(mode="after")
    def _within_ground_set(self) -> "Subset":
        if self.bits >> self.ground_size:
            raise ValueError(f"bits {self.bits:#x} set outside positions 1..{self.ground_size}")
        return self

    @classmethod
    def of(cls, n: int, positions: Iterable[int]) -> "Subset":
        positions = list(positions)
        for p in positions:
            if not 1 <= p <= n:
                raise SetFamilyError(f"position {p} outside 1..{n}")
        return cls(ground_size=n, bits=mask_from_positions(positions))

    @property
    def size(self) -> int:
        return popcount(self.bits)

    @property
    def positions(self) -> List[int]:
        return positions_of(self.bits)

    def complement(self) -> "Subset":
        return Subset(ground_size=self.ground_size, bits=full_mask(self.ground_size) & ~self.bits)

    def __str__(self) -> str:
        return format_mask(self.bits)


class Family(BaseModel):
    """An ordered multiset of subsets of a common ground set [n]"""
    model_config = ConfigDict(frozen=True)

    ground_size: int = Field(ge=1, le=MAX_GROUND_SIZE)
    masks: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _members_within_ground_set(self) -> "Family":
        for mask in self.masks:
            if mask < 0 or mask >> self.ground_size:
                raise ValueError(f"member {mask:#x} is not a subset of [{self.ground_size}]")
        return self

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        """Build from 1-indexed position lists, e.g. Family.of(3, [[1], [2, 3]])"""
        return cls(ground_size=n, masks=tuple(Subset.of(n, s).bits for s in sets))

    @classmethod
    def from_subsets(cls, n: int, subsets: Iterable[Subset]) -> "Family":
        masks = []
        for s in subsets:
            if s.ground_size != n:
                raise SetFamilyError(f"subset over [{s.ground_size}] in a family over [{n}]")
            masks.append(s.bits)
        return cls(ground_size=n, masks=tuple(masks))

    @property
    def members(self) -> List[Subset]:
        return [Subset(ground_size=self.ground_size, bits=m) for m in self.masks]

    def sizes(self) -> List[int]:
        return [popcount(m) for m in self.masks]

    def to_lists(self) -> List[List[int]]:
        return [positions_of(m) for m in self.masks]

    def __len__(self) -> int:
        return len(self.masks)

    def __str__(self) -> str:
        return "{" + ", ".join(format_mask(m) for m in self.masks) + "}"


class ChainDecomposition(BaseModel):
    """Partition of the power set of [n] into symmetric chains"""
    model_config = ConfigDict(frozen=True)

    ground_size: int
    chains: Tuple[Tuple[int, ...], ...]

    def render(self) -> List[str]:
        return [" ".join(format_mask(m) for m in chain) for chain in self.chains]


# ---------------------------------------------------------------------------
# Mask-level kernels. Codes and search call these directly on plain ints.
# ---------------------------------------------------------------------------

def sperner_masks(masks: Sequence[int]) -> bool:
    for a_idx in range(len(masks)):
        a = masks[a_idx]
        for b_idx in range(a_idx + 1, len(masks)):
            b = masks[b_idx]
            both = a & b
            if both == a or both == b:
                return False
    return True


def non_2_covering_masks(masks: Sequence[int], n: int) -> bool:
    full = full_mask(n)
    for a_idx in range(len(masks)):
        a = masks[a_idx]
        if a == full:
            return False
        for b_idx in range(a_idx + 1, len(masks)):
            if a | masks[b_idx] == full:
                return False
    return True


def k_intersecting_masks(masks: Sequence[int], k: int) -> bool:
    for a_idx in range(len(masks)):
        a = masks[a_idx]
        for b_idx in range(a_idx, len(masks)):
            if popcount(a & masks[b_idx]) < k:
                return False
    return True


def cross_k_intersecting_masks(left: Sequence[int], right: Sequence[int], k: int) -> bool:
    return all(popcount(a & b) >= k for a in left for b in right)


# ---------------------------------------------------------------------------
# Family operations
# ---------------------------------------------------------------------------

def size_extremes(family: Family) -> Tuple[int, int]:
    """Minimum and maximum member size (l, u)"""
    if not family.masks:
        raise SetFamilyError("undefined extremes: the family is empty")
    sizes = family.sizes()
    return min(sizes), max(sizes)


def is_sperner(family: Family) -> bool:
    """No member contained in a member at another index (duplicates fail)"""
    return sperner_masks(family.masks)


def is_chain(family: Family) -> bool:
    """Every pair of members comparable"""
    masks = family.masks
    for a_idx in range(len(masks)):
        for b_idx in range(a_idx + 1, len(masks)):
            both = masks[a_idx] & masks[b_idx]
            if both != masks[a_idx] and both != masks[b_idx]:
                return False
    return True


def is_non_2_covering(family: Family) -> bool:
    """A ∪ B ≠ [n] for every ordered pair, self-pairs included"""
    return non_2_covering_masks(family.masks, family.ground_size)


def is_k_intersecting(family: Family, k: int) -> bool:
    """|A ∩ B| ≥ k for every pair, self-pairs included"""
    if k < 1:
        raise SetFamilyError(f"k must be at least 1, got {k}")
    return k_intersecting_masks(family.masks, k)


def are_cross_k_intersecting(left: Family, right: Family, k: int) -> bool:
    if left.ground_size != right.ground_size:
        raise SetFamilyError(
            f"ground sizes differ: {left.ground_size} vs {right.ground_size}"
        )
    if k < 1:
        raise SetFamilyError(f"k must be at least 1, got {k}")
    return cross_k_intersecting_masks(left.masks, right.masks, k)


def shade(family: Family, r: int) -> Family:
    """All r-subsets of [n] containing some member, ascending by encoding"""
    n = family.ground_size
    if r > n:
        raise SetFamilyError(f"shade size r={r} exceeds n={n}")
    if family.masks:
        _, u = size_extremes(family)
        if r < u:
            raise SetFamilyError(f"shade size r={r} is below the largest member size {u}")
    result = set()
    for mask in family.masks:
        outside = [p for p in range(n) if not mask >> p & 1]
        for extra in combinations(outside, r - popcount(mask)):
            grown = mask
            for p in extra:
                grown |= 1 << p
            result.add(grown)
    return Family(ground_size=n, masks=tuple(sorted(result)))


def shadow(family: Family, s: int) -> Family:
    """All s-subsets contained in some member, ascending by encoding"""
    n = family.ground_size
    if s < 0:
        raise SetFamilyError(f"shadow size s={s} is negative")
    if family.masks:
        l, _ = size_extremes(family)
        if s > l:
            raise SetFamilyError(f"shadow size s={s} exceeds the smallest member size {l}")
    result = set()
    for mask in family.masks:
        inside = [p for p in range(n) if mask >> p & 1]
        for kept in combinations(inside, s):
            result.add(sum(1 << p for p in kept))
    return Family(ground_size=n, masks=tuple(sorted(result)))


def complement_family(family: Family) -> Family:
    full = full_mask(family.ground_size)
    return Family(ground_size=family.ground_size, masks=tuple(full & ~m for m in family.masks))


def layer(family: Family, k: int) -> Family:
    """Members of size exactly k, list order kept"""
    return Family(ground_size=family.ground_size,
                  masks=tuple(m for m in family.masks if popcount(m) == k))


def lower_part(family: Family, i: int) -> Family:
    """Members of size at most i"""
    return Family(ground_size=family.ground_size,
                  masks=tuple(m for m in family.masks if popcount(m) <= i))


def upper_part(family: Family, i: int) -> Family:
    """Members of size at least i"""
    return Family(ground_size=family.ground_size,
                  masks=tuple(m for m in family.masks if popcount(m) >= i))


# ---------------------------------------------------------------------------
# Symmetric chains (bracketing construction)
# ---------------------------------------------------------------------------

def _unmatched_positions(mask: int, n: int) -> Tuple[List[int], List[int]]:
    """Read mask as a bracket word, 0 = '(' and 1 = ')', and match pairs.

    Returns the 0-indexed unmatched ')' positions and unmatched '(' positions;
    every unmatched ')' lies left of every unmatched '('.
    """
    open_positions: List[int] = []
    unmatched_close: List[int] = []
    for p in range(n):
        if mask >> p & 1:
            if open_positions:
                open_positions.pop()
            else:
                unmatched_close.append(p)
        else:
            open_positions.append(p)
    return unmatched_close, open_positions


def _chain_from(mask: int, n: int) -> Tuple[int, ...]:
    closes, opens = _unmatched_positions(mask, n)
    free = closes + opens
    base = mask
    for p in closes:
        base &= ~(1 << p)
    chain = [base]
    current = base
    for p in free:
        current |= 1 << p
        chain.append(current)
    return tuple(chain)


def symmetric_chain_of(subset: Subset) -> Tuple[Subset, ...]:
    """The chain of the bracketing decomposition that contains subset"""
    n = subset.ground_size
    return tuple(Subset(ground_size=n, bits=m) for m in _chain_from(subset.bits, n))


def symmetric_chain_decomposition(n: int) -> ChainDecomposition:
    """Partition 2^[n] into C(n, ⌊n/2⌋) symmetric chains.

    A chain starts at every subset whose bracket word has no unmatched ')';
    it grows by switching the unmatched '(' positions on from left to right.
    """
    _check_ground_size(n)
    if n > MAX_MATERIALIZED_SIZE:
        raise SetFamilyError(
            f"power set materialization is capped at n={MAX_MATERIALIZED_SIZE}, got n={n}"
        )
    chains = []
    for mask in range(1 << n):
        closes, _ = _unmatched_positions(mask, n)
        if not closes:
            chains.append(_chain_from(mask, n))
    logger.debug(f"Symmetric chain decomposition of [{n}]: {len(chains)} chains")
    return ChainDecomposition(ground_size=n, chains=tuple(chains))


def chain_decomposition_problems(decomposition: ChainDecomposition) -> List[str]:
    """Invariant violations of a decomposition; empty when it is valid"""
    n = decomposition.ground_size
    problems = []
    seen = set()
    for index, chain in enumerate(decomposition.chains):
        if not chain:
            problems.append(f"chain {index} is empty")
            continue
        if popcount(chain[0]) + popcount(chain[-1]) != n:
            problems.append(f"chain {index} is not symmetric")
        for lower, upper in zip(chain, chain[1:]):
            if lower & upper != lower or popcount(upper) != popcount(lower) + 1:
                problems.append(f"chain {index} skips a rank or is not nested")
                break
        for mask in chain:
            if mask in seen:
                problems.append(f"subset {format_mask(mask)} appears in two chains")
            seen.add(mask)
    if len(seen) != 1 << n:
        problems.append(f"chains cover {len(seen)} of {1 << n} subsets")
    if len(decomposition.chains) != comb(n, n // 2):
        problems.append(f"{len(decomposition.chains)} chains, expected {comb(n, n // 2)}")
    return problems


def chain_projection(family: Family, r: int) -> Family:
    """Replace every member by the r-sized member of its symmetric chain"""
    n = family.ground_size
    projected = []
    for mask in family.masks:
        target: Optional[int] = None
        for candidate in _chain_from(mask, n):
            if popcount(candidate) == r:
                target = candidate
                break
        if target is None:
            raise SetFamilyError(
                f"the symmetric chain through {format_mask(mask)} has no member of size {r}"
            )
        projected.append(target)
    return Family(ground_size=n, masks=tuple(projected))
