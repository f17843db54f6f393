"""Fingerprinting-code model: words, descendant sets, coincidence families
and the wide-sense frameproof verifiers.

Words and positions are 1-indexed in every public argument and report;
storage is 0-indexed.
"""
import logging
from enum import Enum
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import SCHEMA_VERSION
from setfam import (
    Family,
    Subset,
    cross_k_intersecting_masks,
    full_mask,
    k_intersecting_masks,
    non_2_covering_masks,
    popcount,
    sperner_masks,
)

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]


class CodeError(ValueError):
    """Invalid argument to a code operation"""


class Code(BaseModel):
    """An (n, m, q) code: m pairwise distinct words of length n over {0..q-1}"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1, le=64)
    q: int = Field(ge=2, le=256)
    words: Tuple[Word, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_words(self) -> "Code":
        seen = set()
        for index, word in enumerate(self.words, start=1):
            if len(word) != self.n:
                raise ValueError(f"word {index} has length {len(word)}, expected {self.n}")
            for symbol in word:
                if not 0 <= symbol < self.q:
                    raise ValueError(f"word {index} uses symbol {symbol} outside 0..{self.q - 1}")
            if word in seen:
                raise ValueError(f"word {index} repeats an earlier word")
            seen.add(word)
        return self

    @classmethod
    def from_strings(cls, words: Iterable[str], q: int = 2) -> "Code":
        """Build from digit strings such as "0110" (single-digit symbols only)"""
        parsed = tuple(tuple(int(ch) for ch in w) for w in words)
        if not parsed:
            raise CodeError("a code needs at least one word")
        return cls(n=len(parsed[0]), q=q, words=parsed)

    @property
    def m(self) -> int:
        return len(self.words)

    def subcode(self, indices: Iterable[int]) -> "Code":
        """Code formed by the given 1-indexed words, in the order given"""
        return Code(n=self.n, q=self.q, words=tuple(self.words[i - 1] for i in indices))


class ProofCase(str, Enum):
    """Which branch of the improved-bound case analysis a coincidence family falls into"""
    NOT_FRAMEPROOF = "not-frameproof"
    EVEN_LARGE_TOP = "even:large-top"
    EVEN_SMALL_BOTTOM = "even:small-bottom"
    EVEN_MIDDLE_LAYER = "even:middle-layer"
    EVEN_CASE_1 = "even:case-1"
    EVEN_CASE_2 = "even:case-2"
    ODD_ALL_SMALL = "odd:all-small"
    ODD_ALL_LARGE = "odd:all-large"
    ODD_WIDE_SPREAD = "odd:wide-spread"
    ODD_CASE_1 = "odd:case-1"
    ODD_CASE_2 = "odd:case-2"
    ODD_CASE_3 = "odd:case-3"


class CoincidenceProfile(BaseModel):
    index: int
    family: Family
    l: int
    u: int
    d: int
    is_sperner: bool
    is_non_2_covering: bool
    # odd n only
    a2_intersecting: Optional[bool] = None
    a1_b_cross_intersecting: Optional[bool] = None
    all_small: Optional[bool] = None
    all_large: Optional[bool] = None
    # even n only
    b_intersecting: Optional[bool] = None
    a_b_cross_intersecting: Optional[bool] = None
    case: ProofCase


class CodeAnalysis(BaseModel):
    schema_version: str = SCHEMA_VERSION
    n: int
    q: int
    m: int
    frameproof: bool
    d: int
    pivot: int
    profiles: List[CoincidenceProfile]


class DirectVerdict(BaseModel):
    """Outcome of a definitional t-frameproof check"""
    ok: bool
    t: int
    sense: str = "wide"
    coalition: Optional[Tuple[int, ...]] = None
    framed: Optional[int] = None


class ViolationReason(str, Enum):
    NOT_SPERNER = "not-sperner"
    COVERING = "covering"


class StructuralViolation(BaseModel):
    index: int
    reason: ViolationReason
    j: int
    k: int


class StructuralVerdict(BaseModel):
    """Outcome of the coincidence-family check.

    The canonical witness is the least i whose family is 2-covering, or the
    least i whose family is not Sperner when every family is non 2-covering.
    violations lists the least offending pair (j, k) for every (i, reason)
    that fails, ordered by i.
    """
    ok: bool
    index: Optional[int] = None
    reason: Optional[ViolationReason] = None
    violations: List[StructuralViolation] = []


# ---------------------------------------------------------------------------
# Coincidence sets
# ---------------------------------------------------------------------------

def agreement_mask(a: Sequence[int], b: Sequence[int]) -> int:
    mask = 0
    for p, (x, y) in enumerate(zip(a, b)):
        if x == y:
            mask |= 1 << p
    return mask


def build_coincidence_matrix(words: Sequence[Word]) -> Tuple[Tuple[int, ...], ...]:
    m = len(words)
    rows = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            mask = agreement_mask(words[i], words[j])
            rows[i][j] = mask
            rows[j][i] = mask
    return tuple(tuple(row) for row in rows)


@lru_cache(maxsize=512)
def _coincidence_matrix(words: Tuple[Word, ...]) -> Tuple[Tuple[int, ...], ...]:
    return build_coincidence_matrix(words)


def coincidence_matrix(code: Code) -> Tuple[Tuple[int, ...], ...]:
    """0-indexed matrix of coincidence masks; the diagonal is unused"""
    return _coincidence_matrix(code.words)


def _check_index(code: Code, i: int) -> None:
    if not 1 <= i <= code.m:
        raise CodeError(f"word index {i} outside 1..{code.m}")


def _check_word(code: Code, y: Sequence[int]) -> Word:
    word = tuple(y)
    if len(word) != code.n:
        raise CodeError(f"malformed word: length {len(word)}, expected {code.n}")
    for symbol in word:
        if not 0 <= symbol < code.q:
            raise CodeError(f"malformed word: symbol {symbol} outside 0..{code.q - 1}")
    return word


def _check_coalition(code: Code, coalition: Iterable[int]) -> List[int]:
    members = sorted(set(coalition))
    if not members:
        raise CodeError("the coalition is empty")
    for i in members:
        _check_index(code, i)
    return members


def coincidence_set(code: Code, i: int, j: int) -> Subset:
    """I(i, j): positions where words i and j agree"""
    _check_index(code, i)
    _check_index(code, j)
    if i == j:
        raise CodeError(f"coincidence set needs two different words, got i = j = {i}")
    return Subset(ground_size=code.n, bits=coincidence_matrix(code)[i - 1][j - 1])


def _family_masks(code: Code, i: int) -> Tuple[int, ...]:
    row = coincidence_matrix(code)[i - 1]
    return tuple(row[j] for j in range(code.m) if j != i - 1)


def _proof_case(n: int, profile: dict, masks: Sequence[int]) -> ProofCase:
    if not (profile["is_sperner"] and profile["is_non_2_covering"]):
        return ProofCase.NOT_FRAMEPROOF
    l, u = profile["l"], profile["u"]
    if n % 2 == 0:
        half = n // 2
        if u >= half + 1:
            return ProofCase.EVEN_LARGE_TOP
        if l <= half - 2:
            return ProofCase.EVEN_SMALL_BOTTOM
        if l == u == half:
            return ProofCase.EVEN_MIDDLE_LAYER
        if l == u == half - 1:
            return ProofCase.EVEN_CASE_1
        return ProofCase.EVEN_CASE_2
    if profile["all_small"]:
        return ProofCase.ODD_ALL_SMALL
    if profile["all_large"]:
        return ProofCase.ODD_ALL_LARGE
    if u - l >= (n + 1) // 2:
        return ProofCase.ODD_WIDE_SPREAD
    middle = [a for a in masks if popcount(a) == (n - 1) // 2]
    small = [a for a in masks if popcount(a) <= (n - 3) // 2]
    if middle and not profile["a2_intersecting"]:
        return ProofCase.ODD_CASE_1
    if small and not profile["a1_b_cross_intersecting"]:
        return ProofCase.ODD_CASE_2
    return ProofCase.ODD_CASE_3


def coincidence_family(code: Code, i: int) -> CoincidenceProfile:
    """Profile of X_i = (I(i, j))_{j != i} in j order"""
    if code.m < 2:
        raise CodeError(f"coincidence families need at least two words, got m={code.m}")
    _check_index(code, i)
    n = code.n
    masks = _family_masks(code, i)
    sizes = [popcount(a) for a in masks]
    l, u = min(sizes), max(sizes)
    profile = {
        "index": i,
        "family": Family(ground_size=n, masks=masks),
        "l": l,
        "u": u,
        "d": u - l,
        "is_sperner": sperner_masks(masks),
        "is_non_2_covering": non_2_covering_masks(masks, n),
    }
    if n % 2 == 1:
        middle = [a for a in masks if popcount(a) == (n - 1) // 2]
        small = [a for a in masks if popcount(a) <= (n - 3) // 2]
        large = [a for a in masks if popcount(a) >= (n + 1) // 2]
        profile["a2_intersecting"] = k_intersecting_masks(middle, 1)
        profile["a1_b_cross_intersecting"] = cross_k_intersecting_masks(small, large, 1)
        profile["all_small"] = u <= (n - 1) // 2
        profile["all_large"] = l >= (n + 1) // 2
    else:
        lower = [a for a in masks if popcount(a) == n // 2 - 1]
        upper = [a for a in masks if popcount(a) == n // 2]
        profile["b_intersecting"] = k_intersecting_masks(lower, 1)
        profile["a_b_cross_intersecting"] = cross_k_intersecting_masks(upper, lower, 1)
    profile["case"] = _proof_case(n, profile, masks)
    return CoincidenceProfile(**profile)


# ---------------------------------------------------------------------------
# Descendant sets
# ---------------------------------------------------------------------------

def _undetectable_mask(code: Code, members: Sequence[int]) -> int:
    """U(X) for 1-indexed members; [n] for a single word"""
    matrix = coincidence_matrix(code)
    first = members[0] - 1
    mask = full_mask(code.n)
    for other in members[1:]:
        mask &= matrix[first][other - 1]
    return mask


def undetectable_positions(code: Code, coalition: Iterable[int]) -> Subset:
    members = _check_coalition(code, coalition)
    return Subset(ground_size=code.n, bits=_undetectable_mask(code, members))


def in_wdesc(y: Sequence[int], code: Code, coalition: Iterable[int]) -> bool:
    """y agrees with the coalition's common value on every undetectable position"""
    word = _check_word(code, y)
    members = _check_coalition(code, coalition)
    undetectable = _undetectable_mask(code, members)
    return undetectable & ~agreement_mask(word, code.words[members[0] - 1]) == 0


def in_desc(y: Sequence[int], code: Code, coalition: Iterable[int]) -> bool:
    """Every coordinate of y is one of the coalition's symbols there"""
    word = _check_word(code, y)
    members = _check_coalition(code, coalition)
    for p, symbol in enumerate(word):
        if all(code.words[i - 1][p] != symbol for i in members):
            return False
    return True


def strict_containment_witness(code: Code, coalition: Iterable[int]) -> Optional[Word]:
    """A word of wdesc(X) outside desc(X), or None when wdesc(X) = desc(X)"""
    members = _check_coalition(code, coalition)
    base = list(code.words[members[0] - 1])
    undetectable = _undetectable_mask(code, members)
    for p in range(code.n):
        if undetectable >> p & 1:
            continue
        used = {code.words[i - 1][p] for i in members}
        for symbol in range(code.q):
            if symbol not in used:
                witness = base.copy()
                witness[p] = symbol
                return tuple(witness)
    return None


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------

def _coalitions_lex(m: int, t: int):
    """0-indexed coalitions of size 2..t in lexicographic order"""
    def extend(prefix: Tuple[int, ...], start: int):
        for nxt in range(start, m):
            grown = prefix + (nxt,)
            if len(grown) >= 2:
                yield grown
            if len(grown) < t:
                yield from extend(grown, nxt + 1)
    yield from extend((), 0)


def is_twfp_direct(code: Code, t: int) -> DirectVerdict:
    """wdesc(X) ∩ C = X for every coalition X with |X| ≤ t.

    The witness is the lexicographically least coalition, then the least
    framed index.
    """
    if t < 1:
        raise CodeError(f"t must be at least 1, got {t}")
    matrix = coincidence_matrix(code)
    for coalition in _coalitions_lex(code.m, t):
        first = coalition[0]
        undetectable = full_mask(code.n)
        for other in coalition[1:]:
            undetectable &= matrix[first][other]
        inside = set(coalition)
        for k in range(code.m):
            if k in inside:
                continue
            if undetectable & ~matrix[first][k] == 0:
                return DirectVerdict(ok=False, t=t,
                                     coalition=tuple(i + 1 for i in coalition), framed=k + 1)
    return DirectVerdict(ok=True, t=t)


def is_tfp_narrow(code: Code, t: int) -> DirectVerdict:
    """desc(X) ∩ C = X for every coalition X with |X| ≤ t"""
    if t < 1:
        raise CodeError(f"t must be at least 1, got {t}")
    words = code.words
    for coalition in _coalitions_lex(code.m, t):
        columns = [{words[i][p] for i in coalition} for p in range(code.n)]
        inside = set(coalition)
        for k in range(code.m):
            if k in inside:
                continue
            if all(words[k][p] in columns[p] for p in range(code.n)):
                return DirectVerdict(ok=False, t=t, sense="narrow",
                                     coalition=tuple(i + 1 for i in coalition), framed=k + 1)
    return DirectVerdict(ok=True, t=t, sense="narrow")


def _least_sperner_pair(masks: Sequence[int]) -> Optional[Tuple[int, int]]:
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            both = masks[a] & masks[b]
            if both == masks[a] or both == masks[b]:
                return a, b
    return None


def _least_covering_pair(masks: Sequence[int], n: int) -> Optional[Tuple[int, int]]:
    full = full_mask(n)
    for a in range(len(masks)):
        for b in range(a, len(masks)):
            if masks[a] | masks[b] == full:
                return a, b
    return None


def is_2wfp_structural(code: Code) -> StructuralVerdict:
    """Every coincidence family is a non 2-covering Sperner family"""
    if code.m < 2:
        return StructuralVerdict(ok=True)
    violations: List[StructuralViolation] = []
    for i in range(1, code.m + 1):
        masks = _family_masks(code, i)
        others = [j for j in range(1, code.m + 1) if j != i]
        pair = _least_sperner_pair(masks)
        if pair is not None:
            violations.append(StructuralViolation(index=i, reason=ViolationReason.NOT_SPERNER,
                                                  j=others[pair[0]], k=others[pair[1]]))
        pair = _least_covering_pair(masks, code.n)
        if pair is not None:
            violations.append(StructuralViolation(index=i, reason=ViolationReason.COVERING,
                                                  j=others[pair[0]], k=others[pair[1]]))
    if not violations:
        return StructuralVerdict(ok=True)
    covering = [v for v in violations if v.reason == ViolationReason.COVERING]
    first = covering[0] if covering else violations[0]
    return StructuralVerdict(ok=False, index=first.index, reason=first.reason, violations=violations)


def extends_frameproof(code: Code, word: Sequence[int], t: int) -> bool:
    """For a t-wFP code, whether adding word keeps it t-wFP.

    Only coalitions or targets involving the new word are examined.
    """
    candidate = _check_word(code, word)
    if candidate in code.words:
        raise CodeError("the word is already in the code")
    if t < 1:
        raise CodeError(f"t must be at least 1, got {t}")
    return extension_is_frameproof(code.words, candidate, code.n, t)


def extension_is_frameproof(words: Sequence[Word], candidate: Word, n: int, t: int) -> bool:
    """extends_frameproof on raw word tuples, without validation"""
    words = tuple(words) + (candidate,)
    new = len(words) - 1
    matrix = build_coincidence_matrix(words)
    full = full_mask(n)
    for coalition in _coalitions_lex(len(words), t):
        first = coalition[0]
        undetectable = full
        for other in coalition[1:]:
            undetectable &= matrix[first][other]
        if new in coalition:
            targets = [k for k in range(new) if k not in coalition]
        else:
            targets = [new]
        for k in targets:
            if undetectable & ~matrix[first][k] == 0:
                return False
    return True


def bh_sandwich_holds(code: Code, i: int, j: int, k: int) -> bool:
    """I(i,j) ∩ I(i,k) ⊆ I(j,k) ⊆ (I(i,j) ∩ I(i,k)) ∪ complement(I(i,j) ∪ I(i,k))"""
    for index in (i, j, k):
        _check_index(code, index)
    if len({i, j, k}) != 3:
        raise CodeError(f"the sandwich needs three distinct words, got ({i}, {j}, {k})")
    matrix = coincidence_matrix(code)
    ij, ik, jk = matrix[i - 1][j - 1], matrix[i - 1][k - 1], matrix[j - 1][k - 1]
    inner = ij & ik
    outer = inner | (full_mask(code.n) & ~(ij | ik))
    return inner & ~jk == 0 and jk & ~outer == 0


def analyze(code: Code) -> CodeAnalysis:
    """All coincidence profiles, d = min d_i and the least index attaining it"""
    if code.m < 2:
        raise CodeError(f"analysis needs at least two words, got m={code.m}")
    profiles = [coincidence_family(code, i) for i in range(1, code.m + 1)]
    d = min(p.d for p in profiles)
    pivot = next(p.index for p in profiles if p.d == d)
    frameproof = all(p.is_sperner and p.is_non_2_covering for p in profiles)
    logger.debug(f"Analyzed ({code.n},{code.m},{code.q}) code: d={d}, frameproof={frameproof}")
    return CodeAnalysis(n=code.n, q=code.q, m=code.m, frameproof=frameproof,
                        d=d, pivot=pivot, profiles=profiles)
