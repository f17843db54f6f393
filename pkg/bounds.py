"""Closed-form upper bounds on the size of 2-wFP codes, each with provenance"""
import logging
from enum import Enum
from math import comb
from typing import List, Optional

from pydantic import BaseModel

from codes import ProofCase
from config import SCHEMA_VERSION

logger = logging.getLogger(__name__)

MAX_LENGTH = 64


class BoundError(ValueError):
    """Arguments outside the range where a formula is defined"""


class BoundMethod(str, Enum):
    STINSON_WEI = "stinson-wei"
    PANOUI = "panoui"
    IMPROVED_EVEN = "improved-even"
    IMPROVED_ODD = "improved-odd"


class BoundReport(BaseModel):
    n: int
    value: Optional[int] = None
    formula_value: int
    method: BoundMethod
    citation: str
    conditions: str
    applicable: bool


class CaseBound(BaseModel):
    """Bound on m in one branch of the improved-bound case analysis"""
    case: ProofCase
    value: int
    terms: str


class BoundRow(BaseModel):
    n: int
    stinson_wei: int
    panoui: Optional[int] = None
    panoui_formula: int
    panoui_applicable: bool
    improved: Optional[int] = None
    improved_applicable: bool
    best: int
    method: BoundMethod


class BoundTable(BaseModel):
    schema_version: str = SCHEMA_VERSION
    rows: List[BoundRow]


def _check_length(n: int) -> None:
    if not 1 <= n <= MAX_LENGTH:
        raise BoundError(f"length n={n} outside 1..{MAX_LENGTH}")


def binomial(n: int, k: int) -> int:
    """Exact C(n, k) for 0 ≤ k ≤ n ≤ 64"""
    if n < 0 or k < 0:
        raise BoundError(f"binomial({n}, {k}) needs non-negative arguments")
    if k > n:
        raise BoundError(f"binomial({n}, {k}) needs k ≤ n")
    if n > MAX_LENGTH:
        raise BoundError(f"binomial({n}, {k}) needs n ≤ {MAX_LENGTH}")
    return comb(n, k)


# ---------------------------------------------------------------------------
# Code-size bounds
# ---------------------------------------------------------------------------

def bound_stinson_wei(n: int) -> BoundReport:
    _check_length(n)
    value = binomial(n, n // 2) + 1
    return BoundReport(
        n=n,
        value=value,
        formula_value=value,
        method=BoundMethod.STINSON_WEI,
        citation="Stinson and Wei: m ≤ C(n, ⌊n/2⌋) + 1",
        conditions="all n ≥ 1; stated for q = 2, holds for every q since |X_i| = m - 1 and X_i is Sperner",
        applicable=True,
    )


def bound_panoui(n: int) -> BoundReport:
    """Panoui's bound. Flagged inapplicable for odd n ≤ 4: the (3,4,2) code
    {000,011,101,110} is 2-wFP and exceeds the n=3 formula value 2."""
    _check_length(n)
    if n % 2 == 0:
        formula = binomial(n, n // 2 - 1) + 1
    else:
        half = (n - 1) // 2
        formula = binomial(n, half) - half
    applicable = not (n % 2 == 1 and n <= 4)
    return BoundReport(
        n=n,
        value=formula if applicable else None,
        formula_value=formula,
        method=BoundMethod.PANOUI,
        citation="Panoui: m ≤ C(n, n/2 - 1) + 1 (even), C(n, (n-1)/2) - (n-1)/2 (odd)",
        conditions=("even n ≥ 2, odd n ≥ 5; no validity range is stated and the odd formula "
                    "is refuted at n = 3"),
        applicable=applicable,
    )


def bound_improved(n: int) -> BoundReport:
    _check_length(n)
    if n % 2 == 0:
        formula = binomial(n, n // 2 - 1) - n // 2 + 1
        applicable = n >= 8
        method = BoundMethod.IMPROVED_EVEN
        citation = "non 2-covering case analysis: m ≤ C(n, n/2 - 1) - n/2 + 1"
        conditions = "even n ≥ 8"
    else:
        middle = binomial(n, (n - 1) // 2)
        if n % 4 == 1:
            formula = middle - (n * n - 9) // 8 - (n - 5) ** 2 // 64
        else:
            formula = middle - ((n + 1) ** 2 - 8) // 8 - (n - 3) ** 2 // 64
        applicable = n >= 7
        method = BoundMethod.IMPROVED_ODD
        citation = ("non 2-covering case analysis: m ≤ C(n, (n-1)/2) - (n²-9)/8 - ⌊(n-5)²/64⌋ "
                    "(n ≡ 1 mod 4), C(n, (n-1)/2) - ((n+1)²-8)/8 - ⌊(n-3)²/64⌋ (n ≡ 3 mod 4)")
        conditions = "odd n ≥ 7"
    return BoundReport(
        n=n,
        value=formula if applicable else None,
        formula_value=formula,
        method=method,
        citation=citation,
        conditions=conditions,
        applicable=applicable,
    )


def best_upper_bound(n: int) -> BoundReport:
    """Least applicable bound; ties go to the improved, then Panoui, report"""
    candidates = [bound_improved(n), bound_panoui(n), bound_stinson_wei(n)]
    best = None
    for report in candidates:
        if report.applicable and (best is None or report.value < best.value):
            best = report
    return best


# ---------------------------------------------------------------------------
# Family-size bounds
# ---------------------------------------------------------------------------

def bound_milner(n: int, k: int) -> int:
    """Largest k-intersecting Sperner family on an n-set"""
    if n < 1 or k < 0:
        raise BoundError(f"bound_milner needs n ≥ 1 and k ≥ 0, got n={n}, k={k}")
    size = (n + k + 1) // 2
    if size > n:
        return 0
    return binomial(n, size)


def bound_singleton(n: int) -> int:
    """Sperner family on an n-set containing a singleton"""
    if n < 2:
        raise BoundError(f"bound_singleton needs n ≥ 2, got n={n}")
    return binomial(n - 1, (n - 1) // 2) + 1


def bound_sperner_lu(n: int, l: int, u: int) -> int:
    """Sperner family on an n-set with minimum member size l and maximum u"""
    if not (n >= 1 and 0 <= l and 2 * l <= n <= 2 * u and u <= n):
        raise BoundError(f"theorem inapplicable: needs 0 ≤ l ≤ n/2 ≤ u ≤ n, got n={n}, l={l}, u={u}")
    floor_half, ceil_half = n // 2, (n + 1) // 2
    middle = binomial(n, floor_half)
    if l == floor_half and u == ceil_half:
        value = middle
    elif l < floor_half and u > ceil_half:
        spread = u - l
        if n % 2 == 0:
            value = middle - spread * (n // 2) - (spread - 1) ** 2 // 4
        else:
            value = middle - (spread - 1) * ((n + 1) // 2) - (spread - 2) ** 2 // 4
    elif l < floor_half:
        steps = floor_half - l
        value = middle - steps * ceil_half - steps * (steps - 1) // 2
    else:
        steps = u - ceil_half
        value = middle - steps * ceil_half - steps * (steps - 1) // 2
    return max(value, 0)


def bound_non2cov_sperner(n: int, l: int, u: int) -> Optional[int]:
    """Non 2-covering Sperner family with extremes (l, u); None when no lemma covers (l, u).

    Where several even-length lemmas apply the least bound is returned.
    """
    if n % 2 == 0 and n < 6:
        raise BoundError(f"theorem inapplicable: even n must be at least 6, got n={n}")
    if n % 2 == 1 and n < 7:
        raise BoundError(f"theorem inapplicable: odd n must be at least 7, got n={n}")
    _check_length(n)
    if not 0 <= l <= u <= n:
        raise BoundError(f"theorem inapplicable: needs 0 ≤ l ≤ u ≤ n, got l={l}, u={u}")
    if n % 2 == 1:
        if l >= (n + 1) // 2:
            return bound_milner(n, 2)
        return None
    half = n // 2
    below = binomial(n, half - 1)
    found = []
    if u >= half + 1:
        found.append(below - half)
    if l <= half - 2:
        found.append(below - half - 1)
    if u == l == half:
        found.append(binomial(n, half) // 2)
    return min(found) if found else None


# ---------------------------------------------------------------------------
# Term-by-term evaluation of the improved bound
# ---------------------------------------------------------------------------

def _even_case_bounds(n: int) -> List[CaseBound]:
    half = n // 2
    singleton_branch = bound_singleton(n) + 1
    small_bottom = bound_non2cov_sperner(n, half - 2, half - 1) + 1
    disjoint_pair = max(singleton_branch, small_bottom)
    return [
        CaseBound(case=ProofCase.EVEN_LARGE_TOP, value=bound_non2cov_sperner(n, half - 1, half + 1) + 1,
                  terms="C(n, n/2-1) - n/2 + 1"),
        CaseBound(case=ProofCase.EVEN_SMALL_BOTTOM, value=small_bottom,
                  terms="C(n, n/2-1) - n/2 - 1 + 1"),
        CaseBound(case=ProofCase.EVEN_MIDDLE_LAYER, value=bound_non2cov_sperner(n, half, half) + 1,
                  terms="C(n, n/2)/2 + 1"),
        CaseBound(case=ProofCase.EVEN_CASE_1, value=max(bound_milner(n, 3) + 1, disjoint_pair),
                  terms="max(C(n, n/2+2) + 1, C(n-1, n/2-1) + 2, C(n, n/2-1) - n/2)"),
        CaseBound(case=ProofCase.EVEN_CASE_2,
                  value=max(disjoint_pair, binomial(n, half) // 2 - half + 1),
                  terms="max(C(n-1, n/2-1) + 2, C(n, n/2-1) - n/2, C(n, n/2)/2 - n/2 + 1)"),
    ]


def _odd_case_bounds(n: int) -> List[CaseBound]:
    low = (n - 3) // 2
    d0 = (n + 1) // 4 if n % 4 == 3 else (n - 1) // 4
    two_extremes = bound_milner(n, 2) + 1
    singleton_branch = bound_singleton(n) + 1
    pivot_spread = bound_sperner_lu(n, low, (n - 1) // 2 + d0) + 1
    partner_spread = bound_sperner_lu(n, low, n - d0) + 1
    return [
        CaseBound(case=ProofCase.ODD_ALL_SMALL, value=max(singleton_branch, two_extremes),
                  terms="max(C(n-1, (n-1)/2) + 2, C(n, (n+3)/2) + 1)"),
        CaseBound(case=ProofCase.ODD_ALL_LARGE, value=bound_non2cov_sperner(n, (n + 1) // 2, n) + 1,
                  terms="C(n, (n+3)/2) + 1"),
        CaseBound(case=ProofCase.ODD_WIDE_SPREAD, value=bound_sperner_lu(n, low, n - 1) + 1,
                  terms="sperner_lu(n, (n-3)/2, n-1) + 1"),
        CaseBound(case=ProofCase.ODD_CASE_1, value=singleton_branch,
                  terms="C(n-1, (n-1)/2) + 2"),
        CaseBound(case=ProofCase.ODD_CASE_2, value=max(pivot_spread, partner_spread),
                  terms=f"max(sperner_lu(n, (n-3)/2, (n-1)/2 + d0), sperner_lu(n, (n-3)/2, n - d0)) + 1, d0={d0}"),
        CaseBound(case=ProofCase.ODD_CASE_3, value=two_extremes,
                  terms="C(n, (n+3)/2) + 1"),
    ]


def improved_case_bounds(n: int) -> List[CaseBound]:
    """Every branch bound of the case analysis, each evaluated from the family-size bounds"""
    _check_length(n)
    if n % 2 == 0:
        if n < 8:
            raise BoundError(f"theorem inapplicable: even n must be at least 8, got n={n}")
        return _even_case_bounds(n)
    if n < 7:
        raise BoundError(f"theorem inapplicable: odd n must be at least 7, got n={n}")
    return _odd_case_bounds(n)


def bound_improved_by_cases(n: int) -> int:
    return max(case.value for case in improved_case_bounds(n))


def bound_table(start: int, end: int) -> BoundTable:
    """One row per n in start..end"""
    if not 1 <= start <= end <= MAX_LENGTH:
        raise BoundError(f"bad range {start}..{end}: needs 1 ≤ a ≤ b ≤ {MAX_LENGTH}")
    rows = []
    for n in range(start, end + 1):
        panoui = bound_panoui(n)
        improved = bound_improved(n)
        best = best_upper_bound(n)
        rows.append(BoundRow(
            n=n,
            stinson_wei=bound_stinson_wei(n).value,
            panoui=panoui.value,
            panoui_formula=panoui.formula_value,
            panoui_applicable=panoui.applicable,
            improved=improved.value,
            improved_applicable=improved.applicable,
            best=best.value,
            method=best.method,
        ))
    logger.debug(f"Built bound table for n={start}..{end}")
    return BoundTable(rows=rows)
