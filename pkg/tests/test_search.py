import pytest

from bounds import best_upper_bound
from codes import is_2wfp_structural, is_twfp_direct
from search import SearchParameterError, SearchStatus, search_max_code, warm_start


def assert_valid(result):
    assert is_2wfp_structural(result.best_code).ok
    assert is_twfp_direct(result.best_code, result.t).ok
    assert result.size == result.best_code.m


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 2), (3, 4)])
def test_small_binary_optimum(n, expected):
    result = search_max_code(n, 2, budget=100_000, workers=1)
    assert result.status == SearchStatus.OPTIMAL
    assert result.size == expected
    assert_valid(result)


def test_budget_exhausted_still_emits_a_valid_code():
    result = search_max_code(8, 2, budget=50, workers=1)
    assert result.status == SearchStatus.BUDGET_EXHAUSTED
    assert result.size >= 2
    assert_valid(result)


def test_ternary_code_is_valid_and_within_bounds():
    result = search_max_code(4, 3, budget=5_000, workers=1)
    assert_valid(result)
    assert result.size <= best_upper_bound(4).value


def test_three_frameproof_search():
    result = search_max_code(3, 2, t=3, budget=10_000, workers=1)
    assert result.status == SearchStatus.OPTIMAL
    assert result.size == 3
    assert is_twfp_direct(result.best_code, 3).ok


def test_search_is_deterministic():
    first = search_max_code(6, 2, budget=3_000, seed=5, workers=1)
    second = search_max_code(6, 2, budget=3_000, seed=5, workers=1)
    assert first.model_dump(exclude={"wall_time"}) == second.model_dump(exclude={"wall_time"})


def test_search_is_independent_of_worker_count():
    single = search_max_code(6, 2, budget=3_000, seed=1, workers=1)
    pooled = search_max_code(6, 2, budget=3_000, seed=1, workers=3)
    assert single.model_dump(exclude={"wall_time"}) == pooled.model_dump(exclude={"wall_time"})


def test_larger_budget_never_shrinks_the_result():
    sizes = [search_max_code(5, 2, budget=budget, seed=2, workers=1).size
             for budget in (10, 100, 1_000, 10_000)]
    assert sizes == sorted(sizes)


def test_sizes_stay_below_the_best_bound():
    for n in (1, 2, 3, 4, 7, 8):
        result = search_max_code(n, 2, budget=2_000, workers=1)
        assert result.size <= best_upper_bound(n).value


@pytest.mark.slow
def test_lazy_candidate_generation():
    # 7^6 words exceed the materialization limit
    result = search_max_code(6, 7, budget=200, workers=1)
    assert result.status == SearchStatus.BUDGET_EXHAUSTED
    assert_valid(result)


def test_warm_start_is_seeded():
    words = warm_start(5, 2, 2, seed=9)
    assert words == warm_start(5, 2, 2, seed=9)
    assert words[0] == (0, 0, 0, 0, 0)
    assert list(words) == sorted(words)


@pytest.mark.parametrize("kwargs", [
    {"n": 21, "q": 2},
    {"n": 3, "q": 9},
    {"n": 3, "q": 1},
    {"n": 3, "q": 2, "t": 0},
    {"n": 3, "q": 2, "budget": 0},
    {"n": 3, "q": 2, "workers": 0},
])
def test_invalid_parameters(kwargs):
    with pytest.raises(SearchParameterError):
        search_max_code(**kwargs)


def test_default_budget_comes_from_the_environment(monkeypatch):
    monkeypatch.setenv("WFP_SEARCH_BUDGET", "123")
    result = search_max_code(4, 2, workers=1)
    assert result.budget == 123
