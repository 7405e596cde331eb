import threading

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from oodlab.batch import BatchRunner, run_units


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(), max_size=40), st.integers(1, 6))
def test_results_follow_unit_order(units, workers):
    assert run_units(lambda x: 2 * x, units, max_workers=workers) == [2 * x for x in units]


def test_threads_are_bounded():
    active, peak = [0], [0]
    lock = threading.Lock()

    def work(_):
        with lock:
            active[0] += 1
            peak[0] = max(peak[0], active[0])
        threading.Event().wait(0.01)
        with lock:
            active[0] -= 1

    run_units(work, list(range(20)), max_workers=3)
    assert peak[0] <= 3


def test_failures_are_collected():
    def half(x):
        if x % 2:
            raise ValueError(f"odd {x}")
        return x // 2

    batch = BatchRunner(max_workers=3).run(half, [0, 1, 2, 3, 4])
    assert not batch.ok
    assert [f.index for f in batch.failures] == [1, 3]
    assert batch.results == [0, None, 1, None, 2]
    with pytest.raises(ValueError, match="odd 1"):
        batch.raise_first()


def test_run_units_reraises_lowest_index():
    def boom(x):
        raise KeyError(x)

    with pytest.raises(KeyError, match="2"):
        run_units(boom, [2, 5, 7], max_workers=2)


def test_worker_count_must_be_positive():
    with pytest.raises(ValueError):
        BatchRunner(max_workers=0)
