import threading
import time

import pytest

from utils import parallel
from utils.parallel import parallel_map


def test_order_is_preserved():
    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x
    assert parallel_map(slow_square, range(5), threads=4) == [0, 1, 4, 9, 16]


def test_serial_by_default():
    caller = threading.get_ident()
    assert parallel_map(lambda _: threading.get_ident(), range(3)) == [caller] * 3


def test_thread_count_must_be_positive():
    with pytest.raises(ValueError):
        parallel_map(abs, [1, -2], threads=0)


def test_no_module_level_thread_count():
    assert not hasattr(parallel, "set_default_threads")
    assert not hasattr(parallel, "_threads")


def test_concurrent_callers_keep_their_own_thread_count():
    seen = {}

    def record(label, threads):
        idents = parallel_map(lambda _: threading.get_ident(), range(4), threads=threads)
        seen[label] = (threading.get_ident(), idents)

    serial = threading.Thread(target=record, args=("serial", 1))
    pooled = threading.Thread(target=record, args=("pooled", 4))
    serial.start()
    pooled.start()
    serial.join()
    pooled.join()
    caller, idents = seen["serial"]
    assert idents == [caller] * 4
    caller, idents = seen["pooled"]
    assert caller not in idents


def test_errors_propagate():
    def boom(x):
        if x == 2:
            raise RuntimeError("bad item")
        return x
    with pytest.raises(RuntimeError, match="bad item"):
        parallel_map(boom, range(4), threads=2)
