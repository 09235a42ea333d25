import functools

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []

# seeded generic weight used by every B3 check at M = 2
B3_SEED = 2024


@functools.lru_cache(maxsize=None)
def b3_ell():
    from odeim.bethe import random_ell

    return tuple(float(v) for v in random_ell("B3", np.random.default_rng(B3_SEED)))


@functools.lru_cache(maxsize=None)
def b3_family():
    from odeim.odeflow import QFamily

    return QFamily("B3", 2, b3_ell())


@functools.lru_cache(maxsize=None)
def b3_zeros():
    from odeim.bethe import find_zeros

    fam = b3_family()
    return find_zeros(lambda E: fam.sample(1, E).Q, 5, node=1)


@functools.lru_cache(maxsize=None)
def a2_family():
    from odeim.bethe import random_ell
    from odeim.odeflow import QFamily

    return QFamily("A2", 2, tuple(random_ell("A2", np.random.default_rng(5))))


@functools.lru_cache(maxsize=None)
def a2_zeros():
    from odeim.bethe import find_zeros

    fam = a2_family()
    return find_zeros(lambda E: fam.sample(1, E).Q, 3, node=1)


@functools.lru_cache(maxsize=None)
def airy_family(g):
    from odeim.airy import AiryFamily

    return AiryFamily(g)


@functools.lru_cache(maxsize=None)
def airy_zeros(g):
    from odeim.bethe import find_zeros

    fam = airy_family(g)
    return find_zeros(lambda E: fam.sample(1, E).Q, 5, r_start=10, node=1)


@pytest.fixture
def record_criterion():
    def record(number, name, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
