from __future__ import annotations

import itertools

import pytest
from hypothesis import HealthCheck, settings

from approxring.ring import MatrixRing, ZMod, make_ring
from approxring.setops import ElementSet

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def symmetric_subsets(n: int):
    """Every additively symmetric subset of Z/n containing 0."""
    ring = ZMod(n)
    orbits, seen = [], {0}
    for x in range(1, n):
        if x not in seen:
            orb = {x, (-x) % n}
            seen |= orb
            orbits.append(orb)
    for mask in range(1 << len(orbits)):
        members = {0}
        for i, orb in enumerate(orbits):
            if mask >> i & 1:
                members |= orb
        yield ElementSet(ring, members)


def strictly_upper(ring_base, k: int) -> tuple[MatrixRing, ElementSet]:
    """M_k over ring_base and the set of all strictly upper triangular matrices."""
    M = MatrixRing(ring_base, k)
    base_elems = ring_base.elements()
    positions = [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    members = set()
    for vals in itertools.product(base_elems, repeat=len(positions)):
        x = M.zero
        for (i, j), v in zip(positions, vals):
            x = M.add(x, M.unit(i, j, v))
        members.add(x)
    return M, ElementSet(M, members)


@pytest.fixture
def z7():
    return ZMod(7)


@pytest.fixture
def integers():
    return make_ring({"kind": "integers"})


# ---------------------------------------------------------------------------
# acceptance criteria registry: one PASS/FAIL line per criterion
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
