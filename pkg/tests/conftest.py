import random

import pytest
from hypothesis import strategies as st

from cdfmr.network import ClusterTopology, explicit_budget


def random_instance(rng: random.Random, max_total=20, max_clusters=5, max_size=6, snr_range=(-1, 4)):
    n = rng.randint(1, max_clusters)
    while True:
        sizes = tuple(rng.randint(1, max_size) for _ in range(n))
        if sum(sizes) <= max_total:
            break
    lo, hi = snr_range
    hops = [10 ** rng.uniform(lo, hi) for _ in range(n + 1)]
    return ClusterTopology(sizes), explicit_budget(hops, 10 ** rng.uniform(lo, hi))


@st.composite
def instances(draw, max_total=20, max_clusters=4, max_size=6):
    sizes = draw(
        st.lists(st.integers(1, max_size), min_size=1, max_size=max_clusters).filter(
            lambda s: sum(s) <= max_total
        )
    )
    hops = draw(st.lists(st.floats(-1, 4), min_size=len(sizes) + 1, max_size=len(sizes) + 1))
    gd = draw(st.floats(-1, 4))
    return ClusterTopology(tuple(sizes)), explicit_budget([10**h for h in hops], 10**gd)


@pytest.fixture
def dual_hop():
    return ClusterTopology.of(1), explicit_budget([10.0, 10.0], 1.0)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" and outcome != "error":
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, verdict, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {detail}")
