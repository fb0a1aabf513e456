import numpy as np
import pytest
from hypothesis import strategies as st

from mlbalance.cycles import petersen_signings
from mlbalance.graph import SignedGraph


@pytest.fixture(scope="session")
def petersen():
    return petersen_signings()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@st.composite
def signed_graphs(draw, min_n=1, max_n=8, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if connected:
        # a random spanning path keeps the graph connected
        order = draw(st.permutations(range(n)))
        chosen = sorted(set(chosen) | {tuple(sorted((order[i], order[i + 1]))) for i in range(n - 1)})
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=len(chosen), max_size=len(chosen)))
    return SignedGraph(n, tuple((u, v, s) for (u, v), s in zip(chosen, signs)))


def vertex_subsets(n):
    return st.sets(st.integers(0, n - 1)) if n else st.just(set())


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("summary", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, status, summary in sorted(lines, key=lambda x: float(x[0])):
            terminalreporter.write_line(f"criterion {num}: {status}  {summary}")
