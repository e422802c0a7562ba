from collections import deque

import pytest

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(criterion: str, passed: bool, detail: str = "") -> bool:
        lines.append((criterion, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in lines:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")


def tree_hitting_oracle(graph) -> int:
    """Exact hitting time on a tree graph from edge-crossing counts.

    Crossing an edge u -> v for the first time takes 2 * e(u) + 1 expected
    steps, where e(u) is the number of edges on u's side of the edge.  Summing
    over the start -> target path gives an integer.  Only valid for trees with a
    single finish vertex.
    """
    n = graph.num_vertices
    assert graph.num_edges == n - 1, "not a tree"
    (target,) = graph.finish
    parent = {graph.start: None}
    order = [graph.start]
    queue = deque([graph.start])
    while queue:
        v = queue.popleft()
        for w in graph.neighbors[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
                queue.append(w)
    size = dict.fromkeys(range(n), 1)
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    total = 0
    v = target
    while parent[v] is not None:
        # u-side of edge (parent, v) has n - size[v] vertices
        total += 2 * (n - size[v] - 1) + 1
        v = parent[v]
    return total
