from pathlib import Path

import pytest

from graphqsm.multigraph import complete_graph, dumbbell_graph, load_multigraph, rose, theta_graph

DATA = Path(__file__).resolve().parent.parent / "data"

CORPUS_BUILDERS = {
    "theta": theta_graph,
    "dumbbell": dumbbell_graph,
    "k4": lambda: complete_graph(4),
    "rose2": lambda: rose(2),
    "rose3": lambda: rose(3),
}


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def corpus():
    return {name: build() for name, build in CORPUS_BUILDERS.items()}


@pytest.fixture(params=sorted(CORPUS_BUILDERS))
def corpus_graph(request):
    return request.param, CORPUS_BUILDERS[request.param]()


def load(name):
    return load_multigraph(DATA / f"{name}.json")


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
