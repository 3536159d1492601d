"""One test per release criterion: the property, its instances, its budget.

The workspace is module-scoped so the criteria audit the same builds a
single run of the gate would; each test prints its one-line verdict.
"""

import pytest

from sparsecover.acceptance import BUDGETS, Workspace, run_criterion


@pytest.fixture(scope="module")
def ws():
    return Workspace()


def _run(number, ws):
    res = run_criterion(number, ws)
    print(res.line())
    assert res.passed, res.detail
    assert res.elapsed < BUDGETS[number]
    return res


def test_01_decomposition_validity(ws):
    _run(1, ws)


def test_02_directed_ball_growth(ws):
    _run(2, ws)


def test_03_buffer_moats(ws):
    _run(3, ws)


def test_04_cover_certificate(ws):
    _run(4, ws)


def test_05_prefix_code_lengths(ws):
    _run(5, ws)


def test_06_laminar_ladders(ws):
    _run(6, ws)


def test_07_hierarchy_embedding(ws):
    _run(7, ws)


def test_08_full_embedding(ws):
    _run(8, ws)


def test_09_aspect_removal(ws):
    _run(9, ws)


def test_10_subdivision_pipeline(ws):
    _run(10, ws)


def test_11_cover_coloring(ws):
    _run(11, ws)


def test_12_clipped_partition(ws):
    _run(12, ws)
