"""Smoke test of the pydbs extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import math
import pathlib

import pydbs

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    m = pydbs.ProbabilityModel(2, [0.5, 0.3, 0.2])
    assert math.isclose(m.prob_dbs(2), 0.64, abs_tol=1e-12)
    assert math.isclose(m.prob_lds(1), 0.30, abs_tol=1e-12)
    assert pydbs.lds_leaves(2, 2, 3) == 3

    fig = pydbs.ProbabilityModel.from_family("binomial", 8, 8, plateaus=(4, 2))
    rows = fig.curves()
    assert {r[0] for r in rows} >= {"lds", "dbs(2)+lds"}
    assert math.isclose(max(r[2] for r in rows if r[0] == "lds"), 1.0, abs_tol=1e-9)

    passed, failures, points = pydbs.verify_theorems(4, 3)
    assert passed, failures
    assert points > 0

    value, matching, u, v = pydbs.solve_assignment([[4, 1, 3], [2, 0, 5], [3, 2, 2]])
    assert value == 5 and sum(u) + sum(v) == value
    assert sorted(matching) == [0, 1, 2]

    assert pydbs.held_karp([[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]]) == 4

    run = pydbs.solve_tsp(str(ROOT / "data" / "tsplib" / "gr17.tsp"), "dbs")
    assert run.outcome == "optimal" and run.objective == 2085, run

    grid = pydbs.generate_pls(10, 30, balanced=True, seed=3)
    assert sum(row.count(0) for row in grid) == 30
    run = pydbs.solve_pls(grid, "lds")
    assert run.outcome == "solved", run
    sol = run.solution
    for i in range(10):
        assert sorted(sol[i * 10:(i + 1) * 10]) == list(range(1, 11))
        assert sorted(sol[i::10]) == list(range(1, 11))

    try:
        pydbs.solve_pls([[1, 1], [0, 0]])
    except ValueError as e:
        assert "row 0" in str(e)
    else:
        raise AssertionError("duplicate symbol accepted")

    print("pydbs smoke test passed")


if __name__ == "__main__":
    main()
