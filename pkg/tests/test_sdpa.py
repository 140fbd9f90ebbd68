import numpy as np
import pytest

from cyclesearch.builder import build_cycle_problem, lower_to_conic
from cyclesearch.function_classes import SmoothConvex
from cyclesearch.methods import heavy_ball, inexact_gradient
from cyclesearch.sdpa import (
    load_program,
    program_from_dict,
    program_to_dict,
    read_sdpa,
    save_program,
    write_sdpa,
)
from cyclesearch.solver import solve

from planted import planted_sdp
from reference import solve_sdpa_file_with_cvxpy


def _programs():
    yield lower_to_conic(
        build_cycle_problem(heavy_ball(0.9, 0.3), SmoothConvex(1.0), 2)
    ).program
    yield lower_to_conic(
        build_cycle_problem(inexact_gradient(1.6, 0.5), SmoothConvex(1.0), 2)
    ).program
    yield planted_sdp(5, 8, 2, seed=4)[0]


def test_json_roundtrip(tmp_path):
    for k, prog in enumerate(_programs()):
        path = tmp_path / f"prog{k}.json"
        save_program(prog, path)
        back = load_program(path)
        assert back.psd_dim == prog.psd_dim
        assert back.free_dim == prog.free_dim
        assert np.array_equal(back.C, prog.C)
        assert len(back.constraints) == len(prog.constraints)
        for ca, cb in zip(back.constraints, prog.constraints):
            assert np.array_equal(ca.A, cb.A)
            assert np.array_equal(ca.a, cb.a)
            assert (ca.b, ca.sense, ca.tag) == (cb.b, cb.sense, cb.tag)
        assert len(back.gauge_directions) == len(prog.gauge_directions)
        # Solving the round-tripped program reproduces the objective.
        assert solve(back).primal_objective == pytest.approx(
            solve(prog).primal_objective, abs=1e-9
        )


def test_dict_roundtrip_preserves_solution():
    prog, opt = planted_sdp(6, 10, 1, seed=2)
    back = program_from_dict(program_to_dict(prog))
    assert solve(back).primal_objective == pytest.approx(opt, rel=1e-7)


def test_sdpa_file_structure(tmp_path):
    prog = next(_programs())
    path = tmp_path / "prog.dat-s"
    write_sdpa(prog, path)
    b, sizes, mats = read_sdpa(path)
    assert len(b) == len(prog.constraints)
    assert sizes[0] == prog.psd_dim
    assert sizes[1] == -prog.nonneg_dim
    assert sizes[2] == -2 * prog.free_dim
    # Gram block of F_0 is -C; constraint blocks carry A_i.
    assert np.allclose(mats[0][0], -prog.C)
    assert np.allclose(mats[1][0], prog.constraints[0].A)


@pytest.mark.parametrize("case", [0, 1, 2])
def test_sdpa_cross_check_against_external_solver(tmp_path, case):
    """Write, re-read, and solve the SDPA dump with an external conic
    solver; objectives agree."""
    prog = list(_programs())[case]
    path = tmp_path / "prog.dat-s"
    write_sdpa(prog, path)
    external = solve_sdpa_file_with_cvxpy(path)
    ours = solve(prog).primal_objective
    assert ours == pytest.approx(external, abs=2e-6)
