"""Serialization of conic programs: JSON dump and sparse SDPA format.

The SDPA file encodes the standard pair

    (P)  min  b.x   s.t.  sum_i x_i F_i - F_0  PSD
    (D)  max  <F_0, Y>  s.t.  <F_i, Y> = b_i,  Y PSD (blockwise)

Our program maps onto (D): block 1 is the Gram block (F_i = A_i,
F_0 = -C), block 2 a diagonal block of inequality slacks, block 3 a
diagonal block holding the free variables split into positive and
negative parts.  The optimal value of our minimization is the negative of
the SDPA optimal value, which is what external solvers cross-check.
"""

from __future__ import annotations

import json

import numpy as np

from .builder import ConicProgram, LinearConstraint

__all__ = [
    "write_sdpa",
    "read_sdpa",
    "program_to_dict",
    "program_from_dict",
    "save_program",
    "load_program",
]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_sdpa(prog: ConicProgram, path) -> None:
    """Write the program in sparse SDPA (.dat-s) form."""
    n, p = prog.psd_dim, prog.free_dim
    ineq_rows = [i for i, con in enumerate(prog.constraints) if con.sense == ">="]
    slack_of = {row: k for k, row in enumerate(ineq_rows)}
    q = len(ineq_rows)

    blocks: list[int] = [n]
    if q:
        blocks.append(-q)
    if p:
        blocks.append(-2 * p)
    blk_slack = 2 if q else None
    blk_free = len(blocks) if p else None

    lines = []
    lines.append(f"{len(prog.constraints)}")
    lines.append(f"{len(blocks)}")
    lines.append(" ".join(str(b) for b in blocks))
    lines.append(" ".join(_fmt(con.b) for con in prog.constraints))

    def emit(matno: int, blkno: int, i: int, j: int, val: float):
        if val != 0.0:
            lines.append(f"{matno} {blkno} {i + 1} {j + 1} {_fmt(val)}")

    # F_0: -C on the Gram block, -c / +c on the free split.
    for i in range(n):
        for j in range(i, n):
            emit(0, 1, i, j, -prog.C[i, j])
    if p:
        for k in range(p):
            emit(0, blk_free, k, k, -prog.c[k])
            emit(0, blk_free, p + k, p + k, prog.c[k])

    for row, con in enumerate(prog.constraints):
        for i in range(n):
            for j in range(i, n):
                emit(row + 1, 1, i, j, con.A[i, j])
        if con.sense == ">=":
            k = slack_of[row]
            emit(row + 1, blk_slack, k, k, -1.0)
        if p:
            for k in range(p):
                emit(row + 1, blk_free, k, k, con.a[k])
                emit(row + 1, blk_free, p + k, p + k, -con.a[k])

    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_sdpa(path) -> tuple[np.ndarray, list[int], list[list[np.ndarray]]]:
    """Parse a sparse SDPA file into (b, block sizes, [F_0..F_m] per block).

    Diagonal blocks are returned as dense (|size| x |size|) matrices.
    """
    with open(path, encoding="ascii") as fh:
        raw = [ln.strip() for ln in fh if ln.strip() and not ln.startswith(('"', "*"))]
    m = int(raw[0])
    nblocks = int(raw[1])
    sizes = [int(t) for t in raw[2].split()]
    assert len(sizes) == nblocks
    b = np.array([float(t) for t in raw[3].split()])
    assert len(b) == m
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    for ln in raw[4:]:
        mno, blk, i, j, val = ln.split()
        mno, blk, i, j = int(mno), int(blk) - 1, int(i) - 1, int(j) - 1
        val = float(val)
        mats[mno][blk][i, j] = val
        mats[mno][blk][j, i] = val
    return b, sizes, mats


def program_to_dict(prog: ConicProgram) -> dict:
    return {
        "psd_dim": prog.psd_dim,
        "free_dim": prog.free_dim,
        "C": prog.C.tolist(),
        "c": prog.c.tolist(),
        "objective_const": prog.objective_const,
        "constraints": [
            {
                "A": con.A.tolist(),
                "a": con.a.tolist(),
                "b": con.b,
                "sense": con.sense,
                "tag": con.tag,
            }
            for con in prog.constraints
        ],
        "gauge_directions": [v.tolist() for v in prog.gauge_directions],
    }


def program_from_dict(doc: dict) -> ConicProgram:
    return ConicProgram(
        psd_dim=doc["psd_dim"],
        free_dim=doc["free_dim"],
        C=np.array(doc["C"], dtype=float),
        c=np.array(doc["c"], dtype=float),
        constraints=[
            LinearConstraint(
                A=np.array(d["A"], dtype=float),
                a=np.array(d["a"], dtype=float),
                b=d["b"],
                sense=d["sense"],
                tag=d["tag"],
            )
            for d in doc["constraints"]
        ],
        objective_const=doc.get("objective_const", 0.0),
        gauge_directions=[np.array(v, dtype=float) for v in doc.get("gauge_directions", [])],
    )


def save_program(prog: ConicProgram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(program_to_dict(prog), fh, sort_keys=True)
        fh.write("\n")


def load_program(path) -> ConicProgram:
    with open(path, encoding="utf-8") as fh:
        return program_from_dict(json.load(fh))
