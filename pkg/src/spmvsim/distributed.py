"""Block-row distributed SpMV on top of the simulated collectives.

Every rank owns a contiguous block of rows (and a matching block of the
input vector), gathers the full input with allgather or allgatherv, runs
the sequential kernel on its rows, and contributes its part of the squared
residual against the known product to a global allreduce.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .collectives import CollectiveEngine, CollectiveTrace, RankContext
from .core import DenseVector, residual_sq, spmv_seq
from .fixtures import Fixture
from .layout import Layout, build_layout, extract_local

__all__ = ["RESIDUAL_TOLERANCE", "GatherPath", "DistRunReport", "gather_x",
           "run_distributed", "check_pass"]

# pass/fail threshold on the squared 2-norm of y - z
RESIDUAL_TOLERANCE = 1e-6


class GatherPath(enum.Enum):
    """Which collective assembled the global input vector."""

    EQUAL_BLOCKS = "allgather"
    UNEVEN_BLOCKS = "allgatherv"


@dataclass
class DistRunReport:
    """Everything observable about one distributed run."""

    size: int
    row_layout: Layout
    col_layout: Layout
    per_rank_y: list[np.ndarray]
    residual_sq: float
    gather_path: GatherPath
    trace: CollectiveTrace | None = None


def check_pass(residual_sq_value: float) -> bool:
    """True when the squared residual is within the fixed tolerance."""
    return residual_sq_value <= RESIDUAL_TOLERANCE


def _gather_x_with_path(ctx: RankContext, local_x: np.ndarray,
                        col_layout: Layout) -> tuple[np.ndarray, GatherPath]:
    local_x = np.asarray(local_x, dtype=np.float64)
    n = len(local_x)
    if col_layout.explicit:
        # user-chosen split: nothing guarantees equal blocks, so ask
        counts = ctx.allgather(np.array([n], dtype=np.int64))
        if len(set(counts.tolist())) == 1:
            return ctx.allgather(local_x), GatherPath.EQUAL_BLOCKS
    else:
        # default split: blocks are equal exactly when size divides N
        if col_layout.total % ctx.size == 0:
            return ctx.allgather(local_x), GatherPath.EQUAL_BLOCKS
        counts = ctx.allgather(np.array([n], dtype=np.int64))
    displs = []
    acc = 0
    for c in counts.tolist():
        displs.append(acc)
        acc += int(c)
    full = ctx.allgatherv(local_x, counts.tolist(), displs)
    return full, GatherPath.UNEVEN_BLOCKS


def gather_x(ctx: RankContext, local_x, col_layout: Layout) -> np.ndarray:
    """Assemble the global input vector from per-rank blocks.

    Chooses allgather when all blocks are provably equal (the default split
    with size dividing the extent, or an explicit split whose gathered
    lengths agree) and allgatherv otherwise.
    """
    full, _ = _gather_x_with_path(ctx, local_x, col_layout)
    return full


def run_distributed(fixture: Fixture, size: int, explicit_row_sizes=None,
                    explicit_col_sizes=None, *, mode: str = "parallel",
                    record_trace: bool = False) -> DistRunReport:
    """Run the distributed SpMV of a fixture across simulated ranks.

    Row and column layouts default to the block formula; explicit size
    lists override them (and are checked eagerly, raising LayoutSumMismatch
    when they do not add up). The report carries per-rank result slices,
    the residual against the fixture's known product, and the gather path
    actually taken.
    """
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    row_layout = build_layout(fixture.M, size, explicit_row_sizes)
    col_layout = build_layout(fixture.N, size, explicit_col_sizes)
    gi, gj, ga = fixture.row_ptr, fixture.col_idx, fixture.values
    x_global, z_global = fixture.x, fixture.z

    def program(ctx: RankContext):
        m = row_layout.local_sizes[ctx.rank]
        n = col_layout.local_sizes[ctx.rank]
        rstart = ctx.exscan_sum(m)
        cstart = ctx.exscan_sum(n)
        if ctx.rank == 0:
            rstart = 0
            cstart = 0
        local = extract_local(gi, gj, ga, row_layout, col_layout, ctx.rank)
        if (rstart, cstart) != (local.rstart, local.cstart):
            raise AssertionError(
                f"exscan offsets ({rstart}, {cstart}) disagree with layout "
                f"({local.rstart}, {local.cstart})")
        x_local = x_global[cstart:cstart + n]
        z_local = z_global[rstart:rstart + m]
        full_x, path = _gather_x_with_path(ctx, x_local, col_layout)
        y = spmv_seq(local, DenseVector.sequential(full_x))
        partial = residual_sq(y, DenseVector(n=m, N=fixture.M, values=z_local))
        total = ctx.allreduce_sum(partial)
        return y.values, total, path

    engine = CollectiveEngine(size, mode=mode, record_trace=record_trace)
    outputs = engine.run(program)
    ys = [out[0] for out in outputs]
    totals = [out[1] for out in outputs]
    paths = [out[2] for out in outputs]
    if any(t != totals[0] for t in totals[1:]):
        raise AssertionError(f"allreduce left ranks disagreeing: {totals}")
    if any(p != paths[0] for p in paths[1:]):
        raise AssertionError(f"ranks took different gather paths: {paths}")
    return DistRunReport(size=size, row_layout=row_layout,
                         col_layout=col_layout, per_rank_y=ys,
                         residual_sq=totals[0], gather_path=paths[0],
                         trace=engine.trace)
