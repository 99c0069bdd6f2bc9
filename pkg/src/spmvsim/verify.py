"""Verification obligations packaged as structured pass/fail reports.

Each entry point evaluates every check it owns, never stopping at the first
failure, and returns a report whose overall verdict is the conjunction of
the individual outcomes. Details carry the observed numbers so a failing
report is diagnosable on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DenseVector, dense_from_csr, residual_sq, spmv_dense_oracle, spmv_seq
from .distributed import GatherPath, check_pass, run_distributed
from .fixtures import Fixture
from .layout import LayoutSumMismatch, build_layout, extract_local

__all__ = ["CheckResult", "VerificationReport", "verify_sequential",
           "verify_distributed"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class VerificationReport:
    """Named check outcomes; overall is true only when every check passed."""

    checks: list[CheckResult]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}"
                 for c in self.checks]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)

    def as_records(self) -> list[dict]:
        return [{"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks]


def _first_diff(a: np.ndarray, b: np.ndarray) -> str:
    idx = np.nonzero(a != b)[0]
    if not len(idx):
        return "no differences"
    k = int(idx[0])
    return f"first difference at index {k}: {a[k]!r} != {b[k]!r}"


def verify_sequential(fixture: Fixture) -> VerificationReport:
    """Check the sequential kernel of a fixture against its ground truth.

    Checks: exact agreement of the CSR kernel with the dense oracle, the
    squared residual against the stored product staying within tolerance,
    and consistency of the pass flag with that threshold.
    """
    checks: list[CheckResult] = []
    mat = fixture.matrix()
    x = fixture.x_vector()
    y = spmv_seq(mat, x)
    oracle = spmv_dense_oracle(dense_from_csr(mat), x)
    same = np.array_equal(y.values, oracle.values)
    checks.append(CheckResult(
        "kernel-matches-oracle", same,
        "kernel output equals dense oracle exactly" if same
        else _first_diff(y.values, oracle.values)))
    rsq = residual_sq(y, fixture.z_vector())
    ok = check_pass(rsq)
    checks.append(CheckResult(
        "residual-within-tolerance", ok, f"residualSq == {rsq!r}"))
    consistent = ok == (rsq <= 1e-6)
    checks.append(CheckResult(
        "pass-flag-consistent", consistent,
        f"check_pass({rsq!r}) == {ok}"))
    return VerificationReport(checks=checks)


def verify_distributed(fixture: Fixture, size: int, explicit_row_sizes=None,
                       explicit_col_sizes=None, *,
                       mode: str = "parallel") -> VerificationReport:
    """Check one distributed run of a fixture at the given rank count.

    Checks: layout sizes summing to the global extents, each rank's result
    slice equalling a direct sequential multiply of its extracted block,
    the concatenation equalling the full sequential result, the residual
    within tolerance, and the gather path matching its prediction.
    """
    checks: list[CheckResult] = []
    try:
        row_layout = build_layout(fixture.M, size, explicit_row_sizes)
        col_layout = build_layout(fixture.N, size, explicit_col_sizes)
    except LayoutSumMismatch as exc:
        checks.append(CheckResult("layout-sums", False, str(exc)))
        checks.append(CheckResult(
            "distributed-run", False,
            "not evaluated: layout construction failed"))
        return VerificationReport(checks=checks)
    row_sum = sum(row_layout.local_sizes)
    col_sum = sum(col_layout.local_sizes)
    sums_ok = row_sum == fixture.M and col_sum == fixture.N
    checks.append(CheckResult(
        "layout-sums", sums_ok,
        f"row blocks sum to {row_sum} of {fixture.M}, column blocks to "
        f"{col_sum} of {fixture.N}"))
    report = run_distributed(fixture, size, explicit_row_sizes,
                             explicit_col_sizes, mode=mode)
    full_x = fixture.x_vector()
    per_rank_ok = True
    per_rank_detail = "every rank slice equals its local sequential multiply"
    for rank in range(size):
        local = extract_local(fixture.row_ptr, fixture.col_idx,
                              fixture.values, row_layout, col_layout, rank)
        expected = spmv_seq(local, full_x)
        if not np.array_equal(report.per_rank_y[rank], expected.values):
            per_rank_ok = False
            per_rank_detail = (f"rank {rank}: "
                               f"{_first_diff(report.per_rank_y[rank], expected.values)}")
            break
    checks.append(CheckResult("per-rank-sub-multiply", per_rank_ok,
                              per_rank_detail))
    combined = (np.concatenate(report.per_rank_y) if report.per_rank_y
                else np.array([]))
    seq_y = spmv_seq(fixture.matrix(), full_x)
    concat_ok = np.array_equal(combined, seq_y.values)
    checks.append(CheckResult(
        "concatenation-matches-sequential", concat_ok,
        "concatenated rank slices equal the sequential result exactly"
        if concat_ok else _first_diff(combined, seq_y.values)))
    ok = check_pass(report.residual_sq)
    checks.append(CheckResult(
        "residual-within-tolerance", ok,
        f"residualSq == {report.residual_sq!r}"))
    if col_layout.explicit:
        predicted = (GatherPath.EQUAL_BLOCKS
                     if len(set(col_layout.local_sizes)) == 1
                     else GatherPath.UNEVEN_BLOCKS)
    else:
        predicted = (GatherPath.EQUAL_BLOCKS if fixture.N % size == 0
                     else GatherPath.UNEVEN_BLOCKS)
    path_ok = report.gather_path == predicted
    checks.append(CheckResult(
        "gather-path-prediction", path_ok,
        f"took {report.gather_path.value}, predicted {predicted.value}"))
    return VerificationReport(checks=checks)
