"""CSR matrix and dense vector containers plus the sequential kernels.

The matrix type carries both local and global extents so the same container
serves sequential use (local == global) and per-rank pieces of a block-row
distributed matrix, where column indices remain global. The multiplication
kernel is a plain row loop with left-to-right accumulation, so results are
bitwise deterministic. A dense brute-force oracle provides an independent
cross-check for the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CsrMatrix",
    "DenseVector",
    "DenseMatrix",
    "ValidationReport",
    "SizeMismatch",
    "DuplicateEntry",
    "validate_csr",
    "spmv_seq",
    "residual_sq",
    "dense_from_csr",
    "spmv_dense_oracle",
]


class SizeMismatch(ValueError):
    """Operand shapes do not conform."""


class DuplicateEntry(ValueError):
    """The same (row, column) cell is stored more than once."""


@dataclass
class CsrMatrix:
    """Compressed sparse row matrix, possibly a local piece of a global one.

    m, n are the local row count and diagonal-block width; M, N the global
    extents; rstart, cstart the global offsets of the local block. Column
    indices are always global. A sequential matrix has m == M, n == N and
    zero offsets.
    """

    m: int
    n: int
    M: int
    N: int
    rstart: int
    cstart: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.row_ptr = np.asarray(self.row_ptr, dtype=np.int64)
        self.col_idx = np.asarray(self.col_idx, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def nnz(self) -> int:
        return len(self.values)

    @classmethod
    def sequential(cls, row_ptr, col_idx, values, n: int) -> "CsrMatrix":
        """Build a non-distributed matrix; row count comes from row_ptr."""
        m = len(row_ptr) - 1
        return cls(m=m, n=n, M=m, N=n, rstart=0, cstart=0,
                   row_ptr=row_ptr, col_idx=col_idx, values=values)


@dataclass
class DenseVector:
    """Dense vector with local length n out of a global length N."""

    n: int
    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.values) != self.n:
            raise SizeMismatch(
                f"vector declares n={self.n} but stores {len(self.values)} values")
        if self.n > self.N:
            raise SizeMismatch(f"local length {self.n} exceeds global length {self.N}")

    @classmethod
    def sequential(cls, values) -> "DenseVector":
        v = np.asarray(values, dtype=np.float64)
        return cls(n=len(v), N=len(v), values=v)


@dataclass
class DenseMatrix:
    """Dense m x n matrix used only by the brute-force oracle."""

    m: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.m, self.n):
            raise SizeMismatch(
                f"dense storage shape {self.values.shape} != ({self.m}, {self.n})")


@dataclass
class ValidationReport:
    """Outcome of validate_csr: ok flag plus human-readable violations."""

    ok: bool
    violations: list[str] = field(default_factory=list)


def validate_csr(mat: CsrMatrix) -> ValidationReport:
    """Check the structural CSR invariants and report every violation found.

    Checks: row pointer length, zero start, monotonicity, agreement of
    row_ptr[m] with the stored entry count, column indices within [0, N),
    and local block placement within the global extents.
    """
    v: list[str] = []
    rp, cj, av = mat.row_ptr, mat.col_idx, mat.values
    if mat.m < 0 or mat.n < 0:
        v.append(f"negative local size m={mat.m} n={mat.n}")
        return ValidationReport(ok=False, violations=v)
    if len(rp) != mat.m + 1:
        v.append(f"row_ptr length {len(rp)} != m+1 = {mat.m + 1}")
        return ValidationReport(ok=False, violations=v)
    if rp[0] != 0:
        v.append(f"row_ptr[0] != 0 (got {rp[0]})")
    drops = np.nonzero(np.diff(rp) < 0)[0]
    if len(drops):
        k = int(drops[0])
        v.append(f"row_ptr decreases at index {k + 1} ({rp[k]} -> {rp[k + 1]})")
    if rp[mat.m] != len(cj):
        v.append(f"row_ptr[m] = {rp[mat.m]} != stored entry count {len(cj)}")
    if len(av) != len(cj):
        v.append(f"values length {len(av)} != col_idx length {len(cj)}")
    if len(cj):
        bad = np.nonzero((cj < 0) | (cj >= mat.N))[0]
        if len(bad):
            p = int(bad[0])
            v.append(f"col_idx[{p}] = {cj[p]} out of range [0, {mat.N})")
    if not (0 <= mat.rstart and mat.rstart + mat.m <= mat.M):
        v.append(f"row block [{mat.rstart}, {mat.rstart + mat.m}) outside [0, {mat.M})")
    if not (0 <= mat.cstart and mat.cstart + mat.n <= mat.N):
        v.append(f"column block [{mat.cstart}, {mat.cstart + mat.n}) outside [0, {mat.N})")
    return ValidationReport(ok=not v, violations=v)


def spmv_seq(mat: CsrMatrix, x: DenseVector) -> DenseVector:
    """Multiply a CSR matrix by a dense vector, one row at a time.

    Every output entry is explicitly initialized to 0.0 and entries of a row
    are accumulated left to right in storage order, so the result is bitwise
    reproducible. x must reach every referenced column; since indices are
    global, a local piece is multiplied against the full-width vector.
    """
    if mat.nnz:
        required = int(mat.col_idx.max()) + 1
        if x.n < required:
            raise SizeMismatch(
                f"x has {x.n} entries but column indices reach {required - 1}")
    rp = mat.row_ptr.tolist()
    cj = mat.col_idx.tolist()
    av = mat.values.tolist()
    xs = x.values.tolist()
    out = np.zeros(mat.m, dtype=np.float64)
    for i in range(mat.m):
        acc = 0.0
        for p in range(rp[i], rp[i + 1]):
            acc += av[p] * xs[cj[p]]
        out[i] = acc
    return DenseVector(n=mat.m, N=mat.M, values=out)


def residual_sq(y: DenseVector, z: DenseVector) -> float:
    """Squared 2-norm of y - z, accumulated left to right."""
    if y.n != z.n:
        raise SizeMismatch(f"result length {y.n} != reference length {z.n}")
    total = 0.0
    for a, b in zip(y.values.tolist(), z.values.tolist()):
        d = a - b
        total += d * d
    return total


def dense_from_csr(mat: CsrMatrix) -> DenseMatrix:
    """Expand a CSR matrix into dense m x N storage.

    Rejects matrices that store the same cell twice, since the dense form
    cannot represent summed duplicates faithfully.
    """
    report = validate_csr(mat)
    if not report.ok:
        raise ValueError("invalid CSR: " + report.violations[0])
    rp = mat.row_ptr.tolist()
    cj = mat.col_idx.tolist()
    av = mat.values.tolist()
    dense = np.zeros((mat.m, mat.N), dtype=np.float64)
    filled = np.zeros((mat.m, mat.N), dtype=bool)
    for i in range(mat.m):
        for p in range(rp[i], rp[i + 1]):
            j = cj[p]
            if filled[i, j]:
                raise DuplicateEntry(f"cell ({i}, {j}) stored more than once")
            filled[i, j] = True
            dense[i, j] = av[p]
    return DenseMatrix(m=mat.m, n=mat.N, values=dense)


def spmv_dense_oracle(dense: DenseMatrix, x: DenseVector) -> DenseVector:
    """Schoolbook dense product, the independent check for spmv_seq."""
    if dense.n != x.n:
        raise SizeMismatch(f"matrix width {dense.n} != vector length {x.n}")
    rows = dense.values.tolist()
    xs = x.values.tolist()
    out = np.zeros(dense.m, dtype=np.float64)
    for i, row in enumerate(rows):
        acc = 0.0
        for a, xv in zip(row, xs):
            acc += a * xv
        out[i] = acc
    return DenseVector(n=dense.m, N=dense.m, values=out)
