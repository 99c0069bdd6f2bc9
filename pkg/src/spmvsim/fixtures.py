"""Random test fixture generation and the bundled reference instance.

A fixture packages a global CSR matrix A, an input vector x, and the known
product z = A x. All data is integer-valued in small ranges so products are
exact in double precision and every downstream comparison can demand exact
equality. z always comes from the dense brute-force oracle, never from the
CSR kernel, so the generator cannot share a bug with the code under test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (CsrMatrix, DenseVector, dense_from_csr, spmv_dense_oracle)

__all__ = ["GenParams", "Fixture", "InvalidGenParams", "RNG_NAME",
           "generate", "reference_fixture"]

# fixtures are reproducible only for a fixed generator family; record it
RNG_NAME = "numpy-pcg64"


class InvalidGenParams(ValueError):
    """Generation parameters are inconsistent or infeasible."""


@dataclass
class GenParams:
    """Parameters for random fixture generation.

    Exactly one of target_nnz (total entry budget) and row_fill (maximum
    entries per row) must be set. Value ranges are inclusive integer bounds
    and must stay positive so generated data is exactly representable.
    """

    M: int
    N: int
    target_nnz: int | None = None
    row_fill: int | None = None
    value_range: tuple[int, int] = (1, 11)
    x_range: tuple[int, int] = (1, 9)
    seed: int = 0

    def validate(self) -> None:
        if self.M < 1 or self.N < 1:
            raise InvalidGenParams(f"matrix extents must be >= 1, got "
                                   f"M={self.M} N={self.N}")
        if (self.target_nnz is None) == (self.row_fill is None):
            raise InvalidGenParams(
                "exactly one of target_nnz and row_fill must be set")
        if self.target_nnz is not None:
            if self.target_nnz < 0:
                raise InvalidGenParams(f"target_nnz must be >= 0, got "
                                       f"{self.target_nnz}")
            capacity = self.M * self.N
            if self.target_nnz > capacity:
                raise InvalidGenParams(
                    f"nnz exceeds capacity: {self.target_nnz} > {capacity} "
                    f"({self.M}x{self.N})")
        if self.row_fill is not None and self.row_fill < 0:
            raise InvalidGenParams(f"row_fill must be >= 0, got {self.row_fill}")
        for name, (lo, hi) in (("value_range", self.value_range),
                               ("x_range", self.x_range)):
            if lo < 1 or hi < lo:
                raise InvalidGenParams(
                    f"{name} must satisfy 1 <= lo <= hi, got ({lo}, {hi})")


@dataclass
class Fixture:
    """Global CSR matrix with input vector and known product."""

    M: int
    N: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    x: np.ndarray
    z: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.row_ptr = np.asarray(self.row_ptr, dtype=np.int64)
        self.col_idx = np.asarray(self.col_idx, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.x = np.asarray(self.x, dtype=np.float64)
        self.z = np.asarray(self.z, dtype=np.float64)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def matrix(self) -> CsrMatrix:
        """The global matrix as a sequential CsrMatrix."""
        return CsrMatrix.sequential(self.row_ptr.copy(), self.col_idx.copy(),
                                    self.values.copy(), n=self.N)

    def x_vector(self) -> DenseVector:
        return DenseVector.sequential(self.x.copy())

    def z_vector(self) -> DenseVector:
        return DenseVector.sequential(self.z.copy())


def _oracle_product(M: int, N: int, row_ptr, col_idx, values, x) -> np.ndarray:
    mat = CsrMatrix.sequential(row_ptr, col_idx, values, n=N)
    dense = dense_from_csr(mat)
    return spmv_dense_oracle(dense, DenseVector.sequential(x)).values


def generate(params: GenParams) -> Fixture:
    """Generate a random fixture; the same params give a bit-identical one.

    target_nnz mode draws exactly that many distinct cells uniformly over
    the M x N grid. row_fill mode draws a per-row entry count uniformly from
    0..min(row_fill, N), then that many distinct columns. Column indices
    are strictly increasing within each row either way.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)
    M, N = params.M, params.N
    # draw in a fixed order (structure, values, x) so fixtures are stable
    if params.target_nnz is not None:
        cells = np.sort(rng.choice(M * N, size=params.target_nnz,
                                   replace=False))
        rows = cells // N
        col_idx = cells % N
        counts = np.bincount(rows, minlength=M)
    else:
        cap = min(params.row_fill, N)
        counts = rng.integers(0, cap + 1, size=M)
        picked = [np.sort(rng.choice(N, size=int(c), replace=False))
                  for c in counts]
        col_idx = (np.concatenate(picked) if picked
                   else np.array([], dtype=np.int64))
    row_ptr = np.zeros(M + 1, dtype=np.int64)
    np.cumsum(counts, out=row_ptr[1:])
    nnz = int(row_ptr[-1])
    vlo, vhi = params.value_range
    xlo, xhi = params.x_range
    values = rng.integers(vlo, vhi + 1, size=nnz).astype(np.float64)
    x = rng.integers(xlo, xhi + 1, size=N).astype(np.float64)
    z = _oracle_product(M, N, row_ptr, col_idx, values, x)
    metadata = {
        "rng": RNG_NAME,
        "seed": str(params.seed),
        "M": str(M),
        "N": str(N),
        "value_range": f"{vlo}..{vhi}",
        "x_range": f"{xlo}..{xhi}",
    }
    if params.target_nnz is not None:
        metadata["target_nnz"] = str(params.target_nnz)
    else:
        metadata["row_fill"] = str(params.row_fill)
    return Fixture(M=M, N=N, row_ptr=row_ptr,
                   col_idx=np.asarray(col_idx, dtype=np.int64),
                   values=values, x=x, z=z, metadata=metadata)


# Bundled 32 x 36 reference instance with a known product. The row pointer
# addresses 49 stored entries; the declared entry budget in the originating
# source was 50 with a trailing zero-initialized slot that no row addresses,
# so the authoritative count here is len(values) == 49.
_REF_ROW_PTR = [0, 1, 1, 2, 6, 9, 10, 10, 11, 11, 13, 13, 13, 16, 17, 18, 18,
                19, 20, 22, 23, 27, 28, 31, 32, 34, 37, 37, 41, 44, 44, 47, 49]
_REF_COL_IDX = [25, 13, 1, 5, 7, 35, 18, 19, 31, 32, 21, 32, 33, 0, 8, 27, 16,
                25, 3, 24, 17, 27, 13, 3, 28, 29, 30, 2, 23, 29, 31, 10, 8,
                29, 1, 20, 22, 3, 8, 16, 19, 10, 14, 24, 2, 6, 15, 17, 34]
_REF_VALUES = [8, 3, 7, 5, 6, 7, 1, 9, 8, 9, 9, 9, 5, 1, 5, 8, 4, 4, 2, 11, 3,
               8, 9, 7, 7, 4, 2, 2, 7, 6, 9, 3, 4, 2, 2, 9, 7, 4, 7, 8, 1, 8,
               6, 1, 3, 3, 6, 6, 1]
_REF_X = [3, 2, 2, 7, 1, 5, 3, 3, 6, 6, 4, 8, 8, 4, 7, 8, 9, 7, 7, 6, 9, 5, 8,
          5, 7, 5, 5, 5, 2, 4, 8, 1, 3, 6, 9, 8]
_REF_Z = [40, 0, 12, 113, 69, 27, 0, 45, 0, 57, 0, 0, 73, 36, 20, 0, 14, 77,
          61, 36, 95, 4, 68, 12, 32, 141, 0, 148, 81, 0, 63, 51]


def reference_fixture() -> Fixture:
    """The bundled reference instance; arrays are fresh copies per call."""
    return Fixture(
        M=32,
        N=36,
        row_ptr=np.array(_REF_ROW_PTR, dtype=np.int64),
        col_idx=np.array(_REF_COL_IDX, dtype=np.int64),
        values=np.array(_REF_VALUES, dtype=np.float64),
        x=np.array(_REF_X, dtype=np.float64),
        z=np.array(_REF_Z, dtype=np.float64),
        metadata={"source": "builtin-reference"},
    )
