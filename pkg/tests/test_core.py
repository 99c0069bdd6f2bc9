"""CSR validation, the row-loop kernel, residual, and the dense oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spmvsim import (
    CsrMatrix,
    DenseVector,
    DuplicateEntry,
    GenParams,
    SizeMismatch,
    dense_from_csr,
    generate,
    residual_sq,
    spmv_dense_oracle,
    spmv_seq,
    validate_csr,
)

# known product of the bundled reference instance
REF_Z = [40, 0, 12, 113, 69, 27, 0, 45, 0, 57, 0, 0, 73, 36, 20, 0, 14, 77,
         61, 36, 95, 4, 68, 12, 32, 141, 0, 148, 81, 0, 63, 51]


def small_matrix():
    # 3 x 4, one empty row, unsorted columns in row 2
    return CsrMatrix.sequential(
        row_ptr=[0, 2, 2, 4],
        col_idx=[0, 3, 2, 1],
        values=[2.0, 1.0, 5.0, 3.0],
        n=4,
    )


def test_validate_reference_ok(ref):
    report = validate_csr(ref.matrix())
    assert report.ok
    assert report.violations == []


def test_validate_accepts_empty_matrix():
    mat = CsrMatrix.sequential(row_ptr=[0, 0], col_idx=[], values=[], n=3)
    assert validate_csr(mat).ok


def test_validate_rejects_nonzero_first_pointer():
    mat = CsrMatrix.sequential([1, 2], [0], [1.0], n=2)
    report = validate_csr(mat)
    assert not report.ok
    assert any("row_ptr[0]" in v for v in report.violations)


def test_validate_rejects_decreasing_pointer():
    mat = CsrMatrix.sequential([0, 2, 1], [0, 1, 0], [1.0, 1.0, 1.0], n=2)
    report = validate_csr(mat)
    assert not report.ok
    assert any("decreases" in v for v in report.violations)


def test_validate_rejects_pointer_count_disagreement():
    mat = CsrMatrix.sequential([0, 1], [0, 1], [1.0, 1.0], n=2)
    report = validate_csr(mat)
    assert not report.ok
    assert any("row_ptr[m]" in v for v in report.violations)


def test_validate_rejects_column_out_of_range():
    mat = CsrMatrix.sequential([0, 1], [5], [1.0], n=2)
    report = validate_csr(mat)
    assert not report.ok
    assert any("out of range" in v for v in report.violations)


def test_validate_rejects_bad_local_block():
    mat = CsrMatrix(m=2, n=2, M=3, N=2, rstart=2, cstart=0,
                    row_ptr=[0, 0, 0], col_idx=[], values=[])
    report = validate_csr(mat)
    assert not report.ok
    assert any("row block" in v for v in report.violations)


def test_validate_collects_every_violation():
    # bad first pointer and a column out of range at once
    mat = CsrMatrix.sequential([1, 2], [9], [1.0], n=2)
    report = validate_csr(mat)
    assert len(report.violations) >= 2


def test_spmv_reproduces_reference_product(ref):
    y = spmv_seq(ref.matrix(), ref.x_vector())
    assert np.array_equal(y.values, np.array(REF_Z, dtype=np.float64))
    assert y.n == 32
    assert y.N == 32


def test_spmv_small_known_product():
    # row 0: 2*1 + 1*4 = 6; row 1 empty; row 2: 5*3 + 3*2 = 21
    y = spmv_seq(small_matrix(), DenseVector.sequential([1.0, 2.0, 3.0, 4.0]))
    assert y.values.tolist() == [6.0, 0.0, 21.0]


def test_spmv_empty_rows_are_exact_zero(ref):
    y = spmv_seq(ref.matrix(), ref.x_vector())
    empty_rows = [i for i in range(ref.M)
                  if ref.row_ptr[i] == ref.row_ptr[i + 1]]
    assert empty_rows  # the reference instance has some
    for i in empty_rows:
        assert y.values[i] == 0.0


def test_spmv_zero_row_matrix():
    mat = CsrMatrix(m=0, n=4, M=8, N=4, rstart=3, cstart=0,
                    row_ptr=[0], col_idx=[], values=[])
    y = spmv_seq(mat, DenseVector.sequential([1.0, 2.0, 3.0, 4.0]))
    assert y.values.shape == (0,)
    assert y.N == 8


def test_spmv_rejects_short_x():
    with pytest.raises(SizeMismatch):
        spmv_seq(small_matrix(), DenseVector.sequential([1.0, 2.0]))


def test_spmv_sums_duplicate_cells():
    # kernel tolerates duplicates; contributions add in storage order
    mat = CsrMatrix.sequential([0, 2], [1, 1], [2.0, 3.0], n=2)
    y = spmv_seq(mat, DenseVector.sequential([0.0, 10.0]))
    assert y.values.tolist() == [50.0]


def test_spmv_accumulates_left_to_right():
    # same entry multiset, different storage order, different float result:
    # (1e16 - 1e16) + 1 == 1 but (1 - 1e16) + 1e16 == 0 in float64
    forward = CsrMatrix.sequential([0, 3], [0, 1, 2], [1e16, -1e16, 1.0], n=3)
    reversed_ = CsrMatrix.sequential([0, 3], [2, 1, 0], [1.0, -1e16, 1e16], n=3)
    ones = DenseVector.sequential([1.0, 1.0, 1.0])
    assert spmv_seq(forward, ones).values[0] == 1.0
    assert spmv_seq(reversed_, ones).values[0] == 0.0


def test_residual_zero_on_equal(ref):
    z = ref.z_vector()
    assert residual_sq(z, ref.z_vector()) == 0.0


def test_residual_single_entry_difference(ref):
    y = ref.z_vector()
    y.values[0] += 1.0
    assert residual_sq(y, ref.z_vector()) == 1.0


def test_residual_rejects_length_mismatch():
    with pytest.raises(SizeMismatch):
        residual_sq(DenseVector.sequential([1.0]),
                    DenseVector.sequential([1.0, 2.0]))


def test_dense_from_csr_layout():
    dense = dense_from_csr(small_matrix())
    assert dense.values.shape == (3, 4)
    assert dense.values[0, 0] == 2.0
    assert dense.values[0, 3] == 1.0
    assert dense.values[1].tolist() == [0.0, 0.0, 0.0, 0.0]
    assert dense.values[2, 2] == 5.0
    assert dense.values[2, 1] == 3.0


def test_dense_from_csr_rejects_duplicates():
    mat = CsrMatrix.sequential([0, 2], [1, 1], [2.0, 3.0], n=2)
    with pytest.raises(DuplicateEntry):
        dense_from_csr(mat)


def test_dense_from_csr_rejects_invalid():
    mat = CsrMatrix.sequential([1, 2], [0], [1.0], n=2)
    with pytest.raises(ValueError, match="invalid CSR"):
        dense_from_csr(mat)


def test_oracle_matches_kernel_on_reference(ref):
    mat = ref.matrix()
    x = ref.x_vector()
    y = spmv_seq(mat, x)
    oracle = spmv_dense_oracle(dense_from_csr(mat), x)
    assert np.array_equal(y.values, oracle.values)


def test_oracle_rejects_width_mismatch():
    dense = dense_from_csr(small_matrix())
    with pytest.raises(SizeMismatch):
        spmv_dense_oracle(dense, DenseVector.sequential([1.0, 2.0]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(1, 24), n=st.integers(1, 24),
       fill=st.integers(0, 6))
def test_kernel_equals_oracle_on_generated(seed, m, n, fill):
    fx = generate(GenParams(M=m, N=n, row_fill=fill, seed=seed))
    mat = fx.matrix()
    x = fx.x_vector()
    y = spmv_seq(mat, x)
    oracle = spmv_dense_oracle(dense_from_csr(mat), x)
    assert np.array_equal(y.values, oracle.values)
    assert np.array_equal(y.values, fx.z)


def test_dense_vector_checks_declared_length():
    with pytest.raises(SizeMismatch):
        DenseVector(n=3, N=3, values=[1.0, 2.0])
    with pytest.raises(SizeMismatch):
        DenseVector(n=3, N=2, values=[1.0, 2.0, 3.0])
