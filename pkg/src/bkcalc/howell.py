"""Canonical-form linear algebra over Z/p^N.

A ``SpanModule`` is a submodule of (Z/p^N)^C held in Howell normal form:
pivot entries are powers of p with strictly increasing pivot columns,
entries above a pivot are reduced modulo it, and the row span is closed
under the annihilator rule (p^{N-a} times a pivot-a row lies in the span
of later rows).  Over the chain ring Z/p^N this form is unique for the
span, so span equality is array equality and membership is one
reduction sweep.

Rows are numpy arrays: int64 while p^N stays below 2^31 (so products of
two reduced residues cannot overflow), arbitrary-precision Python ints
in an object array beyond that.
"""

from __future__ import annotations

import numpy as np

_INT64_CAP = 1 << 31


def _dtype_for(pN: int):
    return np.int64 if pN < _INT64_CAP else object


def _as_matrix(rows, C: int, dtype):
    mat = np.zeros((len(rows), C), dtype=dtype)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if x:
                mat[i, j] = x
    return mat


def _argmin_valuation(v, p: int) -> tuple[int, int]:
    """Index of a minimal-p-valuation entry among nonzero residues, with its
    valuation.  Ties break to the lowest index, keeping the form canonical."""
    rem = v
    a = 0
    while True:
        nz = np.flatnonzero(rem % p != 0)
        if nz.size:
            return int(nz[0]), a
        rem = rem // p
        a += 1


def _valuation_matrix(B, p: int, N: int):
    """Elementwise ord_p of residues, with N standing in for +infinity."""
    out = np.full(B.shape, N, dtype=np.int64)
    rem = B.copy()
    active = rem != 0
    a = 0
    while active.any() and a < N:
        stop = active & (rem % p != 0)
        out[stop] = a
        active &= ~stop
        rem = np.where(active, rem // p, 0)
        a += 1
    return out


class SpanModule:
    """Howell-form submodule of (Z/p^N)^C."""

    __slots__ = ("p", "N", "C", "pN", "dtype", "rows", "piv_cols", "piv_vals")

    def __init__(self, p, N, C, rows, piv_cols, piv_vals):
        self.p = p
        self.N = N
        self.C = C
        self.pN = p**N
        self.dtype = _dtype_for(self.pN)
        self.rows = rows
        self.piv_cols = piv_cols
        self.piv_vals = piv_vals

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, p: int, N: int, C: int, rows, close_under_shift: bool = False):
        """Span of the given coefficient rows; with ``close_under_shift`` the
        generating set is enlarged by all right-shifts (multiplication by u),
        which turns series generators into the full ideal image."""
        pN = p**N
        dtype = _dtype_for(pN)
        base = _as_matrix(list(rows), C, dtype) % pN
        if close_under_shift:
            # enlarge by all u-shifts (cheap relative to elimination)
            blocks = [base]
            cur = base
            for _ in range(1, C):
                nxt = np.zeros_like(cur)
                nxt[:, 1:] = cur[:, :-1]
                keep = nxt.any(axis=1)
                nxt = nxt[keep]
                if nxt.shape[0] == 0:
                    break
                blocks.append(nxt)
                cur = nxt
            base = np.vstack(blocks)
        rows_, cols_, vals_ = _howell(base, p, N, pN)
        return cls(p, N, C, rows_, cols_, vals_)

    @classmethod
    def from_staircase(cls, p: int, N: int, C: int, column_vals):
        """Module spanned by {p^{a_c} e_c}: already in Howell form provided
        every a_c < N and the rows need no mutual reduction (true for a
        monomial staircase)."""
        pN = p**N
        dtype = _dtype_for(pN)
        cols = [c for c, a in enumerate(column_vals) if a < N]
        rows = np.zeros((len(cols), C), dtype=dtype)
        vals = []
        for i, c in enumerate(cols):
            a = int(column_vals[c])
            rows[i, c] = p**a
            vals.append(a)
        return cls(p, N, C, rows % pN, cols, vals)

    # -- queries -------------------------------------------------------

    def reduce(self, vecs):
        """Canonical residues of row vectors against the basis."""
        V = _as_matrix(list(vecs), self.C, self.dtype) % self.pN
        p, pN = self.p, self.pN
        for row, c, a in zip(self.rows, self.piv_cols, self.piv_vals):
            col = V[:, c]
            if not col.any():
                continue
            qs = col // (p**a)
            V = (V - qs[:, None] * row[None, :]) % pN
        return V

    def contains_each(self, vecs) -> list[bool]:
        R = self.reduce(vecs)
        return [not R[i].any() for i in range(R.shape[0])]

    def contains_all(self, vecs) -> bool:
        return not self.reduce(vecs).any()

    def equals(self, other: "SpanModule") -> bool:
        return (
            self.p == other.p
            and self.N == other.N
            and self.C == other.C
            and self.piv_cols == other.piv_cols
            and self.piv_vals == other.piv_vals
            and self.rows.shape == other.rows.shape
            and bool((self.rows == other.rows).all())
        )

    def log_index(self) -> int:
        """log_p of the index of the span in (Z/p^N)^C."""
        return self.N * self.C - sum(self.N - a for a in self.piv_vals)

    def column_min_valuations(self):
        """Per column, the least p-valuation over the whole span (= over the
        basis rows), with N for columns the span misses entirely."""
        if self.rows.shape[0] == 0:
            return np.full(self.C, self.N, dtype=np.int64)
        return _valuation_matrix(self.rows, self.p, self.N).min(axis=0)

    def pivot_val_at(self, c: int) -> int:
        """Valuation of the pivot in column c (N if that column has none)."""
        try:
            i = self.piv_cols.index(c)
        except ValueError:
            return self.N
        return self.piv_vals[i]

    def colon_p_rows(self):
        """Generating rows of {v : p·v in span}, via a Howell form of the
        stacked system [p·I | I; rows | 0] read off on the left block."""
        p, N, C, pN = self.p, self.N, self.C, self.pN
        dtype = self.dtype
        top = np.zeros((C, 2 * C), dtype=dtype)
        for i in range(C):
            top[i, i] = p
            top[i, C + i] = 1
        bottom = np.zeros((self.rows.shape[0], 2 * C), dtype=dtype)
        bottom[:, :C] = self.rows
        stacked = np.vstack([top, bottom])
        rows_, cols_, _ = _howell(stacked, p, N, pN)
        out = [rows_[i, C:] for i in range(rows_.shape[0]) if cols_[i] >= C]
        return out

    def reduced_mod(self, N2: int):
        """Row generators of the span's image in (Z/p^{N2})^C."""
        pN2 = self.p**N2
        return [r % pN2 for r in self.rows]


def _howell(mat, p: int, N: int, pN: int):
    """Howell normal form.  Returns (rows, pivot_cols, pivot_vals) with rows
    ordered by pivot column."""
    k, C = mat.shape
    dtype = mat.dtype
    cap = k + C + 1
    work = np.zeros((cap, C), dtype=dtype)
    if k:
        work[:k] = mat
    n_work = k
    basis = []
    piv_cols: list[int] = []
    piv_vals: list[int] = []
    for c in range(C):
        col = work[:n_work, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        j, a = _argmin_valuation(col[nz], p)
        pivot_idx = int(nz[j])
        pa = p**a
        row = work[pivot_idx].copy()
        unit = int(row[c]) // pa
        if unit != 1:
            row = (row * pow(unit, -1, pN)) % pN
        others = np.delete(nz, j)
        if others.size:
            qs = work[others, c] // pa
            work[others] = (work[others] - qs[:, None] * row[None, :]) % pN
        work[pivot_idx] = 0
        if a > 0:
            ann = (row * (p ** (N - a))) % pN
            if ann.any():
                work[n_work] = ann
                n_work += 1
        basis.append(row)
        piv_cols.append(c)
        piv_vals.append(a)
    if not basis:
        return np.zeros((0, C), dtype=dtype), [], []
    B = np.vstack(basis)
    for i in range(1, len(piv_cols)):
        c, a = piv_cols[i], piv_vals[i]
        pa = p**a
        qs = B[:i, c] // pa
        if qs.any():
            B[:i] = (B[:i] - qs[:, None] * B[i][None, :]) % pN
    return B, piv_cols, piv_vals
