"""Exact linear algebra over Z_d, d arbitrary (not necessarily prime).

`solve` decides Ax = b (mod d) and always returns either a verified
solution or a verified infeasibility certificate y with y^T A = 0 and
y^T b != 0 (mod d).  Prime moduli go through row reduction (a packed
bitset path for d = 2, dense int64 otherwise); composite moduli are lifted
to the integers and routed through Smith normal form.  Row reductions and
Smith forms are cached per matrix, so repeated solves against the same
system with different right-hand sides are cheap.

No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % f == 0:
            return False
        f += 1
    return True


class ModMatrix:
    """Sparse matrix over Z_d, stored row-wise; immutable by convention."""

    def __init__(self, rows: int, cols: int, d: int, rows_data: list[dict[int, int]] | None = None):
        if d < 2:
            raise InvalidInput("modulus must be >= 2")
        self.rows = rows
        self.cols = cols
        self.d = d
        data = rows_data if rows_data is not None else [{} for _ in range(rows)]
        if len(data) != rows:
            raise InvalidInput("row data length mismatch")
        self.rows_data = [
            {c: v % d for c, v in row.items() if v % d} for row in data
        ]

    @classmethod
    def from_dense(cls, dense, d: int) -> "ModMatrix":
        arr = np.asarray(dense)
        rows_data = [
            {int(j): int(arr[i, j]) for j in np.nonzero(arr[i] % d)[0]}
            for i in range(arr.shape[0])
        ]
        return cls(arr.shape[0], arr.shape[1], d, rows_data)

    @classmethod
    def identity(cls, n: int, d: int) -> "ModMatrix":
        return cls(n, n, d, [{i: 1} for i in range(n)])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i, row in enumerate(self.rows_data):
            for j, v in row.items():
                out[i, j] = v
        return out

    def transpose(self) -> "ModMatrix":
        rows_data: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for i, row in enumerate(self.rows_data):
            for j, v in row.items():
                rows_data[j][i] = v
        return ModMatrix(self.cols, self.rows, self.d, rows_data)

    def take_rows(self, indices: Sequence[int]) -> "ModMatrix":
        return ModMatrix(len(indices), self.cols, self.d,
                         [dict(self.rows_data[i]) for i in indices])

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        out = np.zeros(self.rows, dtype=np.int64)
        for i, row in enumerate(self.rows_data):
            out[i] = sum(v * int(x[j]) for j, v in row.items()) % self.d
        return out

    def rmatvec(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        out = np.zeros(self.cols, dtype=np.int64)
        for i, row in enumerate(self.rows_data):
            yi = int(y[i])
            if yi % self.d:
                for j, v in row.items():
                    out[j] += yi * v
        return out % self.d

    def key(self) -> tuple:
        return (
            self.d, self.rows, self.cols,
            tuple(tuple(sorted(row.items())) for row in self.rows_data),
        )

    def __repr__(self):
        nnz = sum(len(r) for r in self.rows_data)
        return f"ModMatrix({self.rows}x{self.cols}, d={self.d}, nnz={nnz})"


@dataclass
class SolveResult:
    """Either a solution x with Ax = b, or a certificate y with yA = 0, yb != 0."""

    solution: np.ndarray | None
    certificate: np.ndarray | None

    @property
    def feasible(self) -> bool:
        return self.solution is not None


# ---------------------------------------------------------------------------
# GF(2) packed row reduction.

class _GF2Echelon:
    """Forward-eliminated system over GF(2) with optional row-operation tracker."""

    def __init__(self, A: ModMatrix, tracker: bool):
        m, n = A.rows, A.cols
        self.m, self.n = m, n
        self.data_words = max(1, (n + 63) // 64)
        aux_bits = 1 + (m if tracker else 0)
        self.words = self.data_words + (aux_bits + 63) // 64
        self.tracker = tracker
        M = np.zeros((m, self.words), dtype=np.uint64)
        for i, row in enumerate(A.rows_data):
            for j in row:
                M[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
            if tracker:
                b = 1 + i
                M[i, self.data_words + (b >> 6)] |= np.uint64(1) << np.uint64(b & 63)
        self.M = M
        self.pivots: list[tuple[int, int]] = []
        self.perm = np.arange(m)

    def _col_bits(self, col: int) -> np.ndarray:
        return (self.M[:, col >> 6] >> np.uint64(col & 63)) & np.uint64(1)

    def set_rhs(self, b: np.ndarray):
        # Must be called before eliminate(); rhs bits then travel with rows.
        word = self.data_words
        self.M[:, word] &= ~np.uint64(1)
        on = np.nonzero(np.asarray(b, dtype=np.int64) % 2)[0]
        self.M[on, word] |= np.uint64(1)

    def eliminate(self):
        r = 0
        for col in range(self.n):
            bits = self._col_bits(col)
            cand = np.nonzero(bits[r:])[0]
            if cand.size == 0:
                continue
            p = r + int(cand[0])
            if p != r:
                self.M[[r, p]] = self.M[[p, r]]
                self.perm[[r, p]] = self.perm[[p, r]]
            mask = self._col_bits(col).astype(bool)
            mask[r] = False
            if mask.any():
                self.M[mask] ^= self.M[r]
            self.pivots.append((col, r))
            r += 1
        self.rank = r

    def back_eliminate(self):
        for col, r in reversed(self.pivots):
            mask = self._col_bits(col).astype(bool)
            mask[r] = False
            if mask.any():
                self.M[mask] ^= self.M[r]

    def rhs_bit(self, i: int) -> int:
        return int(self.M[i, self.data_words] & np.uint64(1))

    def tracker_row(self, i: int) -> np.ndarray:
        y = np.zeros(self.m, dtype=np.int64)
        for j in range(self.m):
            b = 1 + j
            if self.M[i, self.data_words + (b >> 6)] >> np.uint64(b & 63) & np.uint64(1):
                y[j] = 1
        return y

    def data_row_and(self, i: int, xw: np.ndarray) -> int:
        return int(np.bitwise_count(self.M[i, : self.data_words] & xw).sum() & 1)


def _solve_gf2(A: ModMatrix, b: np.ndarray) -> SolveResult:
    ech = _GF2Echelon(A, tracker=True)
    ech.set_rhs(b)
    ech.eliminate()
    for i in range(ech.rank, ech.m):
        if ech.rhs_bit(i):
            return SolveResult(None, ech.tracker_row(i))
    xw = np.zeros(ech.data_words, dtype=np.uint64)
    x = np.zeros(A.cols, dtype=np.int64)
    for col, r in reversed(ech.pivots):
        val = ech.rhs_bit(r) ^ ech.data_row_and(r, xw)
        if val:
            x[col] = 1
            xw[col >> 6] |= np.uint64(1) << np.uint64(col & 63)
    return SolveResult(x, None)


def _kernel_gf2(A: ModMatrix) -> list[np.ndarray]:
    ech = _GF2Echelon(A, tracker=False)
    ech.eliminate()
    ech.back_eliminate()
    pivot_cols = {col: r for col, r in ech.pivots}
    basis = []
    for free in range(A.cols):
        if free in pivot_cols:
            continue
        v = np.zeros(A.cols, dtype=np.int64)
        v[free] = 1
        fw, fb = free >> 6, np.uint64(free & 63)
        for col, r in ech.pivots:
            if (ech.M[r, fw] >> fb) & np.uint64(1):
                v[col] = 1
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Dense row reduction mod an odd prime, cached per matrix.

class _PrimeRREF:
    def __init__(self, A: ModMatrix):
        d = A.d
        m, n = A.rows, A.cols
        R = A.to_dense() % d
        T = np.eye(m, dtype=np.int64)
        pivots: list[tuple[int, int]] = []
        r = 0
        for col in range(n):
            cand = np.nonzero(R[r:, col])[0]
            if cand.size == 0:
                continue
            p = r + int(cand[0])
            if p != r:
                R[[r, p]] = R[[p, r]]
                T[[r, p]] = T[[p, r]]
            inv = pow(int(R[r, col]), -1, d)
            R[r] = (R[r] * inv) % d
            T[r] = (T[r] * inv) % d
            mask = R[:, col] != 0
            mask[r] = False
            if mask.any():
                f = R[mask, col][:, None]
                R[mask] = (R[mask] - f * R[r]) % d
                T[mask] = (T[mask] - f * T[r]) % d
            pivots.append((col, r))
            r += 1
        self.R, self.T, self.pivots, self.rank = R, T, pivots, r
        self.d, self.m, self.n = d, m, n

    def solve(self, b: np.ndarray) -> SolveResult:
        c = (self.T @ (np.asarray(b, dtype=np.int64) % self.d)) % self.d
        for i in range(self.rank, self.m):
            if c[i]:
                return SolveResult(None, self.T[i] % self.d)
        x = np.zeros(self.n, dtype=np.int64)
        for col, r in self.pivots:
            x[col] = c[r]
        return SolveResult(x, None)

    def kernel(self) -> list[np.ndarray]:
        pivot_cols = {col for col, _ in self.pivots}
        basis = []
        for free in range(self.n):
            if free in pivot_cols:
                continue
            v = np.zeros(self.n, dtype=np.int64)
            v[free] = 1
            for col, r in self.pivots:
                v[col] = (-self.R[r, free]) % self.d
            basis.append(v)
        return basis


# ---------------------------------------------------------------------------
# Smith normal form over the integers (exact, arbitrary precision).

def _obj_eye(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def smith_normal_form(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """U A V = D with U, V unimodular and D diagonal, d1 | d2 | ... .

    Entries are Python integers (exact).  Pivots are chosen by minimal
    absolute value with (row, col) tie-breaks, so the result is
    deterministic.
    """
    D = np.array(A, dtype=object, copy=True)
    if D.ndim != 2:
        raise InvalidInput("Smith normal form needs a 2-d matrix")
    m, n = D.shape
    U = _obj_eye(m)
    V = _obj_eye(n)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]

    k = 0
    limit = min(m, n)
    while k < limit:
        sub = D[k:, k:]
        nz = np.nonzero(sub)
        if nz[0].size == 0:
            break
        bi, bj = min(zip(nz[0].tolist(), nz[1].tolist()),
                     key=lambda ij: (abs(sub[ij[0], ij[1]]), ij[0], ij[1]))
        swap_rows(k, k + bi)
        swap_cols(k, k + bj)
        if D[k, k] < 0:
            D[k] = -D[k]
            U[k] = -U[k]
        while True:
            col = D[k + 1:, k]
            if np.any(col != 0):
                q = np.array([c // D[k, k] for c in col], dtype=object)
                D[k + 1:] = D[k + 1:] - q[:, None] * D[k][None, :]
                U[k + 1:] = U[k + 1:] - q[:, None] * U[k][None, :]
                col = D[k + 1:, k]
                if np.any(col != 0):
                    rows = [i for i in range(len(col)) if col[i] != 0]
                    pick = min(rows, key=lambda i: (abs(col[i]), i))
                    swap_rows(k, k + 1 + pick)
                    continue
            row = D[k, k + 1:]
            if np.any(row != 0):
                q = np.array([c // D[k, k] for c in row], dtype=object)
                D[:, k + 1:] = D[:, k + 1:] - D[:, k][:, None] * q[None, :]
                V[:, k + 1:] = V[:, k + 1:] - V[:, k][:, None] * q[None, :]
                row = D[k, k + 1:]
                if np.any(row != 0):
                    cols = [j for j in range(len(row)) if row[j] != 0]
                    pick = min(cols, key=lambda j: (abs(row[j]), j))
                    swap_cols(k, k + 1 + pick)
                    continue
            break
        k += 1

    # Enforce the divisibility chain d1 | d2 | ... by folding offending
    # entries back into the active corner and re-clearing.
    i = 0
    while i < limit - 1:
        a, b = D[i, i], D[i + 1, i + 1]
        if a != 0 and b % a != 0:
            D[:, i] = D[:, i] + D[:, i + 1]
            V[:, i] = V[:, i] + V[:, i + 1]
            # re-clear the 2x2 corner with Euclidean steps
            while True:
                if D[i + 1, i] != 0:
                    if D[i, i] == 0 or (D[i + 1, i] != 0 and abs(D[i + 1, i]) < abs(D[i, i])):
                        swap_rows(i, i + 1)
                    q = D[i + 1, i] // D[i, i]
                    D[i + 1] = D[i + 1] - q * D[i]
                    U[i + 1] = U[i + 1] - q * U[i]
                    if D[i + 1, i] != 0:
                        continue
                if D[i, i + 1] != 0:
                    q = D[i, i + 1] // D[i, i]
                    D[:, i + 1] = D[:, i + 1] - q * D[:, i]
                    V[:, i + 1] = V[:, i + 1] - q * V[:, i]
                    if D[i, i + 1] != 0:
                        swap_cols(i, i + 1)
                        continue
                break
            if D[i, i] < 0:
                D[i] = -D[i]
                U[i] = -U[i]
            if D[i + 1, i + 1] < 0:
                D[i + 1] = -D[i + 1]
                U[i + 1] = -U[i + 1]
            i = max(i - 1, 0)
        else:
            i += 1
    return U, D, V


class _SnfSolver:
    """Mod-d solver built on the integer Smith form of the lifted matrix."""

    def __init__(self, A: ModMatrix):
        self.d = A.d
        self.m, self.n = A.rows, A.cols
        U, D, V = smith_normal_form(A.to_dense().astype(object))
        self.rank = int(np.count_nonzero([D[i, i] for i in range(min(self.m, self.n))]))
        self.diag = [int(D[i, i]) for i in range(self.rank)]
        self.U = np.array([[int(v) % self.d for v in row] for row in U], dtype=np.int64)
        self.V = np.array([[int(v) % self.d for v in row] for row in V], dtype=np.int64)

    def solve(self, b: np.ndarray) -> SolveResult:
        d = self.d
        ub = (self.U @ (np.asarray(b, dtype=np.int64) % d)) % d
        for i in range(self.rank):
            g = gcd(self.diag[i], d)
            if ub[i] % g:
                y = ((d // g) * self.U[i]) % d
                return SolveResult(None, y)
        for i in range(self.rank, self.m):
            if ub[i]:
                return SolveResult(None, self.U[i] % d)
        z = np.zeros(self.n, dtype=np.int64)
        for i in range(self.rank):
            g = gcd(self.diag[i], d)
            if g == d:
                continue  # any residue works once divisibility holds
            dd = d // g
            z[i] = ((int(ub[i]) // g) * pow((self.diag[i] // g) % dd, -1, dd)) % dd
        x = (self.V @ z) % d
        return SolveResult(x, None)

    def kernel(self) -> list[np.ndarray]:
        d = self.d
        basis = []
        for i in range(self.rank):
            t = d // gcd(self.diag[i], d)
            if t % d:
                basis.append((self.V[:, i] * t) % d)
        for i in range(self.rank, self.n):
            basis.append(self.V[:, i] % d)
        return basis


# ---------------------------------------------------------------------------
# Public entry points with per-matrix caching.

_CACHE: dict[tuple, object] = {}
_CACHE_CAP = 128


def _factorize(A: ModMatrix):
    if A.d == 2:
        return None  # GF(2) path is fast enough without caching
    key = A.key()
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    solver = _PrimeRREF(A) if is_prime(A.d) else _SnfSolver(A)
    if len(_CACHE) >= _CACHE_CAP:
        _CACHE.clear()
    _CACHE[key] = solver
    return solver


def _solve_raw(A: ModMatrix, b: np.ndarray) -> SolveResult:
    if A.d == 2:
        return _solve_gf2(A, b)
    return _factorize(A).solve(b)


def _verify(A: ModMatrix, b: np.ndarray, res: SolveResult):
    d = A.d
    b = np.asarray(b, dtype=np.int64) % d
    if res.solution is not None:
        assert np.array_equal(A.matvec(res.solution), b), "solver returned a bad solution"
    else:
        y = res.certificate
        assert y is not None
        assert not A.rmatvec(y).any(), "certificate does not annihilate the rows"
        assert int(y @ b) % d != 0, "certificate does not expose the contradiction"


def _minimize_certificate(A: ModMatrix, b: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = A.d
    support = [i for i in range(A.rows) if y[i] % d]
    keep = list(support)
    for i in support:
        if len(keep) <= 1:
            break
        trial = [j for j in keep if j != i]
        res = _solve_raw(A.take_rows(trial), np.asarray(b)[trial])
        if res.certificate is not None:
            keep = trial
    res = _solve_raw(A.take_rows(keep), np.asarray(b)[keep])
    assert res.certificate is not None
    out = np.zeros(A.rows, dtype=np.int64)
    for pos, i in enumerate(keep):
        out[i] = res.certificate[pos] % d
    return out


def solve(A: ModMatrix, b, minimize_certificate: bool = True) -> SolveResult:
    """Decide Ax = b over Z_d; certificates are greedily support-minimized.

    The returned object always verifies: a solution satisfies Ax = b
    exactly, a certificate y satisfies yA = 0 and yb != 0 exactly.
    """
    b = np.asarray(b, dtype=np.int64)
    if b.shape != (A.rows,):
        raise InvalidInput(f"rhs length {b.shape} does not match {A.rows} rows")
    res = _solve_raw(A, b)
    if res.certificate is not None and minimize_certificate:
        res = SolveResult(None, _minimize_certificate(A, b, res.certificate))
    _verify(A, b, res)
    return res


def kernel(A: ModMatrix) -> list[np.ndarray]:
    """Generating set of {x : Ax = 0 mod d}, including torsion directions."""
    if A.d == 2:
        return _kernel_gf2(A)
    return _factorize(A).kernel()


def left_kernel(A: ModMatrix) -> list[np.ndarray]:
    return kernel(A.transpose())


def clear_cache():
    _CACHE.clear()
