"""Sparse exact linear algebra over QQ, QQ[t] and QQ(t).

Vectors are plain dicts {index: nonzero scalar}.  Matrices are immutable
sparse maps (row, col) -> scalar tagged with a domain.  Elimination is
column-incremental: a column is reduced against the stored pivots (pivot row =
lowest nonzero row index) and either becomes a new pivot or a dependency.
This gives the deterministic "lowest row, then lowest column" rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .scalars import QQ, QQ_T, Domain, DomainKind


class Matrix:
    __slots__ = ("rows", "cols", "domain", "_entries")

    def __init__(self, rows: int, cols: int, entries=None, domain: Domain = QQ):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        self.domain = domain
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            if v:
                clean[(r, c)] = v
        self._entries = clean

    @classmethod
    def from_rows(cls, data, domain: Domain = QQ, cols: int | None = None):
        data = [list(row) for row in data]
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        entries = {}
        for r, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                v = domain.convert(v)
                if v:
                    entries[(r, c)] = v
        return cls(len(data), ncols, entries, domain)

    @classmethod
    def from_columns(cls, columns, rows: int, domain: Domain = QQ):
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(rows, len(columns), entries, domain)

    @classmethod
    def identity(cls, n: int, domain: Domain = QQ):
        return cls(n, n, {(i, i): domain.one for i in range(n)}, domain)

    def __getitem__(self, rc):
        return self._entries.get(rc, self.domain.zero)

    def entries(self):
        return dict(self._entries)

    def nnz(self) -> int:
        return len(self._entries)

    def to_dense(self):
        out = [[self.domain.zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def columns(self) -> list[dict]:
        cols = [{} for _ in range(self.cols)]
        for (r, c), v in self._entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self) -> list[dict]:
        rows = [{} for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            rows[r][c] = v
        return rows

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()}, self.domain)

    def is_zero(self) -> bool:
        return not self._entries

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        if self.domain is not other.domain:
            raise DomainError(f"domain mismatch {self.domain.tag} vs {other.domain.tag}")
        orows = other.row_dicts()
        acc = {}
        for (r, k), a in self._entries.items():
            for c, b in orows[k].items():
                key = (r, c)
                acc[key] = acc.get(key, self.domain.zero) + a * b
        return Matrix(self.rows, other.cols, acc, self.domain)

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector."""
        out = {}
        for (r, c), a in self._entries.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, self.domain.zero) + a * x
        return {k: v for k, v in out.items() if v}

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.domain.tag}, nnz={len(self._entries)})"

    def convert(self, domain: Domain) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: domain.convert(v) for k, v in self._entries.items()}, domain)

    def format_rows(self):
        return [[self.domain.format(v) for v in row] for row in self.to_dense()]


def _require_field(domain: Domain):
    if not domain.is_field:
        raise DomainError(f"{domain.tag} is not a field; lift to QQ(t) or use smith_normal_form")


def _axpy(v: dict, a, w: dict):
    """v += a*w in place, dropping zeros."""
    for k, x in w.items():
        y = v.get(k)
        y = a * x if y is None else y + a * x
        if y:
            v[k] = y
        else:
            v.pop(k, None)


class Echelon:
    """Incrementally built column echelon form over a field.

    Each stored pivot vector has its lowest nonzero index equal to its pivot,
    with pivot entry 1.  With ``track=True`` every pivot remembers its
    expression as a combination of the inserted columns.
    """

    def __init__(self, domain: Domain, track: bool = False):
        _require_field(domain)
        self.domain = domain
        self.track = track
        self.pivots: dict[int, tuple[dict, dict | None]] = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict, combo: dict | None = None):
        """Reduce vec against the pivots.  Returns (residual, combo) with
        vec = residual + sum(combo[label] * column[label]); the residual is
        supported on non-pivot rows only."""
        v = dict(vec)
        c = {} if combo is None else combo
        residual = {}
        while v:
            r = min(v)
            piv = self.pivots.get(r)
            if piv is None:
                residual[r] = v.pop(r)
                continue
            a = v[r]
            pvec, pcombo = piv
            _axpy(v, -a, pvec)
            if pcombo is not None:
                _axpy(c, a, pcombo)
        return residual, c

    def add(self, vec: dict, label=None) -> bool:
        """Insert a column; True when it increased the rank."""
        idx = self.count if label is None else label
        self.count += 1
        res, combo = self.reduce(vec, {} if self.track else None)
        if not res:
            return False
        self._insert(res, combo, idx)
        return True

    def _insert(self, res: dict, combo, idx):
        r = min(res)
        inv = self.domain.one / res[r]
        pvec = {k: x * inv for k, x in res.items()}
        pcombo = None
        if self.track:
            # res = vec - sum(combo * cols)  =>  pvec = inv * (e_idx - combo)
            pcombo = {k: -x * inv for k, x in combo.items()}
            pcombo[idx] = pcombo.get(idx, self.domain.zero) + inv
            pcombo = {k: x for k, x in pcombo.items() if x}
        self.pivots[r] = (pvec, pcombo)

    def contains(self, vec: dict) -> bool:
        res, _ = self.reduce(vec)
        return not res


def _as_vec(b, domain):
    if isinstance(b, dict):
        return {k: domain.convert(v) for k, v in b.items() if v}
    if isinstance(b, Matrix):
        return {r: v for (r, c), v in b.entries().items()}
    return {i: domain.convert(v) for i, v in enumerate(b) if v}


def solve_linear(A: Matrix, b):
    """Some x with A x = b (dense list), or None when inconsistent.

    Deterministic: only pivot columns receive nonzero values.
    """
    _require_field(A.domain)
    bvec = _as_vec(b, A.domain)
    if bvec and max(bvec) >= A.rows:
        raise ValueError("right-hand side longer than the row count")
    if isinstance(b, (list, tuple)) and len(b) != A.rows:
        raise ValueError("right-hand side length does not match the row count")
    ech = Echelon(A.domain, track=True)
    for j, col in enumerate(A.columns()):
        ech.add(col, j)
    res, combo = ech.reduce(bvec, {})
    if res:
        return None
    x = [A.domain.zero] * A.cols
    for j, v in combo.items():
        x[j] = v
    return x


def solve_sparse(columns: list[dict], b: dict, domain: Domain):
    """Sparse variant of solve_linear: returns {col: value} or None."""
    ech = Echelon(domain, track=True)
    for j, col in enumerate(columns):
        ech.add(col, j)
    res, combo = ech.reduce(b, {})
    return None if res else combo


def kernel_basis(A: Matrix) -> list[list]:
    """Basis of {x : A x = 0}; one vector per dependent column."""
    _require_field(A.domain)
    ech = Echelon(A.domain, track=True)
    basis = []
    zero = A.domain.zero
    for j, col in enumerate(A.columns()):
        res, combo = ech.reduce(col, {})
        if res:
            ech.add(col, j)
            continue
        # col = sum combo * cols  =>  e_j - combo is in the kernel
        x = [zero] * A.cols
        for k, v in combo.items():
            x[k] = -v
        x[j] = A.domain.one
        basis.append(x)
        ech.count += 1
    return basis


def sparse_kernel(columns: list[dict], domain: Domain) -> list[dict]:
    ech = Echelon(domain, track=True)
    basis = []
    for j, col in enumerate(columns):
        res, combo = ech.reduce(col, {})
        ech.count += 1
        if res:
            ech._insert(res, combo, j)
            continue
        x = {k: -v for k, v in combo.items()}
        x[j] = domain.one
        basis.append(x)
    return basis


def rank(A: Matrix) -> int:
    dom = A.domain
    if not dom.is_field:
        A = A.convert(dom.field)
        dom = dom.field
    ech = Echelon(dom)
    for col in A.columns():
        ech.add(col)
    return ech.rank


def sparse_rank(columns, domain: Domain) -> int:
    ech = Echelon(domain)
    for col in columns:
        ech.add(col)
    return ech.rank


def image_basis(A: Matrix) -> list[int]:
    """Indices of the pivot columns (a basis of the column space)."""
    _require_field(A.domain)
    ech = Echelon(A.domain)
    return [j for j, col in enumerate(A.columns()) if ech.add(col)]


def det(A: Matrix):
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    dom = A.domain
    F = dom.field
    rows = [dict((c, F.convert(v)) for c, v in r.items()) for r in A.row_dicts()]
    sign = F.one
    acc = F.one
    n = A.rows
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i].get(k)), None)
        if piv is None:
            return dom.zero
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        p = rows[k][k]
        acc = acc * p
        inv = F.one / p
        for i in range(k + 1, n):
            a = rows[i].get(k)
            if a:
                _axpy(rows[i], -a * inv, rows[k])
    return dom.convert(sign * acc)


# -- Smith normal form over QQ[t] ------------------------------------------


@dataclass(frozen=True)
class SNFResult:
    U: Matrix
    D: Matrix
    V: Matrix

    def diagonal(self) -> list:
        n = min(self.D.rows, self.D.cols)
        return [self.D[i, i] for i in range(n)]

    def invariant_factors(self) -> list:
        return [x for x in self.diagonal() if x]


def _require_poly(A: Matrix):
    if A.domain.kind is not DomainKind.POLY_T:
        raise DomainError(f"Smith normal form needs QQ[t] entries, got {A.domain.tag}")


def _snf_dense(D, U, V):
    """In-place SNF of a dense QQ[t] matrix; U, V (or None) record the row
    and column operations."""
    m = len(D)
    n = len(D[0]) if m else 0
    zero = QQ_T.zero

    def deg(x):
        return x.degree() if x else 10**9

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def row_op(i, k, q):  # row_i -= q * row_k
        Di, Dk = D[i], D[k]
        for c in range(n):
            if Dk[c]:
                Di[c] = Di[c] - q * Dk[c]
        if U is not None:
            Ui, Uk = U[i], U[k]
            for c in range(len(Ui)):
                if Uk[c]:
                    Ui[c] = Ui[c] - q * Uk[c]

    def col_op(j, k, q):  # col_j -= q * col_k
        for row in D:
            if row[k]:
                row[j] = row[j] - q * row[k]
        if V is not None:
            for row in V:
                if row[k]:
                    row[j] = row[j] - q * row[k]

    for k in range(min(m, n)):
        while True:
            best = None
            for i in range(k, m):
                row = D[i]
                for j in range(k, n):
                    x = row[j]
                    if x and (best is None or deg(x) < best[0]):
                        best = (deg(x), i, j)
                        if best[0] == 0:
                            break
                if best is not None and best[0] == 0:
                    break
            if best is None:
                return
            _, i, j = best
            if i != k:
                swap_rows(i, k)
            if j != k:
                swap_cols(j, k)
            p = D[k][k]
            clean = True
            for i in range(k + 1, m):
                if D[i][k]:
                    q, r = divmod(D[i][k], p)
                    row_op(i, k, q)
                    if r:
                        clean = False
            for j in range(k + 1, n):
                if D[k][j]:
                    q, r = divmod(D[k][j], p)
                    col_op(j, k, q)
                    if r:
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if D[i][j] and divmod(D[i][j], p)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into row k and repeat
            row_op(k, bad, -QQ_T.one)
        lc = D[k][k].LC
        if lc != 1:
            D[k][k] = D[k][k].quo_ground(lc)
            if U is not None:
                U[k] = [x.quo_ground(lc) if x else zero for x in U[k]]


def smith_normal_form(A: Matrix) -> SNFResult:
    """U, D, V over QQ[t] with U A V = D, D diagonal, monic, d_i | d_{i+1}."""
    _require_poly(A)
    D = A.to_dense()
    U = Matrix.identity(A.rows, QQ_T).to_dense()
    V = Matrix.identity(A.cols, QQ_T).to_dense()
    _snf_dense(D, U, V)
    return SNFResult(Matrix.from_rows(U, QQ_T, A.rows), Matrix.from_rows(D, QQ_T, A.cols),
                     Matrix.from_rows(V, QQ_T, A.cols))


def invariant_factors(A: Matrix) -> list:
    """Nonzero monic invariant factors of a QQ[t] matrix, in divisibility order.

    Constant pivots are eliminated first with plain sparse row operations,
    which leaves a (usually small) core for the full Smith reduction.
    """
    _require_poly(A)
    rows = {r: d for r, d in enumerate(A.row_dicts()) if d}
    ones = 0
    while True:
        pick = None
        for r in sorted(rows):
            for c in sorted(rows[r]):
                if rows[r][c].is_ground:
                    pick = (r, c)
                    break
            if pick:
                break
        if pick is None:
            break
        r, c = pick
        prow = rows.pop(r)
        inv = QQ_T.one.quo_ground(prow[c].LC)
        for other in list(rows):
            a = rows[other].get(c)
            if a:
                _axpy(rows[other], -a * inv, prow)
                if not rows[other]:
                    del rows[other]
        ones += 1
    if not rows:
        return [QQ_T.one] * ones
    cols = sorted({c for d in rows.values() for c in d})
    cidx = {c: i for i, c in enumerate(cols)}
    dense = [[QQ_T.zero] * len(cols) for _ in rows]
    for i, r in enumerate(sorted(rows)):
        for c, v in rows[r].items():
            dense[i][cidx[c]] = v
    _snf_dense(dense, None, None)
    core = [dense[i][i] for i in range(min(len(dense), len(cols))) if dense[i][i]]
    return [QQ_T.one] * ones + core


def inverse(A: Matrix) -> Matrix:
    """Inverse over the fraction field, converted back into A's domain."""
    if A.rows != A.cols:
        raise ValueError("inverse of a non-square matrix")
    n = A.rows
    F = A.domain.field
    rows = [dict((c, F.convert(v)) for c, v in r.items()) for r in A.row_dicts()]
    for i in range(n):
        rows[i][n + i] = F.one
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i].get(k)), None)
        if piv is None:
            raise DomainError("matrix is singular")
        rows[k], rows[piv] = rows[piv], rows[k]
        inv = F.one / rows[k][k]
        rows[k] = {c: v * inv for c, v in rows[k].items()}
        for i in range(n):
            if i != k and rows[i].get(k):
                _axpy(rows[i], -rows[i][k], rows[k])
    entries = {}
    for i in range(n):
        for c, v in rows[i].items():
            if c >= n:
                entries[(i, c - n)] = A.domain.convert(v)
    return Matrix(n, n, entries, A.domain)
