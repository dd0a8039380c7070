"""Independent reference computations used to pin down derived values.

Nothing here imports the package's linear algebra or cochain code.  Algebras
are read through their raw tables only and all arithmetic is done with
fractions.Fraction.
"""

from fractions import Fraction


def frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def dense_rank(rows) -> int:
    """Rank of a list of equal-length rows by plain Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / p
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def sparse_rank(columns) -> int:
    """Rank of sparse columns {row: Fraction}, eliminating on the largest row index."""
    pivots = {}
    rank = 0
    for col in columns:
        v = {k: x for k, x in col.items() if x}
        while v:
            top = max(v)
            if top not in pivots:
                pivots[top] = v
                rank += 1
                break
            p = pivots[top]
            f = v[top] / p[top]
            for k, x in p.items():
                y = v.get(k, 0) - f * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
    return rank


def diff_matrix(A, p):
    """Dense matrix of d: A^p -> A^{p+1}, rows indexed by the target degree."""
    src = [i for i, d in enumerate(A.degrees) if d == p]
    tgt = [i for i, d in enumerate(A.degrees) if d == p + 1]
    return [[frac(A.diff.get(i, {}).get(k, 0)) if A.diff.get(i, {}).get(k) else Fraction(0) for i in src]
            for k in tgt]


def betti(A):
    top = max(A.degrees)
    ranks = {p: dense_rank(diff_matrix(A, p)) for p in range(-1, top + 1)}
    out = []
    for p in range(top + 1):
        dim = sum(1 for d in A.degrees if d == p)
        out.append(dim - ranks[p] - ranks[p - 1])
    return tuple(out)


# -- classical Hochschild complex --------------------------------------------


class ClassicalHochschild:
    """Normalized Hochschild cochains Hom(Bbar^{(x)q}, B), q >= 1, of a
    weight-graded DG algebra, in the unshifted picture.

    A cochain f of arity q and map-degree k has total degree q + k.  The
    differential is

        (D f) = d o f - (-1)^k sum_i (-1)^{|a_1..a_{i-1}|} f(.., d a_i, ..)
                + (-1)^k * b f

    with the usual Hochschild

        (b f)(a_1..a_{q+1}) = (-1)^{k|a_1|} a_1 f(a_2..) + sum_i (-1)^i f(.., a_i a_{i+1}, ..)
                              + (-1)^{q+1} f(a_1..a_q) a_{q+1}.

    All elementary maps are enumerated blindly up to the arity allowed by
    weights alone (q <= max weight - w), so this also checks that no cochain
    lives outside the window used by the package.
    """

    def __init__(self, B):
        self.B = B
        self.deg = B.degrees
        self.wt = B.weights
        self.unit = B.unit
        self.red = [i for i in range(len(B.names)) if i != B.unit]
        self.mult = {k: {o: frac(c) for o, c in v.items()} for k, v in B.mult.items()}
        self.diff = {k: {o: frac(c) for o, c in v.items()} for k, v in B.diff.items()}
        # preimages: which (x, y) products and which d(x) hit a given basis element
        self.mult_pre = {}
        for (x, y), vec in self.mult.items():
            if x == self.unit or y == self.unit:
                continue
            for o, c in vec.items():
                self.mult_pre.setdefault(o, []).append((x, y, c))
        self.diff_pre = {}
        for x, vec in self.diff.items():
            for o, c in vec.items():
                self.diff_pre.setdefault(o, []).append((x, c))
        self._cache = {}

    def elementary(self, w):
        """{n: [(inputs, output)]} for all elementary cochains of weight w."""
        if w in self._cache:
            return self._cache[w]
        maxw = max(self.wt)
        out = {}
        qmax = maxw - w

        def rec(prefix, wsum):
            if prefix:
                q = len(prefix)
                dsum = sum(self.deg[i] for i in prefix)
                for o in range(len(self.deg)):
                    if self.wt[o] - wsum == w:
                        n = q + self.deg[o] - dsum
                        out.setdefault(n, []).append((tuple(prefix), o))
            if len(prefix) == qmax:
                return
            for i in self.red:
                if wsum + self.wt[i] <= maxw - w:
                    prefix.append(i)
                    rec(prefix, wsum + self.wt[i])
                    prefix.pop()

        rec([], 0)
        for n in out:
            out[n].sort()
        self._cache[w] = out
        return out

    def image(self, inputs, o):
        """D of the elementary cochain inputs -> o, as {(inputs', o'): c}."""
        q = len(inputs)
        k = self.deg[o] - sum(self.deg[i] for i in inputs)
        sk = -1 if k % 2 else 1
        res = {}

        def put(key, c):
            v = res.get(key, 0) + c
            if v:
                res[key] = v
            else:
                res.pop(key, None)

        for o2, c in self.diff.get(o, {}).items():
            put((inputs, o2), c)
        pre = 0
        for i, a in enumerate(inputs):
            s = -sk * (-1 if pre % 2 else 1)
            for x, c in self.diff_pre.get(a, []):
                if x != self.unit:
                    put((inputs[:i] + (x,) + inputs[i + 1:], o), s * c)
            pre += self.deg[a]
        for a in self.red:
            s = sk * (-1 if (k * self.deg[a]) % 2 else 1)
            for o2, c in self.mult.get((a, o), {}).items():
                put(((a,) + inputs, o2), s * c)
            s = sk * (-1 if (q + 1) % 2 else 1)
            for o2, c in self.mult.get((o, a), {}).items():
                put((inputs + (a,), o2), s * c)
        for i, a in enumerate(inputs):
            s = sk * (-1 if (i + 1) % 2 else 1)
            for x, y, c in self.mult_pre.get(a, []):
                put((inputs[:i] + (x, y) + inputs[i + 1:], o), s * c)
        return res

    def matrix(self, n, w):
        """Columns of D from degree n into degree n + 1, in the target's enumeration."""
        el = self.elementary(w)
        tgt = {b: r for r, b in enumerate(el.get(n + 1, []))}
        cols = []
        for inputs, o in el.get(n, []):
            col = {}
            for key, c in self.image(inputs, o).items():
                col[tgt[key]] = c
            cols.append(col)
        return cols

    def square_is_zero(self, n, w) -> bool:
        el = self.elementary(w)
        for inputs, o in el.get(n, []):
            total = {}
            for key, c in self.image(inputs, o).items():
                for key2, c2 in self.image(*key).items():
                    total[key2] = total.get(key2, 0) + c * c2
            if any(total.values()):
                return False
        return True

    def dims(self, w, degrees):
        """{n: dim HH^n_w} from the whole assembled weight-w complex."""
        el = self.elementary(w)
        ns = sorted(el)
        lo, hi = min(ns + list(degrees)), max(ns + list(degrees))
        rank = {n: sparse_rank(self.matrix(n, w)) for n in range(lo - 1, hi + 1)}
        return {n: len(el.get(n, [])) - rank[n] - rank[n - 1] for n in degrees}

    def slice_dim(self, n, w) -> int:
        return len(self.elementary(w).get(n, []))
