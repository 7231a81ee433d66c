"""Dense matrices, polynomial matrices, and Hankel windows over a prime field.

Entries are Python ints in [0, p).  The matrix product kernel is
pluggable: "school" computes exact integer dot products against a
transposed right factor, "packed" encodes rows of the right factor as
big integers so one output row costs a few big-int multiply-adds.
Polynomial matrices store dense coefficient lists per entry and multiply
either entry-by-entry or through the same big-int packing, in which case
an entire entry-product is a single integer multiplication.

A Hankel matrix is kept as its defining antidiagonal sequence; a
Hankel-vector product is one polynomial convolution.
"""

from operator import mul as _mul

from .errors import DimensionMismatch
from .field import conv_width, pack_ints, poly_mul, poly_trim, unpack_ints

# Above this many scalar multiplications the packed kernels win.
_PACK_THRESHOLD = 8192


class Matrix:
    """Dense rectangular matrix; data is a list of row lists."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, data, cols=None):
        rows = len(data)
        if rows == 0:
            if cols is None:
                cols = 0
        elif cols is None:
            cols = len(data[0])
        p = field.p
        for row in data:
            if len(row) != cols:
                raise DimensionMismatch("ragged row lengths")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = [[v % p for v in row] for row in data]

    @classmethod
    def zero(cls, field, rows, cols):
        m = cls.__new__(cls)
        m.field, m.rows, m.cols = field, rows, cols
        m.data = [[0] * cols for _ in range(rows)]
        return m

    @classmethod
    def identity(cls, field, n):
        m = cls.zero(field, n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def from_cols(cls, field, cols):
        return cls(field, [list(row) for row in zip(*cols)]) if cols else cls(field, [])

    @classmethod
    def random(cls, field, rows, cols, rng):
        p = field.p
        m = cls.__new__(cls)
        m.field, m.rows, m.cols = field, rows, cols
        m.data = [[rng.randrange(p) for _ in range(cols)] for _ in range(rows)]
        return m

    def copy(self):
        m = Matrix.__new__(Matrix)
        m.field, m.rows, m.cols = self.field, self.rows, self.cols
        m.data = [list(row) for row in self.data]
        return m

    def transpose(self):
        m = Matrix.__new__(Matrix)
        m.field, m.rows, m.cols = self.field, self.cols, self.rows
        if self.rows:
            m.data = [list(col) for col in zip(*self.data)]
        else:
            m.data = [[] for _ in range(self.cols)]
        return m

    def row(self, i):
        return list(self.data[i])

    def col(self, j):
        return [row[j] for row in self.data]

    def set_row(self, i, vals):
        if len(vals) != self.cols:
            raise DimensionMismatch("row length mismatch")
        p = self.field.p
        self.data[i] = [v % p for v in vals]

    def set_col(self, j, vals):
        if len(vals) != self.rows:
            raise DimensionMismatch("column length mismatch")
        p = self.field.p
        for i, v in enumerate(vals):
            self.data[i][j] = v % p

    def submatrix(self, row_idx, col_idx):
        """Rows and columns picked in the given order (duplicates allowed)."""
        ri, ci = list(row_idx), list(col_idx)
        sub = Matrix.__new__(Matrix)
        sub.field, sub.rows, sub.cols = self.field, len(ri), len(ci)
        sub.data = [[self.data[i][j] for j in ci] for i in ri]
        return sub

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.field.p == self.field.p
            and other.data == self.data
        )

    def __hash__(self):
        return hash((self.field.p, tuple(map(tuple, self.data))))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, p={self.field.p})"


def mat_vec(a, v):
    """A @ v with exact integer dot products."""
    if a.cols != len(v):
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ vector[{len(v)}]")
    p = a.field.p
    return [sum(map(_mul, row, v)) % p for row in a.data]


def vec_mat(v, a):
    """v @ A treating v as a row vector."""
    if a.rows != len(v):
        raise DimensionMismatch(f"vector[{len(v)}] @ {a.rows}x{a.cols}")
    p = a.field.p
    cols = zip(*a.data) if a.rows else [[] for _ in range(a.cols)]
    return [sum(map(_mul, v, col)) % p for col in cols]


def _matmul_school(a, b, p):
    bt = list(zip(*b.data)) if b.rows else []
    return [[sum(map(_mul, arow, bcol)) % p for bcol in bt] for arow in a.data]


def _matmul_packed(a, b, p):
    width = conv_width(p, a.cols)
    packed = [pack_ints(row, width) for row in b.data]
    out = []
    for arow in a.data:
        acc = 0
        for coef, brow in zip(arow, packed):
            if coef:
                acc += coef * brow
        out.append([v % p for v in unpack_ints(acc, b.cols, width)])
    return out


_MATMUL_KERNELS = {"school": _matmul_school, "packed": _matmul_packed}


def mat_mul(a, b, kernel=None):
    """Matrix product; kernel is "school", "packed", or None for automatic."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    if a.field.p != b.field.p:
        raise ValueError("mixed moduli")
    if kernel is None:
        kernel = "packed" if a.rows * a.cols * b.cols > _PACK_THRESHOLD else "school"
    data = _MATMUL_KERNELS[kernel](a, b, a.field.p)
    out = Matrix.__new__(Matrix)
    out.field, out.rows, out.cols, out.data = a.field, a.rows, b.cols, data
    return out


def _eliminate(aug, n, p):
    """In-place Gauss-Jordan on n x (n+k) augmented rows; False if singular."""
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return False
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [x * inv % p for x in aug[col]]
        prow = aug[col]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], prow)]
    return True


def mat_inv(a):
    """Inverse of a square matrix, or None when the matrix is singular."""
    if a.rows != a.cols:
        raise DimensionMismatch("inverse needs a square matrix")
    n, p = a.rows, a.field.p
    aug = [row + [int(i == j) for j in range(n)] for i, row in enumerate(a.data)]
    if not _eliminate(aug, n, p):
        return None
    out = Matrix.__new__(Matrix)
    out.field, out.rows, out.cols = a.field, n, n
    out.data = [row[n:] for row in aug]
    return out


def solve_many(a, rhs_cols):
    """Solve A x = b for every column in rhs_cols with one elimination.

    Returns the list of solution columns, or None when A is singular.
    """
    if a.rows != a.cols:
        raise DimensionMismatch("solver needs a square matrix")
    n, p = a.rows, a.field.p
    aug = [list(row) + [col[i] for col in rhs_cols] for i, row in enumerate(a.data)]
    if not _eliminate(aug, n, p):
        return None
    return [[aug[i][n + j] for i in range(n)] for j in range(len(rhs_cols))]


# --- polynomial matrices ----------------------------------------------------


class PolyMatrix:
    """Matrix of dense polynomials, truncated to degree <= cap when set.

    data[i][j] is a coefficient list (increasing degree, trailing zeros
    stripped); the zero polynomial is the empty list.
    """

    __slots__ = ("field", "rows", "cols", "cap", "data")

    def __init__(self, field, data, cap=None, cols=None):
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        p = field.p
        norm = []
        for row in data:
            if len(row) != cols:
                raise DimensionMismatch("ragged row lengths")
            nrow = []
            for entry in row:
                cs = [c % p for c in entry]
                if cap is not None:
                    del cs[cap + 1 :]
                nrow.append(poly_trim(cs))
            norm.append(nrow)
        self.field, self.rows, self.cols, self.cap = field, rows, cols, cap
        self.data = norm

    @classmethod
    def zero(cls, field, rows, cols, cap=None):
        m = cls.__new__(cls)
        m.field, m.rows, m.cols, m.cap = field, rows, cols, cap
        m.data = [[[] for _ in range(cols)] for _ in range(rows)]
        return m

    @classmethod
    def identity(cls, field, n, cap=None):
        m = cls.zero(field, n, n, cap)
        for i in range(n):
            m.data[i][i] = [1]
        return m

    @classmethod
    def from_power_matrices(cls, field, powers, const=None, cap=None):
        """Assemble sum_k x**k * powers[k-1] (+ const at degree 0).

        powers is a list of Matrix of equal shape; const, when given, is a
        Matrix supplying the degree-0 coefficients.
        """
        if not powers and const is None:
            raise ValueError("need at least one matrix")
        first = powers[0] if powers else const
        rows, cols = first.rows, first.cols
        m = cls.zero(field, rows, cols, cap)
        top = len(powers) if cap is None else min(len(powers), cap)
        for i in range(rows):
            for j in range(cols):
                entry = [0] * (top + 1)
                if const is not None:
                    entry[0] = const.data[i][j]
                for k in range(1, top + 1):
                    entry[k] = powers[k - 1].data[i][j]
                m.data[i][j] = poly_trim(entry)
        return m

    def coeff_matrix(self, k):
        """Matrix of x**k coefficients."""
        out = Matrix.__new__(Matrix)
        out.field, out.rows, out.cols = self.field, self.rows, self.cols
        out.data = [
            [entry[k] if k < len(entry) else 0 for entry in row] for row in self.data
        ]
        return out

    def entry(self, i, j):
        return list(self.data[i][j])

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and other.field.p == self.field.p
            and other.data == self.data
        )

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, cap={self.cap}, p={self.field.p})"


def polymat_add(a, b):
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch("shape mismatch")
    p = a.field.p
    cap = a.cap if b.cap is None else (b.cap if a.cap is None else min(a.cap, b.cap))
    out = PolyMatrix.zero(a.field, a.rows, a.cols, cap)
    for i in range(a.rows):
        for j in range(a.cols):
            ea, eb = a.data[i][j], b.data[i][j]
            if len(ea) < len(eb):
                ea, eb = eb, ea
            entry = list(ea)
            for k, v in enumerate(eb):
                entry[k] = (entry[k] + v) % p
            if cap is not None:
                del entry[cap + 1 :]
            out.data[i][j] = poly_trim(entry)
    return out


def polymat_sub(a, b):
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch("shape mismatch")
    p = a.field.p
    neg = PolyMatrix.__new__(PolyMatrix)
    neg.field, neg.rows, neg.cols, neg.cap = b.field, b.rows, b.cols, b.cap
    neg.data = [[[-c % p for c in entry] for entry in row] for row in b.data]
    return polymat_add(a, neg)


def _polymat_mul_entry(a, b, cap, p):
    out = []
    for i in range(a.rows):
        orow = []
        for j in range(b.cols):
            acc = []
            for t in range(a.cols):
                ea = a.data[i][t]
                eb = b.data[t][j]
                if ea and eb:
                    prod = poly_mul(ea, eb, p)
                    if len(acc) < len(prod):
                        acc.extend([0] * (len(prod) - len(acc)))
                    for k, v in enumerate(prod):
                        acc[k] += v
            acc = [v % p for v in acc]
            if cap is not None:
                del acc[cap + 1 :]
            orow.append(poly_trim(acc))
        out.append(orow)
    return out


def _polymat_mul_packed(a, b, cap, p):
    da, db = a.data, b.data
    if cap is not None:
        da = [[e[: cap + 1] for e in row] for row in da]
        db = [[e[: cap + 1] for e in row] for row in db]
    la = max((len(e) for row in da for e in row), default=0)
    lb = max((len(e) for row in db for e in row), default=0)
    if la == 0 or lb == 0:
        return [[[] for _ in range(b.cols)] for _ in range(a.rows)]
    prod_len = la + lb - 1
    width = conv_width(p, a.cols * min(la, lb))
    pa = [[pack_ints(e, width) if e else 0 for e in row] for row in da]
    pb = [[pack_ints(e, width) if e else 0 for e in row] for row in db]
    out = []
    for i in range(a.rows):
        arow = pa[i]
        orow = []
        for j in range(b.cols):
            acc = 0
            for t in range(a.cols):
                ea = arow[t]
                if ea:
                    eb = pb[t][j]
                    if eb:
                        acc += ea * eb
            entry = [v % p for v in unpack_ints(acc, prod_len, width)]
            if cap is not None:
                del entry[cap + 1 :]
            orow.append(poly_trim(entry))
        out.append(orow)
    return out


def polymat_mul(a, b, cap=None, strategy=None):
    """Polynomial matrix product truncated to degree <= cap.

    When cap is None the caps of the operands (tightest wins) carry over.
    strategy picks the inner algorithm: "entry" multiplies coefficient
    lists pairwise, "packed" runs each entry product as one big-int
    multiplication; None chooses by volume.
    """
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    if a.field.p != b.field.p:
        raise ValueError("mixed moduli")
    if cap is None:
        cap = a.cap if b.cap is None else (b.cap if a.cap is None else min(a.cap, b.cap))
    if strategy is None:
        la = max((len(e) for row in a.data for e in row), default=0)
        lb = max((len(e) for row in b.data for e in row), default=0)
        vol = a.rows * a.cols * b.cols * la * lb
        strategy = "packed" if vol > _PACK_THRESHOLD else "entry"
    p = a.field.p
    fn = _polymat_mul_packed if strategy == "packed" else _polymat_mul_entry
    data = fn(a, b, cap, p)
    out = PolyMatrix.__new__(PolyMatrix)
    out.field, out.rows, out.cols, out.cap, out.data = a.field, a.rows, b.cols, cap, data
    return out


# --- Hankel windows ---------------------------------------------------------


class HankelWindow:
    """Implicit m x m Hankel matrix H[i][j] = diag[i + j].

    diag is the antidiagonal value sequence of length 2m - 1.
    """

    __slots__ = ("field", "m", "diag")

    def __init__(self, field, diag):
        if len(diag) % 2 == 0:
            raise DimensionMismatch("antidiagonal sequence must have odd length")
        p = field.p
        self.field = field
        self.m = (len(diag) + 1) // 2
        self.diag = [v % p for v in diag]

    def entry(self, i, j):
        return self.diag[i + j]

    def to_matrix(self):
        m = self.m
        return Matrix(self.field, [self.diag[i : i + m] for i in range(m)])

    def __repr__(self):
        return f"HankelWindow(m={self.m}, p={self.field.p})"


def hankel_vec_mul(h, v):
    """H @ v as one convolution: (diag * reverse(v))[m-1 : 2m-1]."""
    m = h.m
    if len(v) != m:
        raise DimensionMismatch(f"Hankel m={m} @ vector[{len(v)}]")
    conv = poly_mul(h.diag, v[::-1], h.field.p)
    return conv[m - 1 : 2 * m - 1]


def hankel_solve(h, b):
    """Solve H x = b, or None when the window is singular (densifies)."""
    sols = hankel_solve_multi(h, [b])
    return None if sols is None else sols[0]


def hankel_solve_multi(h, rhs_cols):
    """Solve H x = b for many right-hand sides with one elimination."""
    return solve_many(h.to_matrix(), rhs_cols)
