"""Frobenius normal form of a generic matrix and fast power queries.

A square matrix A over F_p is generic when its minimal and characteristic
polynomials coincide.  For such A and a random vector u, the Krylov
iterates u, Au, ..., A^(n-1)u form a basis U with A = U C U^-1, where C
is the companion matrix of the characteristic polynomial.  Everything
here exploits that C never needs to be materialized:

* the form is recovered from 2n-1 inner products of forward and
  transposed iterates (a Hankel system),
* powers of A reduce to windows of a table whose rows extend U row-wise
  by the characteristic-polynomial linear recurrence,
* single entries of A^1..A^h come from one Hankel-vector convolution,
  and whole submatrices from one short polynomial-matrix product.

All randomized constructions retry with fresh vectors up to a budget and
raise GenericityFailure when the matrix itself is not generic.
"""

import math

from .errors import DimensionMismatch, GenericityFailure
from .field import poly_mul_range, poly_series_inv
from .matrix import (
    HankelWindow,
    Matrix,
    PolyMatrix,
    hankel_solve_multi,
    hankel_vec_mul,
    mat_vec,
    polymat_mul,
)


class _InvocationCounter:
    """Test hook: counts how often compute_fnf runs a from-scratch build."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def bump(self):
        self.count += 1

    def reset(self):
        self.count = 0


FNF_BUILDS = _InvocationCounter()


def default_attempt_budget(n):
    """Retry budget: generous for a success probability of order 1/log."""
    return math.ceil(64 * (1 + math.log2(max(n, 2))) ** 2)


class FrobeniusForm:
    """Companion-basis factorization A = basis . C . basis_inv.

    coeffs holds c_0..c_{n-1} of the characteristic polynomial
    t**n + c_{n-1} t**(n-1) + ... + c_0; the companion matrix C has ones
    on the subdiagonal and -coeffs as its last column.  basis columns are
    the Krylov iterates u, Au, ..., A^(n-1)u of the certified vector.
    """

    __slots__ = ("field", "n", "coeffs", "basis", "basis_inv")

    def __init__(self, field, coeffs, basis, basis_inv):
        self.field = field
        self.n = len(coeffs)
        self.coeffs = list(coeffs)
        self.basis = basis
        self.basis_inv = basis_inv

    def __repr__(self):
        return f"FrobeniusForm(n={self.n}, p={self.field.p})"


def naive_iterates(a, v, count):
    """[v, Av, A^2 v, ...] with `count` vectors by repeated mat-vec."""
    p = a.field.p
    out = [[x % p for x in v]]
    for _ in range(count - 1):
        out.append(mat_vec(a, out[-1]))
    return out


def fnf_from_iterates(a, iter_u, iter_v):
    """Recover the form from forward iterates of u and transposed iterates of v.

    iter_u[j] is A^j u; iter_v[i] is (A^T)^i v, i.e. the row v^T A^i.  The
    Hankel matrix of moments v^T A^(i+j) u equals V U for V stacking the
    rows v^T A^i; when it is nonsingular both U and V are invertible and
    U^-1 = (V U)^-1 V.  Returns None when the moment matrix is singular
    (vectors not generic, or the matrix itself is not).
    """
    field = a.field
    n = a.rows
    if a.cols != n:
        raise DimensionMismatch("square matrix required")
    if len(iter_u) != n or len(iter_v) != n:
        raise DimensionMismatch("need exactly n iterates on both sides")
    # moments h_k = v^T A^k u for k = 0..2n-2, split across stored iterates
    diag = []
    for k in range(2 * n - 1):
        i = min(k, n - 1)
        j = k - i
        row, col = iter_v[i], iter_u[j]
        diag.append(sum(x * y for x, y in zip(row, col)) % field.p)
    moments = HankelWindow(field, diag)
    # solve (V U) X = V column by column: X = U^-1
    rhs = [[iter_v[r][c] for r in range(n)] for c in range(n)]
    sols = hankel_solve_multi(moments, rhs)
    if sols is None:
        return None
    basis_inv = Matrix.from_cols(field, sols)
    basis = Matrix.from_cols(field, iter_u)
    # last column of C = U^-1 A (A^(n-1) u); characteristic coefficients negate it
    a_pow_n_u = mat_vec(a, iter_u[-1])
    last = mat_vec(basis_inv, a_pow_n_u)
    coeffs = [-x % field.p for x in last]
    return FrobeniusForm(field, coeffs, basis, basis_inv)


def compute_fnf(a, rng, max_attempts=None):
    """Build the form of a generic matrix with fresh random vectors per try.

    Raises GenericityFailure when no attempt within the budget certifies;
    for a non-generic matrix every attempt fails, so exhaustion is the
    expected (and only available) signal.
    """
    FNF_BUILDS.bump()
    n = a.rows
    if a.cols != n or n == 0:
        raise DimensionMismatch("square nonempty matrix required")
    field = a.field
    at = a.transpose()
    budget = default_attempt_budget(n) if max_attempts is None else max_attempts
    for _ in range(budget):
        u = field.rand_vector(rng, n)
        v = field.rand_vector(rng, n)
        form = fnf_from_iterates(a, naive_iterates(a, u, n), naive_iterates(at, v, n))
        if form is not None:
            return form
    raise GenericityFailure(f"no generic vector pair found in {budget} attempts")


# --- recurrence extension and the window table ------------------------------


class RecurrenceExtender:
    """Doubles sequences obeying s_k = -(c_0 s_{k-n} + ... + c_{n-1} s_{k-1}).

    The connection polynomial is conn(x) = 1 + c_{n-1} x + ... + c_0 x**n.
    For a sequence satisfying the recurrence, the generating function
    sum_t s_{t+1} x**t times conn has degree below n, so extension costs
    two truncated multiplications against a series inverse of conn that
    is computed once and shared across all extensions.
    """

    __slots__ = ("field", "n", "conn", "conn_inv")

    def __init__(self, field, coeffs):
        n = len(coeffs)
        if n == 0:
            raise DimensionMismatch("need at least one coefficient")
        self.field = field
        self.n = n
        self.conn = [1] + [coeffs[n - j] % field.p for j in range(1, n + 1)]
        self.conn_inv = poly_series_inv(self.conn, field.p, 2 * n)

    def extend(self, init):
        """Given s_1..s_n, return s_{n+1}..s_{2n}."""
        n, p = self.n, self.field.p
        if len(init) != n:
            raise DimensionMismatch(f"need {n} initial terms, got {len(init)}")
        remainder = poly_mul_range(init, self.conn, p, 0, n)
        tail = poly_mul_range(remainder, self.conn_inv, p, n, 2 * n)
        tail.extend([0] * (n - len(tail)))
        return tail


def extend_recurrence(field, init, coeffs):
    """One-shot wrapper around RecurrenceExtender for a single sequence."""
    return RecurrenceExtender(field, coeffs).extend(init)


def extend_recurrence_naive(field, init, coeffs):
    """Direct term-by-term recurrence stepping; the reference path."""
    n, p = len(coeffs), field.p
    if len(init) != n:
        raise DimensionMismatch(f"need {n} initial terms, got {len(init)}")
    s = [x % p for x in init]
    for t in range(n, 2 * n):
        s.append(-sum(coeffs[i] * s[t - n + i] for i in range(n)) % p)
    return s[n:]


class PowerOracle:
    """Window table answering queries about powers of one fixed matrix.

    windows[i][t] = (A^(t+1) u)_i for t = 0..2n-2, built by extending row
    i of the Krylov basis with the characteristic recurrence.  The n-wide
    window starting at column k-1 equals U C^k, so matrix powers turn
    into convolutions against columns of basis_inv.
    """

    __slots__ = ("form", "windows")

    def __init__(self, form, windows):
        self.form = form
        self.windows = windows

    @property
    def n(self):
        return self.form.n

    @property
    def field(self):
        return self.form.field

    def __repr__(self):
        return f"PowerOracle(n={self.n}, p={self.field.p})"


def build_power_oracle(a, form):
    """Extend every basis row once; one shared series inverse does them all."""
    if a.rows != form.n or a.cols != form.n:
        raise DimensionMismatch("matrix shape does not match the form")
    ext = RecurrenceExtender(form.field, form.coeffs)
    windows = []
    for row in form.basis.data:
        windows.append(row[1:] + ext.extend(row))
    return PowerOracle(form, windows)


def query_cell_powers(oracle, i, j, h):
    """[(A^1)_{ij}, ..., (A^h)_{ij}] via one Hankel convolution; 1 <= h <= n."""
    n = oracle.n
    if not 1 <= h <= n:
        raise ValueError(f"power range h={h} outside [1, {n}]")
    w = oracle.form.basis_inv.col(j)
    window = HankelWindow(oracle.field, oracle.windows[i])
    return hankel_vec_mul(window, w)[:h]


def vector_iterates_fast(oracle, v):
    """[v, Av, ..., A^(n-1) v] in one basis change plus n convolutions."""
    n, p = oracle.n, oracle.field.p
    w = mat_vec(oracle.form.basis_inv, v)
    rows = [
        hankel_vec_mul(HankelWindow(oracle.field, win), w) for win in oracle.windows
    ]
    out = [[x % p for x in v]]
    for k in range(n - 1):
        out.append([rows[i][k] for i in range(n)])
    return out


def query_submatrix_powers(oracle, s_idx, t_idx, h):
    """All (A^k)_{S,T} for k = 1..h as one short polynomial-matrix product.

    Rows of the window table are chopped into overlapping stride-h pieces
    (left factor) and columns of basis_inv into reversed stride-h pieces
    (right factor); coefficient k+h-1 of the product recovers the k-th
    power.  Cost scales with h rather than with full n-fold powering.
    """
    n = oracle.n
    if not 1 <= h <= n:
        raise ValueError(f"power range h={h} outside [1, {n}]")
    s_idx, t_idx = list(s_idx), list(t_idx)
    field = oracle.field
    if not s_idx or not t_idx:
        return [Matrix.zero(field, len(s_idx), len(t_idx)) for _ in range(h)]
    blocks = -(-n // h)  # ceil(n / h)
    windows = oracle.windows
    ginv = oracle.form.basis_inv.data
    left = PolyMatrix.zero(field, len(s_idx), blocks, cap=2 * h - 1)
    for si, i in enumerate(s_idx):
        win = windows[i]
        for b in range(blocks):
            base = b * h
            entry = [0]  # degree-0 coefficient is always absent
            entry.extend(
                win[base + l - 1] if base + l - 1 < 2 * n - 1 else 0
                for l in range(1, 2 * h)
            )
            left.data[si][b] = entry
            while entry and entry[-1] == 0:
                entry.pop()
    right = PolyMatrix.zero(field, blocks, len(t_idx), cap=h - 1)
    for b in range(blocks):
        base = b * h
        for ti, j in enumerate(t_idx):
            entry = [0] * h
            for l in range(1, h + 1):
                if base + l - 1 < n:
                    entry[h - l] = ginv[base + l - 1][j]
            right.data[b][ti] = entry
            while entry and entry[-1] == 0:
                entry.pop()
    prod = polymat_mul(left, right, cap=2 * h - 1)
    return [prod.coeff_matrix(k + h - 1) for k in range(1, h + 1)]
