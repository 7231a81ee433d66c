"""Iterates of perturbed matrices and batched element updates.

Two update regimes, neither of which touches the original matrix again:

* rank-one: iterates of (A + a b^T) follow from iterates of A through a
  divide-and-conquer recurrence whose cross-block corrections collapse
  into short polynomial products, after which the perturbed Frobenius
  form is rebuilt from the new iterates alone;
* element updates: for B equal to A outside a few positions, powers of B
  restricted to any index sets follow from powers of A through the
  Sherman-Morrison-Woodbury identity applied to the truncated resolvent
  (I - xB)^-1 mod x^(h+1), so a batch of f updates costs polynomial
  matrix products of size f rather than any n-sized work.
"""

from operator import mul as _mul

from .errors import DimensionMismatch, DuplicatePosition, GenericityFailure
from .field import poly_mul_range
from .frobenius import default_attempt_budget, fnf_from_iterates, vector_iterates_fast
from .matrix import Matrix, PolyMatrix, polymat_add, polymat_mul, polymat_sub

DEFAULT_BASE_BLOCK = 8


class PerturbationContext:
    """Inputs for iterating (A + a b^T) on u without access to A itself.

    delta[i] = A^i u and alpha[i] = A^i a for i = 0..n-1; b is the row
    factor of the rank-one change.  Passing precomputed iterates rather
    than the matrix keeps the recursion testable against any source of
    iterates and pins its cost to the sequences' length.
    """

    __slots__ = ("field", "n", "delta", "alpha", "b")

    def __init__(self, field, delta, alpha, b):
        n = len(delta)
        if len(alpha) != n or len(b) != n:
            raise DimensionMismatch("delta, alpha, b must share one dimension")
        p = field.p
        self.field = field
        self.n = n
        self.delta = [[x % p for x in vec] for vec in delta]
        self.alpha = [[x % p for x in vec] for vec in alpha]
        self.b = [x % p for x in b]


def perturbed_iterates(ctx, base_block=DEFAULT_BASE_BLOCK):
    """[u, (A+ab^T)u, ..., (A+ab^T)^(n-1)u] from the context's iterates.

    The new iterates satisfy X_k = delta_k + sum_l alpha_{k-1-l} (b.X_l);
    the recursion finalizes a left half, folds all its inner products
    into the right half as one polynomial product per coordinate, and
    recurses.  Blocks of size <= base_block run the direct quadratic
    update instead.
    """
    n, p = ctx.n, ctx.field.p
    b = ctx.b
    alpha = ctx.alpha
    xs = [list(vec) for vec in ctx.delta]
    if n <= 1:
        return xs
    # alpha transposed: per-coordinate polynomial coefficients
    alpha_t = [list(col) for col in zip(*alpha)]
    d_memo = [None] * n

    def inner(vec):
        return sum(map(_mul, b, vec)) % p

    def rec(lo, hi):
        if hi - lo <= base_block:
            for l in range(lo, hi):
                dl = d_memo[l]
                if dl is None:
                    dl = d_memo[l] = inner(xs[l])
                if dl:
                    for j in range(l + 1, hi + 1):
                        av = alpha[j - 1 - l]
                        xj = xs[j]
                        xs[j] = [(x + dl * a) % p for x, a in zip(xj, av)]
            return
        mid = (lo + hi) // 2
        rec(lo, mid)
        ds = []
        for l in range(lo, mid + 1):
            dl = d_memo[l]
            if dl is None:
                dl = d_memo[l] = inner(xs[l])
            ds.append(dl)
        span = hi - lo  # alpha degrees 0..span-1 can contribute
        targets = xs[mid + 1 : hi + 1]
        if any(ds):
            for k in range(n):
                prod = poly_mul_range(alpha_t[k][:span], ds, p, mid - lo, hi - lo)
                for xj, val in zip(targets, prod):
                    if val:
                        xj[k] = (xj[k] + val) % p
        rec(mid + 1, hi)

    rec(0, n - 1)
    return xs


def rank1_update_fnf(a_new, oracle_a, oracle_at, col, row, rng, max_attempts=None):
    """Frobenius forms of A' = A + col.row^T and its transpose.

    a_new is the already-updated matrix (used only for one final
    mat-vec per certification); oracle_a / oracle_at answer power
    queries for the old A and A^T.  Fresh random vectors are drawn per
    attempt; GenericityFailure signals that A' resisted the budget,
    which is the expected outcome when A' is not generic.

    Returns (form of A', form of A'^T).
    """
    field = oracle_a.field
    n = oracle_a.n
    budget = default_attempt_budget(n) if max_attempts is None else max_attempts
    a_new_t = a_new.transpose()
    # iterates of the perturbation directions do not depend on the attempt
    alpha_col = vector_iterates_fast(oracle_a, col)
    alpha_row = vector_iterates_fast(oracle_at, row)
    for _ in range(budget):
        u = field.rand_vector(rng, n)
        v = field.rand_vector(rng, n)
        fwd = PerturbationContext(field, vector_iterates_fast(oracle_a, u), alpha_col, row)
        new_u_iter = perturbed_iterates(fwd)
        bwd = PerturbationContext(field, vector_iterates_fast(oracle_at, v), alpha_row, col)
        new_v_iter = perturbed_iterates(bwd)
        form = fnf_from_iterates(a_new, new_u_iter, new_v_iter)
        if form is None:
            continue
        form_t = fnf_from_iterates(a_new_t, new_v_iter, new_u_iter)
        if form_t is not None:
            return form, form_t
    raise GenericityFailure(f"no generic vector pair for the update in {budget} attempts")


# --- batched element updates ------------------------------------------------


def batch_endpoints(psi):
    """Sorted distinct row and column endpoint lists (S, T) of an update list."""
    return sorted({u for u, _, _ in psi}), sorted({v for _, v, _ in psi})


class ElementUpdateBatch:
    """Preprocessed Sherman-Morrison-Woodbury data for one update batch.

    psi lists (u_i, v_i, y_i): position and new value, all positions
    distinct.  resolvent is P = (I - x Delta VZU)^-1 mod x^(h+1), the
    only quantity that mixes the updates; queries combine it with border
    rows/columns of the old power family.
    """

    __slots__ = ("field", "h", "psi", "s_list", "t_list", "deltas", "resolvent")

    def __init__(self, field, h, psi, s_list, t_list, deltas, resolvent):
        self.field = field
        self.h = h
        self.psi = psi
        self.s_list = s_list
        self.t_list = t_list
        self.deltas = deltas
        self.resolvent = resolvent


def _z_polymat(field, powers, row_idx_vals, col_idx_vals, h):
    """Sum_k x^k (A^k) plus the identity's restriction, as a PolyMatrix.

    powers already carry the wanted submatrix; the constant term is 1
    exactly where the global row index equals the global column index.
    """
    const = Matrix(
        field, [[1 if r == c else 0 for c in col_idx_vals] for r in row_idx_vals],
        cols=len(col_idx_vals),
    )
    return PolyMatrix.from_power_matrices(field, powers[:h], const=const, cap=h)


def batch_preprocess(field, powers_ts, psi, h, current_entries):
    """Preprocess an update batch against powers (A^k)_{T,S}, k = 1..h.

    S and T are the sorted distinct endpoint lists from batch_endpoints;
    powers_ts rows follow T and columns follow S.  current_entries[i] is
    the present value A_{u_i, v_i}, needed to turn the absolute target
    values y_i into additive changes.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    if len(current_entries) != len(psi):
        raise DimensionMismatch("one current entry per update required")
    if len({(u, v) for u, v, _ in psi}) != len(psi):
        raise DuplicatePosition("update positions must be distinct")
    p = field.p
    s_list, t_list = batch_endpoints(psi)
    f = len(psi)
    if f == 0:
        resolvent = PolyMatrix.zero(field, 0, 0, cap=h)
        return ElementUpdateBatch(field, h, [], s_list, t_list, [], resolvent)
    if len(powers_ts) < h:
        raise DimensionMismatch(f"need {h} power matrices, got {len(powers_ts)}")
    if powers_ts[0].rows != len(t_list) or powers_ts[0].cols != len(s_list):
        raise DimensionMismatch("power family shape does not match the endpoints")
    deltas = [(y - old) % p for (_, _, y), old in zip(psi, current_entries)]
    sidx = {s: i for i, s in enumerate(s_list)}
    tidx = {t: i for i, t in enumerate(t_list)}
    z_ts = _z_polymat(field, powers_ts, t_list, s_list, h)
    # M = x Delta VZU: row i is delta_i * Z_{v_i, u_j}, shifted one degree up
    m_data = [
        [
            [0] + [deltas[i] * c for c in z_ts.data[tidx[vi]][sidx[uj]]]
            for (uj, _, _) in psi
        ]
        for i, (_, vi, _) in enumerate(psi)
    ]
    m = PolyMatrix(field, m_data, cap=h)
    ident = PolyMatrix.identity(field, f, cap=h)
    resolvent = polymat_add(ident, m)
    power = m
    covered = 1
    while covered < h:
        power = polymat_mul(power, power, cap=h)
        resolvent = polymat_mul(resolvent, polymat_add(ident, power), cap=h)
        covered = 2 * covered + 1
    return ElementUpdateBatch(field, h, list(psi), s_list, t_list, deltas, resolvent)


def batch_query(batch, x_idx, y_idx, powers_xs, powers_ty, powers_xy):
    """Powers (B^k)_{X,Y} for k = 1..h of the batch-updated matrix B.

    powers_xs = (A^k)_{X,S}, powers_ty = (A^k)_{T,Y}, powers_xy =
    (A^k)_{X,Y} with S/T in the batch's endpoint order and X/Y in the
    given order.  Only border slices of the old powers are consumed; the
    resolvent supplies all interaction between the updates.
    """
    x_idx, y_idx = list(x_idx), list(y_idx)
    field, h, psi = batch.field, batch.h, batch.psi
    p = field.p
    if len(powers_xy) < h:
        raise DimensionMismatch(f"need {h} power matrices, got {len(powers_xy)}")
    if not psi:
        return [m.copy() for m in powers_xy[:h]]
    if len(powers_xs) < h or len(powers_ty) < h:
        raise DimensionMismatch(f"need {h} power matrices on both borders")
    sidx = {s: i for i, s in enumerate(batch.s_list)}
    tidx = {t: i for i, t in enumerate(batch.t_list)}
    z_xy = _z_polymat(field, powers_xy, x_idx, y_idx, h)
    ucols = [sidx[u] for u, _, _ in psi]
    zu_powers = [m.submatrix(range(len(x_idx)), ucols) for m in powers_xs[:h]]
    zu_const = Matrix(
        field,
        [[1 if xa == u else 0 for u, _, _ in psi] for xa in x_idx],
        cols=len(psi),
    )
    zu = PolyMatrix.from_power_matrices(field, zu_powers, const=zu_const, cap=h)
    vrows = [tidx[v] for _, v, _ in psi]
    vz_powers = [m.submatrix(vrows, range(len(y_idx))) for m in powers_ty[:h]]
    vz_const = Matrix(
        field,
        [[1 if v == ya else 0 for ya in y_idx] for _, v, _ in psi],
        cols=len(y_idx),
    )
    vz = PolyMatrix.from_power_matrices(field, vz_powers, const=vz_const, cap=h)
    # fold (-x Delta) into VZ: row i scaled by -delta_i, one degree up
    dvz_data = [
        [[0] + [-batch.deltas[i] * c % p for c in entry] for entry in row]
        for i, row in enumerate(vz.data)
    ]
    dvz = PolyMatrix(field, dvz_data, cap=h)
    if len(x_idx) <= len(y_idx):
        corr = polymat_mul(polymat_mul(zu, batch.resolvent, cap=h), dvz, cap=h)
    else:
        corr = polymat_mul(zu, polymat_mul(batch.resolvent, dvz, cap=h), cap=h)
    result = polymat_sub(z_xy, corr)
    return [result.coeff_matrix(k) for k in range(1, h + 1)]
