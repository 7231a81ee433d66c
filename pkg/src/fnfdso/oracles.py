"""Randomized distance oracles for unweighted digraphs.

All three oracles share one recipe: encode the graph as a random matrix
over a large prime field (see graphenc), read distances as the minimal
power with a nonzero entry, and keep those power reads cheap under
change by combining the Frobenius power oracle with low-rank update
machinery.  Distances above a hop bound h are recovered by routing
through a random hub set: any long shortest path passes a hub with high
probability, so h-bounded hub-to-hub distances plus Dijkstra on the
small hub graph reproduce exact distances.

The oracles differ in what changes:

* MultiFailureDSO: a static graph, repeatedly hit by a batch of edge
  failures; each batch is taken relative to the preprocessed graph.
* DynamicEdgeOracle: arbitrary edge insertions and deletions, served in
  phases between full rebuilds.
* VertexUpdateOracle: whole-vertex neighborhood replacements, served as
  at most two rank-1 normal-form updates per change.

Unreachable pairs are reported as None.  Weighted graphs and vertex
failures are handled by composing expand_weights / split_vertices in
front of these oracles (the harness module does this).
"""

import heapq
import math
from collections import defaultdict, deque

from .errors import EdgeAbsent, EdgeAlreadyPresent, GenericityFailure, GraphError
from .field import Field, sample_prime
from .frobenius import (
    build_power_oracle,
    compute_fnf,
    query_cell_powers,
    query_submatrix_powers,
)
from .graphenc import (
    apply_edge_change,
    replace_in_edges,
    replace_out_edges,
    sample_encoding,
)
from .matrix import Matrix
from .updates import batch_endpoints, batch_preprocess, batch_query, rank1_update_fnf

DEFAULT_GAMMA = 4.0
DEFAULT_ALPHA = 0.5
DEFAULT_FIELD_EXPONENT = 1
ENCODING_ATTEMPTS = 4  # initial sample plus up to three resamples


# --- hitting sets and the hub graph -----------------------------------------


class HittingSetConfig:
    """A random hub sample H covering all shortest paths of >= h hops.

    Drawn uniformly with replacement, gamma * (n/h) * ln(n) times, then
    deduplicated; when that many draws would reach n, H is simply all of
    V.  vertices is sorted for deterministic downstream iteration.
    """

    __slots__ = ("gamma", "h", "vertices")

    def __init__(self, gamma, h, vertices):
        self.gamma = gamma
        self.h = h
        self.vertices = vertices


def sample_hitting_set(n, h, gamma, rng):
    if not 1 <= h <= n:
        raise ValueError(f"hop bound {h} outside [1, {n}]")
    target = math.ceil(gamma * (n / h) * math.log(n))
    if target >= n:
        return HittingSetConfig(gamma, h, list(range(n)))
    draws = {rng.randrange(n) for _ in range(target)}
    return HittingSetConfig(gamma, h, sorted(draws))


def bounded_graph_dijkstra(h_edges, s, t):
    """Shortest s-t distance in the weighted hub graph, None if absent.

    h_edges maps ordered pairs to finite positive lengths (h-bounded
    exact distances); vertices are implicit in the keys plus {s, t}.
    """
    if s == t:
        return 0
    adj = defaultdict(list)
    for (x, y), w in h_edges.items():
        adj[x].append((y, w))
    dist = {s: 0}
    heap = [(0, s)]
    while heap:
        d, x = heapq.heappop(heap)
        if x == t:
            return d
        if d > dist.get(x, d):
            continue
        for y, w in adj[x]:
            nd = d + w
            if nd < dist.get(y, nd + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return None


# --- brute-force baselines ---------------------------------------------------


def bfs_oracle(g, failures, s, t, banned_vertices=()):
    """Exact unweighted distance on g minus failed edges and banned vertices."""
    banned_vertices = set(banned_vertices)
    if s in banned_vertices or t in banned_vertices:
        return None
    if s == t:
        return 0
    failures = set(failures)
    adj = defaultdict(list)
    for u, v in g.edges:
        if (u, v) not in failures and u not in banned_vertices and v not in banned_vertices:
            adj[u].append(v)
    seen = {s: 0}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen[y] = seen[x] + 1
                if y == t:
                    return seen[y]
                queue.append(y)
    return seen.get(t)


def dijkstra_oracle(g, failures, s, t, banned_vertices=()):
    """Exact weighted distance on g minus failed edges and banned vertices."""
    banned_vertices = set(banned_vertices)
    if s in banned_vertices or t in banned_vertices:
        return None
    if s == t:
        return 0
    failures = set(failures)
    adj = defaultdict(list)
    for u, v in g.edges:
        if (u, v) not in failures and u not in banned_vertices and v not in banned_vertices:
            adj[u].append((v, g.weight(u, v)))
    dist = {s: 0}
    heap = [(0, s)]
    while heap:
        d, x = heapq.heappop(heap)
        if x == t:
            return d
        if d > dist.get(x, d):
            continue
        for y, w in adj[x]:
            nd = d + w
            if nd < dist.get(y, nd + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return None


# --- shared submatrix-power bookkeeping ---------------------------------------


class _SubPowers:
    """Power family (A^k), k = 1..h, restricted to rows x cols index lists."""

    __slots__ = ("row_pos", "col_pos", "mats")

    def __init__(self, rows, cols, mats):
        self.row_pos = {v: i for i, v in enumerate(rows)}
        self.col_pos = {v: j for j, v in enumerate(cols)}
        self.mats = mats


def _locate(tables, r, c):
    for tab in tables:
        i = tab.row_pos.get(r)
        if i is None:
            continue
        j = tab.col_pos.get(c)
        if j is not None:
            return tab, i, j
    raise KeyError(f"position ({r}, {c}) not covered by any stored power table")


def _materialize(field, tables, rows, cols, h):
    """Assemble (A^k)_{rows, cols} for k = 1..h from whatever tables hold."""
    src = [[_locate(tables, r, c) for c in cols] for r in rows]
    ncols = len(cols)
    out = []
    for k in range(h):
        # entries already reduced; bypass the constructor's reduction pass
        m = Matrix.__new__(Matrix)
        m.field, m.rows, m.cols = field, len(rows), ncols
        m.data = [[tab.mats[k].data[i][j] for tab, i, j in row] for row in src]
        out.append(m)
    return out


def _min_power_index(mats, i, j):
    for k0, m in enumerate(mats):
        if m.data[i][j]:
            return k0 + 1
    return None


def _bounded_hub_table(hubs, powers):
    """Ordered hub pairs -> minimal k with a nonzero power entry."""
    table = {}
    for i, x in enumerate(hubs):
        for j, y in enumerate(hubs):
            if x == y:
                continue
            k = _min_power_index(powers, i, j)
            if k is not None:
                table[(x, y)] = k
    return table


def _extend_tables(oracle, cover, pair, h, tables):
    """Scratch-border extra vertices so all pairs with `cover` are readable."""
    new = sorted(w for w in set(pair) if w not in cover)
    if not new:
        return tables
    tables = list(tables)
    widened = sorted(cover | set(new))
    field = oracle.field
    tables.append(
        _SubPowers(new, widened, query_submatrix_powers(oracle, new, widened, h))
    )
    base = sorted(cover)
    tables.append(_SubPowers(base, new, query_submatrix_powers(oracle, base, new, h)))
    return tables


def _route_query(batch, hubs, hub_dists, tables, s, t):
    """Assemble the hub graph around {s, t} and run Dijkstra on it.

    Hub-to-hub lengths come precomputed; the rows and columns through s
    and t come from two batch-update queries against the stored power
    tables of the unmodified matrix.
    """
    field, h = batch.field, batch.h
    x1 = sorted({s, t})
    y1 = sorted(set(hubs) | {s, t})
    sb, tb = batch.s_list, batch.t_list
    rows_st = batch_query(
        batch,
        x1,
        y1,
        _materialize(field, tables, x1, sb, h),
        _materialize(field, tables, tb, y1, h),
        _materialize(field, tables, x1, y1, h),
    )
    cols_st = batch_query(
        batch,
        y1,
        x1,
        _materialize(field, tables, y1, sb, h),
        _materialize(field, tables, tb, x1, h),
        _materialize(field, tables, y1, x1, h),
    )
    h_edges = dict(hub_dists)
    for i, x in enumerate(x1):
        for j, y in enumerate(y1):
            if x == y:
                continue
            k = _min_power_index(rows_st, i, j)
            if k is not None and k < h_edges.get((x, y), h + 1):
                h_edges[(x, y)] = k
    for i, x in enumerate(y1):
        for j, y in enumerate(x1):
            if x == y:
                continue
            k = _min_power_index(cols_st, i, j)
            if k is not None and k < h_edges.get((x, y), h + 1):
                h_edges[(x, y)] = k
    return bounded_graph_dijkstra(h_edges, s, t)


def _sample_generic_encoding(graph, field, rng):
    """Encoding plus its normal form, resampling a few times if unlucky."""
    last = None
    for _ in range(ENCODING_ATTEMPTS):
        enc = sample_encoding(graph, field, rng)
        try:
            form = compute_fnf(enc.matrix, rng)
        except GenericityFailure as exc:
            last = exc
            continue
        return enc, form
    raise GenericityFailure(
        f"no generic encoding after {ENCODING_ATTEMPTS} samples"
    ) from last


def _check_vertex(n, v):
    if not 0 <= v < n:
        raise GraphError(f"vertex {v} outside [0, {n})")


# --- multi-failure distance sensitivity oracle -------------------------------


class _FailureBatchState:
    __slots__ = ("failures", "h", "hubs", "cover", "tables", "batch", "hub_dists")

    def __init__(self, failures, h, hubs, cover, tables, batch, hub_dists):
        self.failures = failures
        self.h = h
        self.hubs = hubs
        self.cover = cover
        self.tables = tables
        self.batch = batch
        self.hub_dists = hub_dists


class MultiFailureDSO:
    """Distance queries avoiding a batch of failed edges.

    Preprocessing encodes the graph once.  update(failures) prepares one
    failure batch relative to that pristine encoding (batches replace
    each other rather than stacking): it zeroes the failed entries via
    the truncated-resolvent machinery and stores h-bounded hub-pair
    distances with h = ceil(n / f).  Queries border {s, t} into the
    stored tables and route through the hub graph.
    """

    def __init__(self, graph, rng, c=DEFAULT_FIELD_EXPONENT, gamma=DEFAULT_GAMMA,
                 field=None):
        if graph.weight_bound > 1:
            raise GraphError("oracle serves unweighted graphs; expand weights first")
        self.graph = graph
        self.n = graph.n
        self.rng = rng
        self.gamma = gamma
        self.field = field if field is not None else Field(sample_prime(self.n, c, rng))
        self.enc, self.form = _sample_generic_encoding(graph, self.field, rng)
        self.oracle = build_power_oracle(self.enc.matrix, self.form)
        self.state = None
        self.update(())

    def update(self, failures):
        failures = sorted(set(map(tuple, failures)))
        for u, v in failures:
            if not self.graph.has_edge(u, v):
                raise EdgeAbsent(f"cannot fail absent edge ({u}, {v})")
        n, field = self.n, self.field
        f = max(len(failures), 1)
        h = -(-n // f)
        hs = sample_hitting_set(n, h, self.gamma, self.rng)
        endpoints = sorted({w for e in failures for w in e})
        cover = sorted(set(hs.vertices) | set(endpoints))
        tables = [
            _SubPowers(cover, cover, query_submatrix_powers(self.oracle, cover, cover, h))
        ]
        psi = [(u, v, 0) for u, v in failures]
        sb, tb = batch_endpoints(psi)
        batch = batch_preprocess(
            field,
            _materialize(field, tables, tb, sb, h),
            psi,
            h,
            [self.enc.matrix.data[u][v] for u, v, _ in psi],
        )
        hubs = hs.vertices
        powers_b = batch_query(
            batch,
            hubs,
            hubs,
            _materialize(field, tables, hubs, sb, h),
            _materialize(field, tables, tb, hubs, h),
            _materialize(field, tables, hubs, hubs, h),
        )
        self.state = _FailureBatchState(
            failures, h, hubs, set(cover), tables, batch, _bounded_hub_table(hubs, powers_b)
        )

    def query(self, s, t):
        _check_vertex(self.n, s)
        _check_vertex(self.n, t)
        if s == t:
            return 0
        st = self.state
        tables = _extend_tables(self.oracle, st.cover, (s, t), st.h, st.tables)
        return _route_query(st.batch, st.hubs, st.hub_dists, tables, s, t)

    def truncated_single_failure_query(self, edge, s, t, h):
        """min(distance avoiding one failed edge, h); independent of update state."""
        u, v = edge
        if not self.graph.has_edge(u, v):
            raise EdgeAbsent(f"cannot fail absent edge ({u}, {v})")
        _check_vertex(self.n, s)
        _check_vertex(self.n, t)
        if not 1 <= h <= self.n:
            raise ValueError(f"hop bound {h} outside [1, {self.n}]")
        if s == t:
            return 0
        field = self.field
        batch = batch_preprocess(
            field,
            query_submatrix_powers(self.oracle, [v], [u], h),
            [(u, v, 0)],
            h,
            [self.enc.matrix.data[u][v]],
        )
        cell = batch_query(
            batch,
            [s],
            [t],
            query_submatrix_powers(self.oracle, [s], [u], h),
            query_submatrix_powers(self.oracle, [v], [t], h),
            query_submatrix_powers(self.oracle, [s], [t], h),
        )
        k = _min_power_index(cell, 0, 0)
        return h if k is None else k


# --- fully dynamic edge-update oracle ----------------------------------------


class DynamicEdgeOracle:
    """Distance queries under arbitrary edge insertions and deletions.

    Works in phases of ceil(n^(1-alpha)) updates.  A phase starts with a
    fresh encoding snapshot A and its power oracle; every update inside
    the phase is an element change, absorbed three ways: the changed
    endpoints are bordered into the stored A-power tables, the pending
    change batch (relative to A) is re-preprocessed, and the maintained
    hub-pair powers of the current matrix advance by one single-element
    resolvent step.  The phase-filling update triggers a full rebuild
    instead.  Costs are amortized across the phase, not worst-case.
    """

    def __init__(self, graph, rng, alpha=DEFAULT_ALPHA, c=DEFAULT_FIELD_EXPONENT,
                 gamma=DEFAULT_GAMMA, field=None):
        if graph.weight_bound > 1:
            raise GraphError("oracle serves unweighted graphs; expand weights first")
        if not 0 < alpha < 1:
            raise ValueError(f"alpha {alpha} outside (0, 1)")
        self.graph = graph
        self.n = graph.n
        self.rng = rng
        self.gamma = gamma
        self.alpha = alpha
        self.h = min(self.n, math.ceil(self.n**alpha))
        self.phase_len = max(1, math.ceil(self.n ** (1 - alpha)))
        self.field = field if field is not None else Field(sample_prime(self.n, c, rng))
        self.rebuild_count = 0
        self._rebuild()

    def _rebuild(self):
        """Start a phase: fresh encoding of the current graph, fresh hubs."""
        n, h = self.n, self.h
        self.enc, self.form = _sample_generic_encoding(self.graph, self.field, self.rng)
        self.oracle = build_power_oracle(self.enc.matrix, self.form)
        hs = sample_hitting_set(n, h, self.gamma, self.rng)
        self.hubs = hs.vertices
        base = _SubPowers(
            self.hubs, self.hubs, query_submatrix_powers(self.oracle, self.hubs, self.hubs, h)
        )
        self.tables = [base]
        self.cover = set(self.hubs)
        self.touched = set()
        self.pending = []
        self.batch = batch_preprocess(self.field, [], [], h, [])
        self.maintained = [m.copy() for m in base.mats]
        self.hub_dists = _bounded_hub_table(self.hubs, self.maintained)
        self.phase_matrix = self.enc.matrix.copy()
        self.ops_in_phase = 0
        self.rebuild_count += 1

    def _validate_change(self, u, v, op):
        _check_vertex(self.n, u)
        _check_vertex(self.n, v)
        if u == v:
            raise GraphError(f"self-loop at {u} not allowed")
        if op == "insert":
            if self.graph.has_edge(u, v):
                raise EdgeAlreadyPresent(f"edge ({u}, {v}) already present")
        elif op == "delete":
            if not self.graph.has_edge(u, v):
                raise EdgeAbsent(f"edge ({u}, {v}) not present")
        else:
            raise ValueError(f"op must be 'insert' or 'delete', got {op!r}")

    def _border(self, u, v):
        """Store A-power strips so u, v join the readable index cover."""
        new = sorted(w for w in {u, v} if w not in self.cover)
        if not new:
            return
        h = self.h
        widened = sorted(self.cover | set(new))
        self.tables.append(
            _SubPowers(new, widened, query_submatrix_powers(self.oracle, new, widened, h))
        )
        base = sorted(self.cover)
        self.tables.append(
            _SubPowers(base, new, query_submatrix_powers(self.oracle, base, new, h))
        )
        self.cover |= set(new)

    def update(self, u, v, op):
        self._validate_change(u, v, op)
        self.ops_in_phase += 1
        if self.ops_in_phase >= self.phase_len:
            apply_edge_change(self.enc, u, v, op, self.rng)
            self._rebuild()
            return
        field, h = self.field, self.h
        self._border(u, v)
        self.touched |= {u, v}
        # current-matrix border powers, derived from the phase-start tables
        sb, tb = self.batch.s_list, self.batch.t_list
        col_u = batch_query(
            self.batch,
            self.hubs,
            [u],
            _materialize(field, self.tables, self.hubs, sb, h),
            _materialize(field, self.tables, tb, [u], h),
            _materialize(field, self.tables, self.hubs, [u], h),
        )
        row_v = batch_query(
            self.batch,
            [v],
            self.hubs,
            _materialize(field, self.tables, [v], sb, h),
            _materialize(field, self.tables, tb, self.hubs, h),
            _materialize(field, self.tables, [v], self.hubs, h),
        )
        cell_vu = batch_query(
            self.batch,
            [v],
            [u],
            _materialize(field, self.tables, [v], sb, h),
            _materialize(field, self.tables, tb, [u], h),
            _materialize(field, self.tables, [v], [u], h),
        )
        old_val = self.enc.matrix.data[u][v]
        _, _, new_val = apply_edge_change(self.enc, u, v, op, self.rng)
        # one-element resolvent step advances the maintained hub powers
        step = batch_preprocess(field, cell_vu, [(u, v, new_val)], h, [old_val])
        self.maintained = batch_query(
            step, self.hubs, self.hubs, col_u, row_v, self.maintained
        )
        self.hub_dists = _bounded_hub_table(self.hubs, self.maintained)
        # fold the change into the phase batch (latest value per position wins)
        self.pending = [e for e in self.pending if (e[0], e[1]) != (u, v)]
        self.pending.append((u, v, new_val))
        sb2, tb2 = batch_endpoints(self.pending)
        self.batch = batch_preprocess(
            field,
            _materialize(field, self.tables, tb2, sb2, h),
            self.pending,
            h,
            [self.phase_matrix.data[a][b] for a, b, _ in self.pending],
        )

    def query(self, s, t):
        _check_vertex(self.n, s)
        _check_vertex(self.n, t)
        if s == t:
            return 0
        tables = _extend_tables(self.oracle, self.cover, (s, t), self.h, self.tables)
        return _route_query(self.batch, self.hubs, self.hub_dists, tables, s, t)


# --- vertex-update oracle -----------------------------------------------------


class VertexUpdateOracle:
    """Distance queries under whole-vertex neighborhood replacement.

    Maintains Frobenius forms and power oracles of the encoding matrix
    and its transpose.  Replacing vertex v's out-edges changes one row,
    replacing its in-edges changes one column; each is a rank-1 change
    absorbed by rank1_update_fnf (falling back to a full normal-form
    recomputation only if the update certificate fails).  Queries read
    single-cell power sequences, so no hub machinery is needed.
    """

    def __init__(self, graph, rng, c=DEFAULT_FIELD_EXPONENT, field=None):
        if graph.weight_bound > 1:
            raise GraphError("oracle serves unweighted graphs; expand weights first")
        self.graph = graph
        self.n = graph.n
        self.rng = rng
        self.field = field if field is not None else Field(sample_prime(self.n, c, rng))
        self.fallback_rebuilds = 0
        last = None
        for _ in range(ENCODING_ATTEMPTS):
            enc = sample_encoding(graph, self.field, rng)
            try:
                form = compute_fnf(enc.matrix, rng)
                mat_t = enc.matrix.transpose()
                form_t = compute_fnf(mat_t, rng)
            except GenericityFailure as exc:
                last = exc
                continue
            break
        else:
            raise GenericityFailure(
                f"no generic encoding after {ENCODING_ATTEMPTS} samples"
            ) from last
        self.enc = enc
        self.mat_t = mat_t
        self.form, self.form_t = form, form_t
        self.oracle = build_power_oracle(enc.matrix, form)
        self.oracle_t = build_power_oracle(mat_t, form_t)

    def _absorb_rank1(self, col, row):
        """Refresh both forms for the already-applied change col * row^T."""
        mat = self.enc.matrix
        self.mat_t = mat.transpose()
        try:
            form, form_t = rank1_update_fnf(
                mat, self.oracle, self.oracle_t, col, row, self.rng
            )
        except GenericityFailure:
            self.fallback_rebuilds += 1
            form = compute_fnf(mat, self.rng)
            form_t = compute_fnf(self.mat_t, self.rng)
        self.form, self.form_t = form, form_t
        self.oracle = build_power_oracle(mat, form)
        self.oracle_t = build_power_oracle(self.mat_t, form_t)

    def update(self, v, new_out, new_in):
        """Replace v's out- and in-neighborhoods (sets of vertex ids)."""
        _check_vertex(self.n, v)
        new_out, new_in = set(new_out), set(new_in)
        for w in new_out | new_in:
            _check_vertex(self.n, w)
        if v in new_out or v in new_in:
            raise GraphError(f"self-loop at {v} not allowed")
        p = self.field.p
        unit = [1 if i == v else 0 for i in range(self.n)]
        if new_out != self.graph.out_targets(v):
            old_row, new_row = replace_out_edges(self.enc, v, new_out, self.rng)
            diff = [(a - b) % p for a, b in zip(new_row, old_row)]
            self._absorb_rank1(unit, diff)
        if new_in != self.graph.in_sources(v):
            old_col, new_col = replace_in_edges(self.enc, v, new_in, self.rng)
            diff = [(a - b) % p for a, b in zip(new_col, old_col)]
            self._absorb_rank1(diff, unit)

    def query(self, s, t):
        _check_vertex(self.n, s)
        _check_vertex(self.n, t)
        if s == t:
            return 0
        vals = query_cell_powers(self.oracle, s, t, self.n - 1)
        for k0, val in enumerate(vals):
            if val:
                return k0 + 1
        return None
