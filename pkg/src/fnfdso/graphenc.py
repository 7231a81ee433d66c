"""Digraphs, their text format, and random field encodings.

A digraph on n vertices becomes an n x n matrix over a large prime
field: every vertex and every edge draws a fresh nonzero scalar, entry
(u, v) holds x_uv * y_v on the support (diagonal plus edges) and zero
elsewhere.  With a prime of magnitude n**(4+c) the minimal k with
(A^k)_{u,v} nonzero equals the BFS distance from u to v with high
probability, which is what the distance oracles exploit.

Weighted graphs and vertex failures reduce to the plain setting:
expand_weights replaces each vertex by a chain so a weight-w edge
becomes a w-step path; split_vertices doubles each vertex into an
in/out pair so a vertex failure becomes an edge failure.

Vertices are 0-based everywhere in code; the text format is 1-based.
"""

from .errors import (
    EdgeAbsent,
    EdgeAlreadyPresent,
    GraphError,
    ScriptError,
    WeightOutOfRange,
)
from .matrix import Matrix


class Digraph:
    """Simple digraph on vertices 0..n-1; no self-loops, no parallel edges.

    weight_bound == 1 means unweighted (weights is None); otherwise
    weights maps every edge to an int in [1, weight_bound].
    """

    __slots__ = ("n", "edges", "weights", "weight_bound")

    def __init__(self, n, edges=(), weights=None, weight_bound=1):
        if n < 1:
            raise GraphError("need at least one vertex")
        if weight_bound < 1:
            raise GraphError("weight bound must be at least 1")
        self.n = n
        self.edges = set()
        self.weights = {} if weight_bound > 1 else None
        self.weight_bound = weight_bound
        for e in edges:
            if weight_bound > 1:
                u, v, w = e if len(e) == 3 else (*e, 1)
                self.add_edge(u, v, w)
            else:
                u, v = e
                self.add_edge(u, v)

    def _check_vertex(self, v):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} outside [0, {self.n})")

    def add_edge(self, u, v, w=1):
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise GraphError(f"self-loop at {u} not allowed")
        if (u, v) in self.edges:
            raise EdgeAlreadyPresent(f"edge ({u}, {v}) already present")
        if not 1 <= w <= self.weight_bound:
            raise WeightOutOfRange(f"weight {w} outside [1, {self.weight_bound}]")
        self.edges.add((u, v))
        if self.weights is not None:
            self.weights[(u, v)] = w

    def remove_edge(self, u, v):
        if (u, v) not in self.edges:
            raise EdgeAbsent(f"edge ({u}, {v}) not present")
        self.edges.discard((u, v))
        if self.weights is not None:
            del self.weights[(u, v)]

    def has_edge(self, u, v):
        return (u, v) in self.edges

    def weight(self, u, v):
        if (u, v) not in self.edges:
            raise EdgeAbsent(f"edge ({u}, {v}) not present")
        return 1 if self.weights is None else self.weights[(u, v)]

    def out_targets(self, v):
        return {t for (s, t) in self.edges if s == v}

    def in_sources(self, v):
        return {s for (s, t) in self.edges if t == v}

    def sorted_edges(self):
        return sorted(self.edges)

    def copy(self):
        g = Digraph.__new__(Digraph)
        g.n = self.n
        g.edges = set(self.edges)
        g.weights = dict(self.weights) if self.weights is not None else None
        g.weight_bound = self.weight_bound
        return g

    def __eq__(self, other):
        return (
            isinstance(other, Digraph)
            and other.n == self.n
            and other.edges == self.edges
            and other.weights == self.weights
            and other.weight_bound == self.weight_bound
        )

    def __repr__(self):
        kind = f", W={self.weight_bound}" if self.weight_bound > 1 else ""
        return f"Digraph(n={self.n}, m={len(self.edges)}{kind})"


def random_digraph(n, density, weight_bound, rng):
    """Each ordered pair u != v becomes an edge with the given probability.

    Weights are uniform in [1, weight_bound] when weight_bound > 1.  The
    pair scan order is fixed, so one seed always yields one graph.
    """
    g = Digraph(n, weight_bound=weight_bound)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                w = rng.randint(1, weight_bound) if weight_bound > 1 else 1
                g.add_edge(u, v, w)
    return g


# --- text format ------------------------------------------------------------


def format_edge_list(g):
    """Header "n m" (plus the weight bound when weighted), then sorted edges."""
    lines = []
    if g.weight_bound > 1:
        lines.append(f"{g.n} {len(g.edges)} {g.weight_bound}")
        for u, v in g.sorted_edges():
            lines.append(f"{u + 1} {v + 1} {g.weights[(u, v)]}")
    else:
        lines.append(f"{g.n} {len(g.edges)}")
        for u, v in g.sorted_edges():
            lines.append(f"{u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text):
    """Inverse of format_edge_list; raises ScriptError with a line number."""
    lines = text.splitlines()
    if not lines or not lines[0].split():
        raise ScriptError(1, "missing header")
    head = lines[0].split()
    if len(head) not in (2, 3):
        raise ScriptError(1, f"header needs 'n m' or 'n m W', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
        bound = int(head[2]) if len(head) == 3 else 1
    except ValueError:
        raise ScriptError(1, f"non-integer header field in {lines[0]!r}") from None
    if n < 1 or m < 0 or bound < 1:
        raise ScriptError(1, f"bad header values in {lines[0]!r}")
    g = Digraph(n, weight_bound=bound)
    count = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens:
            continue
        expected = 3 if bound > 1 else 2
        if len(tokens) != expected:
            raise ScriptError(lineno, f"expected {expected} fields, got {len(tokens)}")
        try:
            vals = [int(t) for t in tokens]
        except ValueError:
            raise ScriptError(lineno, f"non-integer field in {raw!r}") from None
        u, v = vals[0], vals[1]
        if not (1 <= u <= n and 1 <= v <= n):
            raise ScriptError(lineno, f"vertex outside [1, {n}]")
        try:
            g.add_edge(u - 1, v - 1, vals[2] if bound > 1 else 1)
        except GraphError as exc:
            raise ScriptError(lineno, str(exc)) from None
        count += 1
    if count != m:
        raise ScriptError(len(lines), f"header announced {m} edges, found {count}")
    return g


# --- random field encoding --------------------------------------------------


class GraphEncoding:
    """Random weighted-adjacency matrix of a digraph over a prime field.

    x maps each support position (every edge plus every diagonal (v, v))
    to a nonzero scalar, y maps each vertex to a nonzero scalar, and
    matrix[u][v] = x[(u, v)] * y[v] on the support.  The diagonal keeps
    walks alive: once a walk reaches v it can wait there, so powers of
    the matrix witness all path lengths at or above the distance.
    """

    __slots__ = ("graph", "field", "x", "y", "matrix")

    def __init__(self, graph, field, x, y, matrix):
        self.graph = graph
        self.field = field
        self.x = x
        self.y = y
        self.matrix = matrix


def sample_encoding(graph, field, rng):
    """Fresh nonzero scalars for every vertex, diagonal, and edge.

    Draw order (all y by vertex, diagonal x by vertex, edge x sorted) is
    fixed so one seed always produces one encoding.
    """
    n = graph.n
    y = {v: field.rand_nonzero(rng) for v in range(n)}
    x = {(v, v): field.rand_nonzero(rng) for v in range(n)}
    for e in graph.sorted_edges():
        x[e] = field.rand_nonzero(rng)
    matrix = Matrix.zero(field, n, n)
    for (u, v), xv in x.items():
        matrix.data[u][v] = xv * y[v] % field.p
    return GraphEncoding(graph, field, x, y, matrix)


def apply_edge_change(enc, u, v, op, rng):
    """Insert or delete edge (u, v) in the graph and its encoding.

    Insertions draw a fresh x scalar, keeping the matrix distributed as
    a fresh encoding of the new graph.  Returns the element update
    (u, v, new_matrix_value) for consumption by power-update batches.
    Only unweighted graphs support in-place edge changes.
    """
    g = enc.graph
    if g.weight_bound > 1:
        raise GraphError("edge changes require an unweighted graph")
    if op == "insert":
        g.add_edge(u, v)
        xv = enc.field.rand_nonzero(rng)
        enc.x[(u, v)] = xv
        value = xv * enc.y[v] % enc.field.p
    elif op == "delete":
        g.remove_edge(u, v)
        del enc.x[(u, v)]
        value = 0
    else:
        raise ValueError(f"op must be 'insert' or 'delete', got {op!r}")
    enc.matrix.data[u][v] = value
    return (u, v, value)


def replace_out_edges(enc, v, targets, rng):
    """Point v's out-edges at `targets` with fresh scalars; diagonal kept.

    Returns (old_row, new_row) of the encoding matrix for building the
    rank-one row difference.
    """
    g = enc.graph
    if g.weight_bound > 1:
        raise GraphError("vertex updates require an unweighted graph")
    targets = set(targets)
    if v in targets:
        raise GraphError(f"self-loop at {v} not allowed")
    for t in targets:
        g._check_vertex(t)
    g._check_vertex(v)
    old_row = enc.matrix.row(v)
    for t in g.out_targets(v):
        g.remove_edge(v, t)
        del enc.x[(v, t)]
    new_row = [0] * g.n
    new_row[v] = old_row[v]  # diagonal entry untouched
    for t in sorted(targets):
        g.add_edge(v, t)
        xv = enc.field.rand_nonzero(rng)
        enc.x[(v, t)] = xv
        new_row[t] = xv * enc.y[t] % enc.field.p
    enc.matrix.set_row(v, new_row)
    return old_row, new_row


def replace_in_edges(enc, v, sources, rng):
    """Point v's in-edges from `sources` with fresh scalars; diagonal kept.

    Returns (old_col, new_col) of the encoding matrix.
    """
    g = enc.graph
    if g.weight_bound > 1:
        raise GraphError("vertex updates require an unweighted graph")
    sources = set(sources)
    if v in sources:
        raise GraphError(f"self-loop at {v} not allowed")
    for s in sources:
        g._check_vertex(s)
    g._check_vertex(v)
    old_col = enc.matrix.col(v)
    for s in g.in_sources(v):
        g.remove_edge(s, v)
        del enc.x[(s, v)]
    new_col = [0] * g.n
    new_col[v] = old_col[v]
    yv = enc.y[v]
    for s in sorted(sources):
        g.add_edge(s, v)
        xv = enc.field.rand_nonzero(rng)
        enc.x[(s, v)] = xv
        new_col[s] = xv * yv % enc.field.p
    enc.matrix.set_col(v, new_col)
    return old_col, new_col


# --- reductions -------------------------------------------------------------


class WeightExpansion:
    """Map between a weighted digraph and its unweighted chain expansion.

    Vertex v becomes a chain v_W -> ... -> v_1 (ids v*W + c - 1 for level
    c); an edge of weight w enters the target's chain w levels up, so
    every original distance is preserved exactly between level-1 copies.
    """

    __slots__ = ("n_orig", "bound")

    def __init__(self, n_orig, bound):
        self.n_orig = n_orig
        self.bound = bound

    def vertex(self, v):
        """Level-1 copy of v, the endpoint used for queries."""
        return v * self.bound

    def edge(self, u, v, w):
        """Image of a weight-w edge (u, v)."""
        return (u * self.bound, v * self.bound + w - 1)

    def chain_edges(self, v):
        base = v * self.bound
        return [(base + c - 1, base + c - 2) for c in range(2, self.bound + 1)]


def expand_weights(graph):
    """Unweighted digraph with identical distances between level-1 copies."""
    bound = graph.weight_bound
    exp = WeightExpansion(graph.n, bound)
    out = Digraph(graph.n * bound)
    for v in range(graph.n):
        for e in exp.chain_edges(v):
            out.add_edge(*e)
    for u, v in graph.sorted_edges():
        out.add_edge(*exp.edge(u, v, graph.weight(u, v)))
    return out, exp


class VertexSplit:
    """Map between a digraph and its in/out split.

    Vertex v becomes v_in = 2v and v_out = 2v + 1 joined by one edge;
    original edges run out-to-in.  A path of length d becomes one of
    length 2d + 1 between s_in and t_out, and failing a vertex means
    failing its inner edge.
    """

    __slots__ = ("n_orig",)

    def __init__(self, n_orig):
        self.n_orig = n_orig

    def source(self, s):
        return 2 * s

    def target(self, t):
        return 2 * t + 1

    def vertex_failure(self, v):
        return (2 * v, 2 * v + 1)

    def edge_failure(self, u, v):
        return (2 * u + 1, 2 * v)

    def distance_back(self, d):
        if d is None:
            return None
        if d % 2 == 0:
            raise ValueError(f"split distances are odd, got {d}")
        return (d - 1) // 2


def split_vertices(graph):
    """In/out split; requires an unweighted graph (expand weights first)."""
    if graph.weight_bound > 1:
        raise GraphError("split requires an unweighted graph")
    split = VertexSplit(graph.n)
    out = Digraph(2 * graph.n)
    for v in range(graph.n):
        out.add_edge(2 * v, 2 * v + 1)
    for u, v in graph.sorted_edges():
        out.add_edge(2 * u + 1, 2 * v)
    return out, split
