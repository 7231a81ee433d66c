"""Script replay: command parsing, oracle sessions, and a brute-force twin.

A script drives one oracle, one command per line, vertices 1-based:

    # comment
    Q s t                       query the s-to-t distance
    E+ u v / E- u v             insert / delete an edge (dyn-edge oracle)
    F u1 v1 u2 v2 ...           fail an edge batch (dso oracle; F alone clears)
    FV v1 v2 ...                fail a vertex batch (dso with vertex failures)
    VX v | out: a b | in: c d   replace v's neighborhoods (vx oracle)

Each F/FV batch replaces the previous one.  Query results stream as
lines "Q s t -> d" with INF for unreachable.

OracleSession hides the graph reductions: weighted graphs are expanded
into chains, vertex-failure support splits every vertex, and queries,
failures, and distances are translated both ways.  BruteForceSession
exposes the same surface over textbook BFS/Dijkstra for verification.
"""

from collections import namedtuple

from .errors import GraphError, GenericityFailure, ScriptError
from .graphenc import expand_weights, split_vertices
from .oracles import (
    DEFAULT_ALPHA,
    DEFAULT_FIELD_EXPONENT,
    DEFAULT_GAMMA,
    DynamicEdgeOracle,
    MultiFailureDSO,
    VertexUpdateOracle,
    bfs_oracle,
    dijkstra_oracle,
)

ORACLE_KINDS = ("dso", "dyn-edge", "vx")

# Deliberately collision-prone; a session forced onto this field gives
# wrong answers often enough to demonstrate mismatch reporting, provided
# the graph is large enough that the hub set is a proper vertex subset.
TINY_FIELD_PRIME = 13

ScriptCommand = namedtuple("ScriptCommand", ["lineno", "kind", "args"])


class ReplayError(RuntimeError):
    """A command failed during replay; carries its index and line number."""

    def __init__(self, index, lineno, message):
        super().__init__(f"command {index + 1} (line {lineno}): {message}")
        self.index = index
        self.lineno = lineno


def _ints(lineno, tokens):
    try:
        vals = [int(t) for t in tokens]
    except ValueError:
        raise ScriptError(lineno, f"non-integer id in {' '.join(tokens)!r}") from None
    for v in vals:
        if v < 1:
            raise ScriptError(lineno, f"ids are 1-based, got {v}")
    return vals


def _parse_vx(lineno, line):
    parts = [p.strip() for p in line.split("|")]
    head = parts[0].split()
    if len(head) != 2 or len(parts) != 3:
        raise ScriptError(lineno, "VX syntax: VX v | out: list | in: list")
    (v,) = _ints(lineno, head[1:])
    sections = {}
    for part in parts[1:]:
        name, sep, rest = part.partition(":")
        name = name.strip()
        if not sep or name not in ("out", "in") or name in sections:
            raise ScriptError(lineno, "VX needs one 'out:' and one 'in:' section")
        sections[name] = [w - 1 for w in _ints(lineno, rest.split())]
    if set(sections) != {"out", "in"}:
        raise ScriptError(lineno, "VX needs one 'out:' and one 'in:' section")
    return ScriptCommand(
        lineno, "vertex_update", (v - 1, sections["out"], sections["in"])
    )


def parse_script(text):
    """Command list from script text; ScriptError carries the line number."""
    commands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "Q":
            if len(tokens) != 3:
                raise ScriptError(lineno, "Q syntax: Q s t")
            s, t = _ints(lineno, tokens[1:])
            commands.append(ScriptCommand(lineno, "query", (s - 1, t - 1)))
        elif tag in ("E+", "E-"):
            if len(tokens) != 3:
                raise ScriptError(lineno, f"{tag} syntax: {tag} u v")
            u, v = _ints(lineno, tokens[1:])
            kind = "insert" if tag == "E+" else "delete"
            commands.append(ScriptCommand(lineno, kind, (u - 1, v - 1)))
        elif tag == "F":
            rest = _ints(lineno, tokens[1:])
            if len(rest) % 2:
                raise ScriptError(lineno, "F takes an even count of vertex ids")
            edges = [(rest[i] - 1, rest[i + 1] - 1) for i in range(0, len(rest), 2)]
            commands.append(ScriptCommand(lineno, "fail_edges", edges))
        elif tag == "FV":
            verts = [v - 1 for v in _ints(lineno, tokens[1:])]
            commands.append(ScriptCommand(lineno, "fail_vertices", verts))
        elif tag == "VX":
            commands.append(_parse_vx(lineno, line))
        else:
            raise ScriptError(lineno, f"unknown command {tag!r}")
    return commands


def format_result(command, distance):
    s, t = command.args
    shown = "INF" if distance is None else str(distance)
    return f"Q {s + 1} {t + 1} -> {shown}"


class OracleSession:
    """One oracle over one graph, with reductions applied at ingestion.

    All vertex ids on this surface are 0-based ids of the original
    graph; mapping into the expanded/split graph and back is internal.
    """

    def __init__(self, graph, kind, rng, *, vertex_failures=False,
                 c=DEFAULT_FIELD_EXPONENT, gamma=DEFAULT_GAMMA,
                 alpha=DEFAULT_ALPHA, field=None):
        if kind not in ORACLE_KINDS:
            raise GraphError(f"unknown oracle kind {kind!r}")
        if kind != "dso":
            if graph.weight_bound > 1:
                raise GraphError(f"the {kind} oracle serves unweighted graphs only")
            if vertex_failures:
                raise GraphError("vertex failures are a dso-oracle feature")
        self.base = graph
        self.kind = kind
        self.n = graph.n
        self.expansion = None
        self.splitting = None
        work = graph
        if graph.weight_bound > 1:
            work, self.expansion = expand_weights(work)
        if vertex_failures:
            work, self.splitting = split_vertices(work)
        if kind == "dso":
            self.oracle = MultiFailureDSO(work, rng, c=c, gamma=gamma, field=field)
        elif kind == "dyn-edge":
            self.oracle = DynamicEdgeOracle(
                work, rng, alpha=alpha, c=c, gamma=gamma, field=field
            )
        else:
            self.oracle = VertexUpdateOracle(work, rng, c=c, field=field)

    def _check(self, v):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} outside [0, {self.n})")

    def query(self, s, t):
        self._check(s)
        self._check(t)
        x, y = s, t
        if self.expansion is not None:
            x, y = self.expansion.vertex(x), self.expansion.vertex(y)
        if self.splitting is not None:
            x, y = self.splitting.source(x), self.splitting.target(y)
        d = self.oracle.query(x, y)
        if self.splitting is not None:
            d = self.splitting.distance_back(d)
        return d

    def fail(self, edges, vertices=()):
        if self.kind != "dso":
            raise GraphError("failure batches need the dso oracle")
        vertices = list(vertices)
        if vertices and self.splitting is None:
            raise GraphError("vertex failures need a session built with them enabled")
        mapped = []
        for u, v in edges:
            self._check(u)
            self._check(v)
            w = self.base.weight(u, v)  # raises EdgeAbsent for unknown edges
            e = (u, v)
            if self.expansion is not None:
                e = self.expansion.edge(u, v, w)
            if self.splitting is not None:
                e = self.splitting.edge_failure(*e)
            mapped.append(e)
        for v in vertices:
            self._check(v)
            x = self.expansion.vertex(v) if self.expansion is not None else v
            mapped.append(self.splitting.vertex_failure(x))
        self.oracle.update(mapped)

    def insert_edge(self, u, v):
        if self.kind != "dyn-edge":
            raise GraphError("edge updates need the dyn-edge oracle")
        self.oracle.update(u, v, "insert")

    def delete_edge(self, u, v):
        if self.kind != "dyn-edge":
            raise GraphError("edge updates need the dyn-edge oracle")
        self.oracle.update(u, v, "delete")

    def vertex_update(self, v, new_out, new_in):
        if self.kind != "vx":
            raise GraphError("vertex updates need the vx oracle")
        self.oracle.update(v, new_out, new_in)


class BruteForceSession:
    """Same surface as OracleSession, answered by BFS/Dijkstra directly."""

    def __init__(self, graph, kind, *, vertex_failures=False):
        if kind not in ORACLE_KINDS:
            raise GraphError(f"unknown oracle kind {kind!r}")
        self.kind = kind
        self.mirror = graph.copy()
        self.n = graph.n
        self.allow_vertex_failures = vertex_failures
        self.failed_edges = set()
        self.failed_vertices = set()

    def _check(self, v):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} outside [0, {self.n})")

    def query(self, s, t):
        self._check(s)
        self._check(t)
        if self.mirror.weight_bound > 1:
            return dijkstra_oracle(
                self.mirror, self.failed_edges, s, t, self.failed_vertices
            )
        return bfs_oracle(self.mirror, self.failed_edges, s, t, self.failed_vertices)

    def fail(self, edges, vertices=()):
        if self.kind != "dso":
            raise GraphError("failure batches need the dso oracle")
        vertices = list(vertices)
        if vertices and not self.allow_vertex_failures:
            raise GraphError("vertex failures need a session built with them enabled")
        for u, v in edges:
            self._check(u)
            self._check(v)
            self.mirror.weight(u, v)
        for v in vertices:
            self._check(v)
        self.failed_edges = {tuple(e) for e in edges}
        self.failed_vertices = set(vertices)

    def insert_edge(self, u, v):
        if self.kind != "dyn-edge":
            raise GraphError("edge updates need the dyn-edge oracle")
        self.mirror.add_edge(u, v)

    def delete_edge(self, u, v):
        if self.kind != "dyn-edge":
            raise GraphError("edge updates need the dyn-edge oracle")
        self.mirror.remove_edge(u, v)

    def vertex_update(self, v, new_out, new_in):
        if self.kind != "vx":
            raise GraphError("vertex updates need the vx oracle")
        self._check(v)
        new_out, new_in = set(new_out), set(new_in)
        for w in new_out | new_in:
            self._check(w)
        if v in new_out or v in new_in:
            raise GraphError(f"self-loop at {v} not allowed")
        for t in list(self.mirror.out_targets(v)):
            self.mirror.remove_edge(v, t)
        for s in list(self.mirror.in_sources(v)):
            self.mirror.remove_edge(s, v)
        for w in new_out:
            self.mirror.add_edge(v, w)
        for w in new_in:
            self.mirror.add_edge(w, v)


def apply_command(session, command):
    """Run one parsed command; returns the distance for queries, else None."""
    kind, args = command.kind, command.args
    if kind == "query":
        return session.query(*args)
    if kind == "insert":
        session.insert_edge(*args)
    elif kind == "delete":
        session.delete_edge(*args)
    elif kind == "fail_edges":
        session.fail(args)
    elif kind == "fail_vertices":
        session.fail((), args)
    elif kind == "vertex_update":
        session.vertex_update(*args)
    else:
        raise ScriptError(command.lineno, f"unknown command kind {kind!r}")
    return None


def replay_records(session, commands, pool=None):
    """Replay and collect one json-friendly dict per query, ids 1-based."""
    out = []
    for index, cmd, distance in replay(session, commands, pool):
        s, t = cmd.args
        out.append(
            {
                "index": index + 1,
                "line": cmd.lineno,
                "s": s + 1,
                "t": t + 1,
                "distance": distance,
            }
        )
    return out


def replay(session, commands, pool=None):
    """Yield (index, command, distance) per query, applying updates in order.

    With a thread pool, runs of consecutive queries execute concurrently
    (queries are read-only); results are re-emitted in script order.
    """
    i = 0
    total = len(commands)
    while i < total:
        cmd = commands[i]
        if pool is not None and cmd.kind == "query":
            j = i
            while j < total and commands[j].kind == "query":
                j += 1
            futures = [pool.submit(session.query, *c.args) for c in commands[i:j]]
            for k, fut in enumerate(futures):
                try:
                    result = fut.result()
                except (ValueError, GenericityFailure) as exc:
                    raise ReplayError(i + k, commands[i + k].lineno, str(exc)) from exc
                yield i + k, commands[i + k], result
            i = j
            continue
        try:
            result = apply_command(session, cmd)
        except (ValueError, GenericityFailure) as exc:
            raise ReplayError(i, cmd.lineno, str(exc)) from exc
        if cmd.kind == "query":
            yield i, cmd, result
        i += 1
