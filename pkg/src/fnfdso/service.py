"""HTTP session service: oracles behind a small JSON API.

Sessions are created from an edge-list body plus oracle options, then
driven one command at a time or by replaying a whole script.  Vertex
ids on the wire are 1-based, matching the file formats.  Each session
carries its own lock, so concurrent clients cannot interleave an
update with a query mid-flight.
"""

import random
import threading
import uuid
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict
from pydantic import Field as ModelField

from .errors import GenericityFailure, ScriptError
from .field import Field
from .graphenc import format_edge_list, parse_edge_list, random_digraph
from .harness import (
    TINY_FIELD_PRIME,
    OracleSession,
    ReplayError,
    parse_script,
    replay_records,
)

MAX_SEED = 2**64 - 1

OracleKind = Literal["dso", "dyn-edge", "vx"]


class SessionRequest(BaseModel):
    graph: str
    oracle: OracleKind
    seed: int = ModelField(ge=0, le=MAX_SEED)
    vertex_failures: bool = False
    c: int = ModelField(default=1, ge=1)
    gamma: float = 4.0
    alpha: float = 0.5
    tiny_field: bool = False


class SessionInfo(BaseModel):
    session_id: str
    oracle: OracleKind
    n: int
    vertex_failures: bool


class QueryRequest(BaseModel):
    s: int = ModelField(ge=1)
    t: int = ModelField(ge=1)


class QueryResponse(BaseModel):
    s: int
    t: int
    distance: Optional[int]


class FailureRequest(BaseModel):
    edges: list[tuple[int, int]] = []
    vertices: list[int] = []


class EdgeUpdateRequest(BaseModel):
    op: Literal["insert", "delete"]
    u: int = ModelField(ge=1)
    v: int = ModelField(ge=1)


class VertexUpdateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    v: int = ModelField(ge=1)
    out: list[int] = []
    in_: list[int] = ModelField(default=[], alias="in")


class ScriptRequest(BaseModel):
    text: str


class QueryRecord(BaseModel):
    index: int
    line: int
    s: int
    t: int
    distance: Optional[int]


class ScriptResponse(BaseModel):
    results: list[QueryRecord]


class GenRequest(BaseModel):
    seed: int = ModelField(ge=0, le=MAX_SEED)
    n: int = ModelField(ge=1)
    density: float = ModelField(ge=0.0, le=1.0)
    weight_bound: int = ModelField(default=1, ge=1)


class GenResponse(BaseModel):
    graph: str


class _SessionBox:
    __slots__ = ("session", "options", "lock")

    def __init__(self, session, options):
        self.session = session
        self.options = options
        self.lock = threading.Lock()


def _bad_request(exc):
    return HTTPException(status_code=400, detail=str(exc))


def create_app():
    app = FastAPI(title="fnfdso sessions")
    boxes: dict[str, _SessionBox] = {}
    registry_lock = threading.Lock()

    def box_of(session_id):
        with registry_lock:
            box = boxes.get(session_id)
        if box is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return box

    def info_of(session_id, box):
        return SessionInfo(
            session_id=session_id,
            oracle=box.options.oracle,
            n=box.session.n,
            vertex_failures=box.options.vertex_failures,
        )

    @app.post("/graphs", response_model=GenResponse)
    def generate(req: GenRequest):
        rng = random.Random(req.seed)
        graph = random_digraph(req.n, req.density, req.weight_bound, rng)
        return GenResponse(graph=format_edge_list(graph))

    @app.post("/sessions", response_model=SessionInfo)
    def create_session(req: SessionRequest):
        try:
            graph = parse_edge_list(req.graph)
            session = OracleSession(
                graph,
                req.oracle,
                random.Random(req.seed),
                vertex_failures=req.vertex_failures,
                c=req.c,
                gamma=req.gamma,
                alpha=req.alpha,
                field=Field(TINY_FIELD_PRIME) if req.tiny_field else None,
            )
        except (ValueError, GenericityFailure) as exc:
            raise _bad_request(exc) from exc
        session_id = uuid.uuid4().hex
        with registry_lock:
            boxes[session_id] = _SessionBox(session, req)
        return info_of(session_id, boxes[session_id])

    @app.get("/sessions/{session_id}", response_model=SessionInfo)
    def session_info(session_id: str):
        return info_of(session_id, box_of(session_id))

    @app.delete("/sessions/{session_id}")
    def drop_session(session_id: str):
        with registry_lock:
            if boxes.pop(session_id, None) is None:
                raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return {"deleted": session_id}

    @app.post("/sessions/{session_id}/query", response_model=QueryResponse)
    def query(session_id: str, req: QueryRequest):
        box = box_of(session_id)
        with box.lock:
            try:
                distance = box.session.query(req.s - 1, req.t - 1)
            except ValueError as exc:
                raise _bad_request(exc) from exc
        return QueryResponse(s=req.s, t=req.t, distance=distance)

    @app.post("/sessions/{session_id}/fail")
    def fail(session_id: str, req: FailureRequest):
        box = box_of(session_id)
        edges = [(u - 1, v - 1) for u, v in req.edges]
        vertices = [v - 1 for v in req.vertices]
        if any(u < 0 or v < 0 for u, v in edges) or any(v < 0 for v in vertices):
            raise _bad_request("ids are 1-based")
        with box.lock:
            try:
                box.session.fail(edges, vertices)
            except (ValueError, GenericityFailure) as exc:
                raise _bad_request(exc) from exc
        return {"failed_edges": len(edges), "failed_vertices": len(vertices)}

    @app.post("/sessions/{session_id}/edge")
    def edge_update(session_id: str, req: EdgeUpdateRequest):
        box = box_of(session_id)
        with box.lock:
            try:
                if req.op == "insert":
                    box.session.insert_edge(req.u - 1, req.v - 1)
                else:
                    box.session.delete_edge(req.u - 1, req.v - 1)
            except (ValueError, GenericityFailure) as exc:
                raise _bad_request(exc) from exc
        return {"op": req.op, "u": req.u, "v": req.v}

    @app.post("/sessions/{session_id}/vertex")
    def vertex_update(session_id: str, req: VertexUpdateRequest):
        box = box_of(session_id)
        new_out = [w - 1 for w in req.out]
        new_in = [w - 1 for w in req.in_]
        if req.v < 1 or any(w < 0 for w in new_out + new_in):
            raise _bad_request("ids are 1-based")
        with box.lock:
            try:
                box.session.vertex_update(req.v - 1, new_out, new_in)
            except (ValueError, GenericityFailure) as exc:
                raise _bad_request(exc) from exc
        return {"v": req.v}

    @app.post("/sessions/{session_id}/script", response_model=ScriptResponse)
    def run_script(session_id: str, req: ScriptRequest):
        box = box_of(session_id)
        with box.lock:
            try:
                commands = parse_script(req.text)
                records = replay_records(box.session, commands)
            except (ScriptError, ReplayError, ValueError, GenericityFailure) as exc:
                raise _bad_request(exc) from exc
        return ScriptResponse(results=[QueryRecord(**r) for r in records])

    return app


app = create_app()
