"""Exact linear algebra over prime fields with graph distance oracles.

The package has two halves.  The algebra half builds the Frobenius
normal form of a generic square matrix and answers queries about matrix
powers, rank-one perturbations, and batched element updates without ever
recomputing the form from scratch.  The graph half encodes a digraph as
a random weighted adjacency matrix over a large prime field and uses the
algebra to answer exact reachability-distance queries under edge
failures, dynamic edge updates, and vertex updates, verified against
brute-force search.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    DuplicatePosition,
    EdgeAbsent,
    EdgeAlreadyPresent,
    GenericityFailure,
    GraphError,
    ScriptError,
    SeriesNotInvertible,
    WeightOutOfRange,
    ZeroInverse,
)
from .field import Field, Poly, sample_prime
from .frobenius import (
    FrobeniusForm,
    PowerOracle,
    build_power_oracle,
    compute_fnf,
    query_cell_powers,
    query_submatrix_powers,
    vector_iterates_fast,
)
from .graphenc import (
    Digraph,
    GraphEncoding,
    expand_weights,
    format_edge_list,
    parse_edge_list,
    random_digraph,
    sample_encoding,
    split_vertices,
)
from .harness import (
    BruteForceSession,
    OracleSession,
    ReplayError,
    parse_script,
    replay,
    replay_records,
)
from .matrix import Matrix, PolyMatrix, mat_mul, mat_vec
from .oracles import (
    DynamicEdgeOracle,
    MultiFailureDSO,
    VertexUpdateOracle,
    bfs_oracle,
    dijkstra_oracle,
    sample_hitting_set,
)
from .updates import (
    PerturbationContext,
    batch_preprocess,
    batch_query,
    perturbed_iterates,
    rank1_update_fnf,
)

__all__ = [
    "__version__",
    "BruteForceSession",
    "Digraph",
    "DimensionMismatch",
    "DuplicatePosition",
    "DynamicEdgeOracle",
    "EdgeAbsent",
    "EdgeAlreadyPresent",
    "Field",
    "FrobeniusForm",
    "GenericityFailure",
    "GraphEncoding",
    "GraphError",
    "Matrix",
    "MultiFailureDSO",
    "OracleSession",
    "PerturbationContext",
    "Poly",
    "PolyMatrix",
    "PowerOracle",
    "ReplayError",
    "ScriptError",
    "SeriesNotInvertible",
    "VertexUpdateOracle",
    "WeightOutOfRange",
    "ZeroInverse",
    "batch_preprocess",
    "batch_query",
    "bfs_oracle",
    "build_power_oracle",
    "compute_fnf",
    "dijkstra_oracle",
    "expand_weights",
    "format_edge_list",
    "mat_mul",
    "mat_vec",
    "parse_edge_list",
    "parse_script",
    "perturbed_iterates",
    "query_cell_powers",
    "query_submatrix_powers",
    "random_digraph",
    "rank1_update_fnf",
    "replay",
    "replay_records",
    "sample_encoding",
    "sample_hitting_set",
    "sample_prime",
    "split_vertices",
    "vector_iterates_fast",
]
