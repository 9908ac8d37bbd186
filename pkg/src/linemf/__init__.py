"""LINE network embeddings and the shifted-PMI matrices they implicitly factor."""

from linemf.errors import GraphFormatError, LineMFError, UsageError, ValidationError
from linemf.graph import (
    AliasSampler,
    DegreeProfile,
    Graph,
    degree_profile,
    dump_edge_list,
    load_edge_list,
    make_edge_sampler,
    make_negative_sampler,
)
from linemf.matrices import (
    ShiftedPmiMatrix,
    bidirect,
    build_m1,
    build_m2,
    export_triplets,
    import_triplets,
    truncate_nonnegative,
)
from linemf.trainer import (
    EmbeddingSet,
    TrainConfig,
    init_embeddings,
    local_objective,
    pair_gradient,
    train,
)
from linemf.factorizer import FactorizationResult, dot_products, svd_embed
from linemf.verifier import (
    EquivalenceReport,
    closed_form_optimum,
    compare,
    emit_report,
    parse_report,
    verify_matrix_vs_optimum,
)

__version__ = "0.1.0"

__all__ = [
    "AliasSampler",
    "DegreeProfile",
    "EmbeddingSet",
    "EquivalenceReport",
    "FactorizationResult",
    "Graph",
    "GraphFormatError",
    "LineMFError",
    "ShiftedPmiMatrix",
    "TrainConfig",
    "UsageError",
    "ValidationError",
    "bidirect",
    "build_m1",
    "build_m2",
    "closed_form_optimum",
    "compare",
    "degree_profile",
    "dot_products",
    "dump_edge_list",
    "emit_report",
    "export_triplets",
    "import_triplets",
    "init_embeddings",
    "load_edge_list",
    "local_objective",
    "make_edge_sampler",
    "make_negative_sampler",
    "pair_gradient",
    "parse_report",
    "svd_embed",
    "train",
    "truncate_nonnegative",
    "verify_matrix_vs_optimum",
]
