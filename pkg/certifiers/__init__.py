# 圖建構與證書：正交圖、團證書、譜證書、等距見證與網格報表
from .cliques import (
    CertificateMode,
    CliqueCertificate,
    clique_certificate_check,
    max_clique,
    verify_k_free,
)
from .config import Settings, load_settings
from .exports import read_dimacs, write_dimacs, write_edgelist
from .graphs import (
    Family,
    Graph,
    GraphMeta,
    GraphStats,
    build_ak,
    build_gamma,
    build_gamma_prime,
    graph_stats,
    induced_neighborhood,
    rebuild,
    strongly_regular_parameters,
)
from .isometry import (
    IsometryWitness,
    apply_isometry,
    base_witness,
    gram_matrix,
    neighborhood_isomorphism,
    preserves_adjacency,
    transitivity_witness,
)
from .report import GridResult, GridRowSpec, arun_grid, density_trend, run_grid
from .spectral import (
    SpectralReport,
    eigenvalues,
    interlacing_check,
    pseudorandomness_report,
    verify_gamma_prime_identity,
)

__all__ = [
    "CertificateMode",
    "CliqueCertificate",
    "clique_certificate_check",
    "max_clique",
    "verify_k_free",
    "Settings",
    "load_settings",
    "read_dimacs",
    "write_dimacs",
    "write_edgelist",
    "Family",
    "Graph",
    "GraphMeta",
    "GraphStats",
    "build_ak",
    "build_gamma",
    "build_gamma_prime",
    "graph_stats",
    "induced_neighborhood",
    "rebuild",
    "strongly_regular_parameters",
    "IsometryWitness",
    "apply_isometry",
    "base_witness",
    "gram_matrix",
    "neighborhood_isomorphism",
    "preserves_adjacency",
    "transitivity_witness",
    "GridResult",
    "GridRowSpec",
    "arun_grid",
    "density_trend",
    "run_grid",
    "SpectralReport",
    "eigenvalues",
    "interlacing_check",
    "pseudorandomness_report",
    "verify_gamma_prime_identity",
]

__version__ = "1.0.0"
