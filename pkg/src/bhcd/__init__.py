"""Community detection on sparse graphs with the Bethe-Hessian H_r = (r^2 - 1) I + D - r A."""
from .generate import DcsbmParams, ThetaDistribution, sample_dcsbm
from .graph import Graph, LabelVector, estimate_rho_B, load_edge_list, load_labels
from .metrics import modularity, overlap
from .pipeline import AlgorithmOptions, ClusteringResult, algorithm1, baseline_cluster, estimate_k, kmeans
from .spectra import build_bethe_hessian, smallest_eigenpairs
from .theory import TheoryParams, detectable_count, predicted_overlap, recovery_metric
from .zeta import estimate_gamma_1_2, estimate_zeta_method2

__version__ = "0.1.0"

__all__ = [
    "AlgorithmOptions", "ClusteringResult", "DcsbmParams", "Graph", "LabelVector", "TheoryParams",
    "ThetaDistribution", "algorithm1", "baseline_cluster", "build_bethe_hessian", "detectable_count",
    "estimate_gamma_1_2", "estimate_k", "estimate_rho_B", "estimate_zeta_method2", "kmeans",
    "load_edge_list", "load_labels", "modularity", "overlap", "predicted_overlap", "recovery_metric",
    "sample_dcsbm", "smallest_eigenpairs",
]


def karate_paths():
    """Paths of the bundled karate club edge list and faction labels."""
    from importlib.resources import files

    d = files(__name__) / "data"
    return d / "karate.edges", d / "karate.labels"
