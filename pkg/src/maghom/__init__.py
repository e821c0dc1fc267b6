"""Magnitude homology of finite metric spaces and betweenness structures."""
from __future__ import annotations

from .homology import HomologyTable, magnitude_homology
from .intlinalg import FGAbelianGroup, IntMatrix, smith_normal_form
from .magchain import PathComplex, enumerate_paths
from .spaces import FiniteGraph, FiniteSpace, graph_metric, l1_product, restrict

__all__ = [
    "FGAbelianGroup",
    "FiniteGraph",
    "FiniteSpace",
    "HomologyTable",
    "IntMatrix",
    "PathComplex",
    "enumerate_paths",
    "graph_metric",
    "l1_product",
    "magnitude_homology",
    "restrict",
    "smith_normal_form",
]
