"""Stretch factor of randomly embedded random graphs."""

from ._backend import BACKEND
from .errors import ConfigError, InvalidInputError, NoValidCError, StretchLabError
from .geom import ClippedDisc, Point, disc_square_area, euclid, prop1_lower_bound, sample_point
from .model import EmbeddedGraph, ModelParams, edge_weight, generate
from .stretch import StretchReport, apsp, oracle_stretch, sssp, stretch_factor

__all__ = [
    "BACKEND",
    "ClippedDisc",
    "ConfigError",
    "EmbeddedGraph",
    "InvalidInputError",
    "ModelParams",
    "NoValidCError",
    "Point",
    "StretchLabError",
    "StretchReport",
    "apsp",
    "disc_square_area",
    "edge_weight",
    "euclid",
    "generate",
    "oracle_stretch",
    "prop1_lower_bound",
    "sample_point",
    "sssp",
    "stretch_factor",
]

__version__ = "0.1.0"
