"""Lossy gossip: the monoid of min-plus products of metric matrices."""

from .trop import (
    INF,
    Call,
    CallSequence,
    TropMatrix,
    apply_call,
    build_W,
    core_witness,
    identity,
    is_irredundant,
    is_metric,
    kleene_star,
    metric_as_calls,
    phone_call_matrix,
    product_of_calls,
    symmetric_core,
    trop_mat_mul,
)

__all__ = [
    "INF", "Call", "CallSequence", "TropMatrix", "apply_call", "build_W", "core_witness",
    "identity", "is_irredundant", "is_metric", "kleene_star", "metric_as_calls",
    "phone_call_matrix", "product_of_calls", "symmetric_core", "trop_mat_mul",
]

__version__ = "0.1.0"
