"""Secure distributed matrix multiplication with roots-of-unity polynomial codes."""

from ._core import (
    Error,
    InsufficientResponses,
    SchemeParams,
    audit,
    calibrate_sigma2,
    decode,
    decode_frame,
    encode,
    encode_frame,
    multiply,
    recovery_threshold,
    run_local,
    schemes,
    sweep,
    verify_bounds,
    worker_compute,
)

__all__ = [
    "Error",
    "InsufficientResponses",
    "SchemeParams",
    "audit",
    "calibrate_sigma2",
    "decode",
    "decode_frame",
    "encode",
    "encode_frame",
    "multiply",
    "recovery_threshold",
    "run_local",
    "schemes",
    "sweep",
    "verify_bounds",
    "worker_compute",
]
