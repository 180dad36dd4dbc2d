"""Analysis machinery and Monte Carlo validation for a postselected
concatenated-C4 fault-tolerance scheme.

The package is organised as:

- ``c4``: the C4 code algebra (checks, logical/gauge supports, syndromes).
- ``decoder``: the flag-based recursive decoder for measured blocks.
- ``strengths``: the DECODE strength map on quasi-independence triples.
- ``engine``: the analytic level-reduction pipeline (Bell-pair noise
  profiles, CNOT-gadget effective noise, threshold scans, ancilla and
  overhead bounds).
- ``sim``: a vectorised Pauli-frame Monte Carlo simulator of the actual
  preparation/gadget circuits under independent depolarizing noise.
- ``cli``: the command-line front end.
"""

from .c4 import ErrorType, MeasurementBasis, syndrome, logical_bit, is_benign_pair
from .decoder import FlaggedBits, DecodeResult, MeasurementRecord, decode_block, decode_recursive
from .strengths import StrengthTriple, decode_strengths, verify_quasi_independence
from .engine import (
    NoiseModel,
    NoiseParams,
    NoiseProfile,
    Orientation,
    bp0_profile,
    bp1_profile,
    bpj_step,
    build_profile,
    gadget_noise,
    threshold_scan,
    ancilla_bounds,
    fibonacci,
    overhead,
    parallel_multipliers,
)

__all__ = [
    "ErrorType",
    "MeasurementBasis",
    "syndrome",
    "logical_bit",
    "is_benign_pair",
    "FlaggedBits",
    "DecodeResult",
    "MeasurementRecord",
    "decode_block",
    "decode_recursive",
    "StrengthTriple",
    "decode_strengths",
    "verify_quasi_independence",
    "NoiseModel",
    "NoiseParams",
    "NoiseProfile",
    "Orientation",
    "bp0_profile",
    "bp1_profile",
    "bpj_step",
    "build_profile",
    "gadget_noise",
    "threshold_scan",
    "ancilla_bounds",
    "fibonacci",
    "overhead",
    "parallel_multipliers",
]

__version__ = "0.1.0"
