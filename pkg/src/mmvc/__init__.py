"""Verifiable outsourcing of matrix-vector products over prime-order groups."""

from mmvc.scheme import (
    EvaluationKey,
    FunctionVerificationKey,
    InputEncoding,
    Matrix,
    PublicParams,
    ServerResponse,
    combine_rows,
    compute,
    keygen,
    probgen,
    setup,
    verify,
)

__version__ = "0.1.0"
