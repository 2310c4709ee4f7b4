"""
Weyl quantization at the level of h-jets: Moyal product, operator
logarithm of formal FIOs and the quantum Birkhoff normal form.
"""

from __future__ import annotations

from .moyal import commutator, moyal, quantum_bracket, star_exp, star_inverse, star_log, star_pow
from .oplog import (
    FormalFIO,
    OperatorLogResult,
    conjugation_transport,
    gauge_difference,
    operator_log,
    reconstruct_amplitude,
)
from .qbnf import (
    FIONormalForm,
    QuantumNormalForm,
    SymbolNormalForm,
    adjoint_exp,
    fio_normal_form,
    quantum_bnf,
    symbol_normal_form,
)

__all__ = [
    "FIONormalForm",
    "FormalFIO",
    "OperatorLogResult",
    "QuantumNormalForm",
    "SymbolNormalForm",
    "adjoint_exp",
    "commutator",
    "conjugation_transport",
    "fio_normal_form",
    "gauge_difference",
    "moyal",
    "operator_log",
    "quantum_bnf",
    "quantum_bracket",
    "reconstruct_amplitude",
    "star_exp",
    "star_inverse",
    "star_log",
    "star_pow",
    "symbol_normal_form",
]
