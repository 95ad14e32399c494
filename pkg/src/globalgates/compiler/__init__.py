from .local import (
    Budget,
    BudgetUnderflow,
    compile_local_unitary,
    compile_local_xy_gate,
    euler_xyx,
    exact_length,
    product_count_bound,
    rx,
    ry,
    rz,
)
from .pulses import Block, LocalSlot, OneQubitGlobal, PulseContext, PulseSequence, TwoQubitPhase
from .simulate import simulate_sequence

__all__ = [
    "Block", "Budget", "BudgetUnderflow", "LocalSlot", "OneQubitGlobal", "PulseContext", "PulseSequence",
    "TwoQubitPhase", "compile_local_unitary", "compile_local_xy_gate", "euler_xyx", "exact_length",
    "product_count_bound", "rx", "ry", "rz", "simulate_sequence",
]
