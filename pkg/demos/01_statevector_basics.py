"""
Statevector basics
==================

Build small quantum states gate by gate and read out the all-qubit
parity expectation that the regression models use as their output.
"""

import numpy as np

from qnnbench import engine

# Qubit 0 is the least-significant bit of the basis index, so for two
# qubits the amplitudes are ordered |00>, |10>, |01>, |11> in terms of
# (qubit1 qubit0) bit patterns.

# A Hadamard turns |0> into the uniform superposition.
state = engine.zero_state(1)
engine.apply_h(state, 0)
print("H|0> =", np.round(state, 6))

# Hadamard then CNOT gives the textbook Bell state.
state = engine.zero_state(2)
engine.apply_h(state, 0)
engine.apply_cnot(state, 0, 1)
print("Bell state =", np.round(state, 6))

# The parity-Z observable weighs each basis state by the parity of its
# bitstring: +1 for |00> and |11>, -1 for |01> and |10>.
print("parity of Bell state =", engine.expectation(state))

# Rotating one qubit moves the expectation smoothly through [-1, 1].
for theta in (0.0, np.pi / 4, np.pi / 2, np.pi):
    state = engine.zero_state(1)
    engine.apply_ry(state, 0, theta)
    print(f"parity after RY({theta:.3f}) = {engine.expectation(state):+.4f}")

# Phase gates leave probabilities alone; the parity expectation of a
# phase-rotated superposition stays put even though amplitudes rotate.
state = engine.zero_state(1)
engine.apply_h(state, 0)
before = engine.expectation(state)
engine.apply_p(state, 0, 1.234)
print("parity before/after P:", before, "->", engine.expectation(state))

# Batched evaluation: one array holds many states, one call updates all.
batch = engine.zero_state(2, batch=4)
engine.apply_ry(batch, 0, np.array([0.0, 0.5, 1.0, 1.5]))
print("batched parities:", np.round(engine.expectation(batch), 4))
