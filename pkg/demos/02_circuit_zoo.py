"""
The six circuit configurations
==============================

Every model shares the same data-encoding feature map (Hadamard plus a
phase rotation through twice each feature, two repetitions) and an
RY/CNOT ansatz with twelve trainable angles; only the CNOT layout
changes.  Gate totals separate the configurations into a 40-gate, two
36-gate, and three 34-gate variants.
"""

from qnnbench import QNN_CONFIGS, entangler_pairs, format_circuit, gate_census

print(f"{'config':8s} {'strategy':16s} {'1q':>4s} {'2q':>4s} {'total':>6s}")
for name, config in QNN_CONFIGS.items():
    census = gate_census(config.circuit())
    print(
        f"{name:8s} {config.strategy:16s} "
        f"{census.single_qubit:4d} {census.two_qubit:4d} {census.total:6d}"
    )

print("\nper-layer CNOT pairs on four qubits:")
for strategy in ("full", "linear", "circular", "sca", "reverse_linear", "pairwise"):
    print(f"  {strategy:15s} layer 0: {entangler_pairs(strategy, 4, 0)}")
print(f"  {'sca':15s} layer 1: {entangler_pairs('sca', 4, 1)}  (shifted + swapped)")

# Full text rendering of one circuit, one instruction per line.
print("\nQNN-3 (circular entanglement):")
print(format_circuit(QNN_CONFIGS["QNN-3"].circuit()))
