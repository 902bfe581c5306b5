"""Walk through the code, its gadgets and the five teleportation circuits without noise.

Run with ``python3 demos/noiseless_walkthrough.py``.
"""

from steane_teleport.executor import Executor
from steane_teleport.pauli import PauliString
from steane_teleport.protocols import INPUT_STATES, VARIANTS, register_size, run_shot, verify_noiseless_identity
from steane_teleport.rng import RandomSource
from steane_teleport.steane import code_definition, lookup_table, make_blocks, prepare_zero, verify_code

code = code_definition()
print("checks:")
for s in code.stabilizers:
    print("  ", s)
print("logical X:", code.logical_x, " logical Z:", code.logical_z)

rep = verify_code()
print(f"distance {rep.distance}, {rep.operators_checked} operators of weight <= 2 checked, none logical")

print("syndrome -> qubit to flip:")
for syn, q in sorted(lookup_table().entries.items()):
    print("  ", "".join(map(str, syn)), q)

# a verified |0>_L on the first block
ex = Executor(10, None, RandomSource(1))
block = make_blocks(1)[0]
rec = prepare_zero(ex, block)
zl = PauliString.of_type(10, "Z", [block.q(q) for q in (5, 6, 7)])
print(f"prepared |0>_L in {rec.attempts} attempt(s), <Z_L> = {ex.state.expectation(zl):+d}")

print("\none noiseless shot per variant for input |+i>:")
for v in VARIANTS:
    out = run_shot(v, INPUT_STATES[4], None, RandomSource(7))
    print(f"  {v:18s} {register_size(v):2d} qubits  frame={out.frame.to_dict()}  final bit={out.final_bit}  correct={out.correct}")

print("\nevery measurement branch, every input:")
for v in VARIANTS:
    r = verify_noiseless_identity(v)
    print(f"  {v:18s} {r.leaves:3d} branches, {r.failures} failures")
