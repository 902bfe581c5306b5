"""Inject single faults by hand and watch the gadgets react.

Run with ``python3 demos/fault_injection.py``.
"""

from collections import Counter

from steane_teleport.faults import enumerate_fault_locations, fault_audit, run_with_fault
from steane_teleport.noise import FaultSpec, faults_at
from steane_teleport.protocols import INPUT_BY_LABEL
from steane_teleport.rng import RandomSource

inp = INPUT_BY_LABEL["+"]

# every location of the one-bit teleportation circuit, grouped by gadget
locs = enumerate_fault_locations("lattice_mzz", inp)
print("lattice_mzz locations per gadget:", dict(Counter(l.tag for l in locs)))

# a flag flip forces the joint measurement to be repeated
flag = [l for l in locs if l.tag == "mzz" and l.op_kind == "measure"][1]
out = run_with_fault("lattice_mzz", inp, FaultSpec(flag), RandomSource(0)).outcome
print("flag fault   -> joint measurements:", [j.label for j in out.joint_outcomes], "correct:", out.correct, "QED-clean:", out.qed_clean)

# an X on a data qubit between gadgets is corrected by the QEC gadget
gate = next(l for l in locs if l.tag == "input" and l.op_kind == "gate")
spec = next(s for s in faults_at(gate) if str(s.pauli) == "+Z")
out = run_with_fault("lattice_mzz", inp, spec, RandomSource(0)).outcome
print("data Z fault -> QEC corrections:", [g.corrections for g in out.gadget_records if g.gadget_label.startswith("qec")], "correct:", out.correct)

# a fault during Bell-pair preparation is caught by post-selection
locs = enumerate_fault_locations("transversal_0qec", inp)
ver = next(l for l in locs if l.tag == "prep2" and l.op_kind == "measure")
out = run_with_fault("transversal_0qec", inp, FaultSpec(ver), RandomSource(0)).outcome
print("Bell-pair verification fault -> accepted:", out.accepted, "reason:", out.discard_reason)

# a short audit: the unencoded circuit has many fatal single faults, and the
# encoded ones show where single faults still get through
for v in ("physical", "transversal_0qec"):
    rep = fault_audit(v, seeds=6)
    print(f"{v}: {rep.fault_specs} faults, {rep.accepted_wrong} accepted and wrong, by gadget {dict(rep.failing_tags)}")
    for ex in rep.examples[:3]:
        print("    e.g.", ex)
