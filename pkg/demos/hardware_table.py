"""Fidelity table of all five circuits under hardware-like noise.

Gate and SPAM rates follow the trapped-ion characterization (memory error off).
Run with ``python3 demos/hardware_table.py [shots_per_input]``.
"""

import sys

from steane_teleport.analysis import ExperimentRecord, summarize, table_text
from steane_teleport.faults import simulate_counts
from steane_teleport.noise import NoiseParams
from steane_teleport.protocols import INPUT_STATES, VARIANTS

shots = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
noise = NoiseParams.hardware()
print(f"noise: {noise}\n{shots} shots per input\n")

summaries = []
for v in VARIANTS:
    recs = {}
    for i, inp in enumerate(INPUT_STATES):
        groups = simulate_counts(v, inp, noise, shots, seed=2024, input_index=i, method="first_fault")
        recs[inp.label] = ExperimentRecord(v, inp.label, groups)
    summaries.append(summarize(recs, v))
print(table_text(summaries))
