import math

import numpy as np
import pytest

from steane_teleport.analysis import pooled
from steane_teleport.faults import (
    FirstFaultModel,
    enumerate_fault_locations,
    fault_audit,
    location_rates,
    simulate_counts,
)
from steane_teleport.noise import NoiseParams
from steane_teleport.protocols import INPUT_STATES


class TestLocations:
    def test_reference_trace_is_deterministic(self):
        a = enumerate_fault_locations("transversal_1qec", INPUT_STATES[5], seed=0)
        b = enumerate_fault_locations("transversal_1qec", INPUT_STATES[5], seed=9)
        assert a == b
        assert [l.location_index for l in a] == list(range(len(a)))

    def test_idle_locations_optional(self):
        plain = enumerate_fault_locations("physical", INPUT_STATES[0])
        idle = enumerate_fault_locations("physical", INPUT_STATES[0], include_idle=True)
        assert all(l.op_kind != "idle" for l in plain)
        assert any(l.op_kind == "idle" for l in idle)

    def test_rates(self):
        locs = enumerate_fault_locations("physical", INPUT_STATES[0])
        r = location_rates(locs, NoiseParams(p1=1e-3, p2=2e-3, p_meas=3e-3, p_init=4e-3))
        kinds = {(l.op_kind, len(l.support)): x for l, x in zip(locs, r)}
        assert kinds == {("init", 1): 4e-3, ("gate", 1): 1e-3, ("gate", 2): 2e-3, ("measure", 1): 3e-3}


class TestAudit:
    def test_physical_baseline_fails(self):
        rep = fault_audit("physical", 6)
        assert rep.accepted_wrong > 0 and not rep.fault_tolerant
        assert rep.runs == rep.fault_specs  # one seed per input

    def test_budget_marks_incomplete(self):
        rep = fault_audit("lattice_mzz", 6, budget=50)
        assert rep.incomplete and rep.runs == 50 and not rep.fault_tolerant

    def test_report_schema(self):
        d = fault_audit("physical", 6, inputs=INPUT_STATES[:1]).to_dict()
        assert {"locations", "vacuous", "accepted_wrong", "discard_triggering", "incomplete"} <= set(d)


class TestSampling:
    def test_noiseless_counts(self):
        groups = simulate_counts("lattice_mzz", INPUT_STATES[0], NoiseParams(), 40, job_groups=4)
        c = pooled(groups)
        assert (c.total, c.accepted, c.correct, c.qed_clean) == (40, 40, 40, 40)
        assert [g.total for g in groups] == [10, 10, 10, 10]

    def test_first_fault_probability(self):
        noise = NoiseParams.uniform(1e-3)
        m = FirstFaultModel.build("physical", INPUT_STATES[0], noise)
        r = location_rates(m.trace, noise)
        assert math.isclose(m.p_fault, 1 - np.prod(1 - r), rel_tol=1e-12)

    def test_first_fault_matches_direct(self):
        # both samplers estimate the same failure probability
        noise = NoiseParams.uniform(0.02)
        inp = INPUT_STATES[2]
        d = pooled(simulate_counts("physical", inp, noise, 6000, seed=1, method="direct"))
        f = pooled(simulate_counts("physical", inp, noise, 6000, seed=2, method="first_fault"))
        pd, pf = 1 - d.correct / d.total, 1 - f.correct / f.total
        se = math.sqrt(pd * (1 - pd) / d.total + pf * (1 - pf) / f.total)
        assert abs(pd - pf) < 4 * se

    def test_first_fault_deterministic(self):
        noise = NoiseParams.uniform(1e-2)
        a = simulate_counts("lattice_mzz", INPUT_STATES[1], noise, 300, seed=4, method="first_fault")
        b = simulate_counts("lattice_mzz", INPUT_STATES[1], noise, 300, seed=4, method="first_fault")
        assert [g.to_dict() for g in a] == [g.to_dict() for g in b]

    def test_errors(self):
        with pytest.raises(ValueError):
            simulate_counts("physical", INPUT_STATES[0], NoiseParams(), 0)
        with pytest.raises(ValueError):
            simulate_counts("physical", INPUT_STATES[0], NoiseParams(), 5, method="magic")
        with pytest.raises(ValueError):
            simulate_counts("physical", INPUT_STATES[0], NoiseParams(), 5, method="first_fault", on_shot=print)
