import pytest

from steane_teleport import protocols
from steane_teleport.faults import enumerate_fault_locations, run_with_fault
from steane_teleport.noise import FaultLocation, FaultSpec, NoiseParams
from steane_teleport.pauli import PauliString
from steane_teleport.protocols import (
    INPUT_BY_LABEL,
    INPUT_STATES,
    VARIANTS,
    LeafBudgetExceeded,
    input_state,
    register_size,
    run_shot,
    verify_noiseless_identity,
)
from steane_teleport.rng import RandomSource


class TestInputs:
    def test_six_states(self):
        assert [s.label for s in INPUT_STATES] == ["0", "1", "+", "-", "+i", "-i"]

    @pytest.mark.parametrize("text", ["|+i>", "+i", " |+i⟩ "])
    def test_parse(self, text):
        assert input_state(text) is INPUT_BY_LABEL["+i"]

    def test_unknown(self):
        with pytest.raises(ValueError):
            input_state("|2>")


class TestNoiselessIdentity:
    @pytest.mark.parametrize("variant", VARIANTS)
    @pytest.mark.parametrize("corrections", ["frame", "physical"])
    def test_all_branches(self, variant, corrections):
        rep = verify_noiseless_identity(variant, corrections=corrections)
        assert rep.passed and rep.failures == 0
        assert all(ok == n > 0 for ok, n in rep.per_input.values())

    def test_every_random_outcome_of_one_bit_teleportation(self):
        rep = verify_noiseless_identity("lattice_mzz", exhaustive=True)
        assert rep.passed and rep.leaves > 1000

    def test_branch_count(self):
        # two Bell outcomes times the random readout qubit, per input
        assert verify_noiseless_identity("physical").per_input["0"][1] == 4

    def test_leaf_budget(self):
        with pytest.raises(LeafBudgetExceeded):
            verify_noiseless_identity("lattice_mxx_mzz", leaf_budget=5)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            verify_noiseless_identity("teleport_everything")


class TestFrameTrackingIsLoadBearing:
    @pytest.mark.parametrize("variant", VARIANTS)
    def test_dropping_frame_updates_breaks_identity(self, variant, monkeypatch):
        monkeypatch.setattr(protocols, "frame_update", lambda *a, **k: None)
        rep = verify_noiseless_identity(variant)
        assert not rep.passed and 0 < rep.failure_fraction < 1


class TestShots:
    def test_register_sizes(self):
        assert [register_size(v) for v in VARIANTS] == [3, 30, 30, 30, 20]

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_same_stream_same_shot(self, variant):
        noise = NoiseParams.uniform(5e-3)
        for j in range(20):
            a = run_shot(variant, INPUT_STATES[4], noise, RandomSource.for_shot(1, 4, j))
            b = run_shot(variant, INPUT_STATES[4], noise, RandomSource.for_shot(1, 4, j))
            assert a.to_dict() == b.to_dict()

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_noiseless_shot_record(self, variant):
        out = run_shot(variant, INPUT_STATES[3], None, RandomSource(3))
        assert out.accepted and out.correct and out.qed_clean
        assert out.discard_reason is None
        d = out.to_dict()
        assert {"variant", "input", "accepted", "discard_reason", "qed_clean", "gadgets", "final_bit", "correct"} <= set(d)

    def test_qubit_budget(self):
        out = run_shot("transversal_1qec", INPUT_STATES[0], None, RandomSource(0))
        assert out.qubits_used == 30
        assert run_shot("lattice_mzz", INPUT_STATES[0], None, RandomSource(0)).qubits_used == 20

    def test_bell_verification_discard(self):
        inp = INPUT_STATES[0]
        locs = enumerate_fault_locations("transversal_0qec", inp)
        ver = next(l for l in locs if l.tag == "prep2" and l.op_kind == "measure")
        run = run_with_fault("transversal_0qec", inp, FaultSpec(ver), RandomSource(0))
        assert run.reached and not run.outcome.accepted
        assert run.outcome.discard_reason == "bell_verification"

    def test_bell_flag_discard_in_lattice_pair(self):
        inp = INPUT_STATES[0]
        locs = enumerate_fault_locations("lattice_mxx_mzz", inp)
        flag = [l for l in locs if l.tag == "mxx" and l.op_kind == "measure"][1]
        run = run_with_fault("lattice_mxx_mzz", inp, FaultSpec(flag), RandomSource(0))
        assert run.outcome.discard_reason == "bell_flag"

    def test_flag_triggers_repeated_joint_measurement(self):
        inp = INPUT_STATES[2]
        locs = enumerate_fault_locations("lattice_mzz", inp)
        flag = [l for l in locs if l.tag == "mzz" and l.op_kind == "measure"][1]
        run = run_with_fault("lattice_mzz", inp, FaultSpec(flag), RandomSource(0))
        out = run.outcome
        assert [j.label for j in out.joint_outcomes] == ["mzz", "mzz_repeat"]
        assert out.accepted and out.correct and not out.qed_clean

    def test_vacuous_pass_when_target_not_reached(self):
        spec = FaultSpec(FaultLocation(10**6, "gate", (0,), ""), PauliString.from_label("X"))
        run = run_with_fault("physical", INPUT_STATES[0], spec, RandomSource(0))
        assert not run.reached and run.outcome.correct

    def test_physical_single_fault_is_fatal(self):
        inp = INPUT_STATES[0]
        loc = next(l for l in enumerate_fault_locations("physical", inp) if l.tag == "out" and l.op_kind == "measure")
        assert not run_with_fault("physical", inp, FaultSpec(loc), RandomSource(0)).outcome.correct
