import json
import math

import numpy as np
import pytest

import polaronsim as ps
from polaronsim.bath import Chain, ChainBath
from polaronsim.circuit import (
    CheckResult,
    CircuitDesign,
    CouplerSpec,
    FeasibilityLimits,
    OscillatorHardware,
    OscillatorSpec,
    QubitSpec,
    assemble_from_design,
    check_feasibility,
    compile_circuit,
    coupling_ratio,
    design_from_dict,
    design_to_dict,
    design_to_model,
    load_design,
    load_hardware,
    required_beta,
)


def two_site_one_mode_model():
    r = (0.2 / 1.5) ** 2
    return ps.GeneralizedHolsteinModel(
        n_sites=2,
        coupling_matrix=np.array([[0.0, 0.5], [0.5, 0.0]]),
        modes=((ps.Mode(1.5, r),), (ps.Mode(1.5, r),)),
    )


class TestCouplingRatio:
    def test_reference_point(self):
        hw = OscillatorHardware(beta=0.1)
        assert coupling_ratio(hw, 1.0) == 0.548

    def test_second_substitution(self):
        hw = OscillatorHardware(beta=0.05, persistent_current_na=100.0,
                                impedance_ohm=25.0)
        assert coupling_ratio(hw, 2.0) == 0.137

    def test_zero_beta(self):
        assert coupling_ratio(OscillatorHardware(beta=0.0), 3.0) == 0.0

    def test_linear_in_beta(self):
        a = coupling_ratio(OscillatorHardware(beta=0.04), 2.5)
        b = coupling_ratio(OscillatorHardware(beta=0.08), 2.5)
        assert b == pytest.approx(2.0 * a, rel=1e-14)

    def test_linear_in_current(self):
        a = coupling_ratio(OscillatorHardware(beta=0.1, persistent_current_na=40.0), 1.0)
        b = coupling_ratio(OscillatorHardware(beta=0.1, persistent_current_na=120.0), 1.0)
        assert b == pytest.approx(3.0 * a, rel=1e-14)

    def test_sqrt_in_impedance(self):
        a = coupling_ratio(OscillatorHardware(beta=0.1, impedance_ohm=50.0), 1.0)
        b = coupling_ratio(OscillatorHardware(beta=0.1, impedance_ohm=200.0), 1.0)
        assert b == pytest.approx(2.0 * a, rel=1e-14)

    def test_inverse_in_frequency(self):
        hw = OscillatorHardware(beta=0.1)
        assert coupling_ratio(hw, 4.0) == pytest.approx(coupling_ratio(hw, 1.0) / 4.0,
                                                        rel=1e-14)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            coupling_ratio(OscillatorHardware(beta=0.1), 0.0)

    def test_hardware_validation(self):
        with pytest.raises(ValueError):
            OscillatorHardware(beta=1.0)
        with pytest.raises(ValueError):
            OscillatorHardware(beta=-0.1)
        with pytest.raises(ValueError):
            OscillatorHardware(beta=0.1, persistent_current_na=0.0)
        with pytest.raises(ValueError):
            OscillatorHardware(beta=0.1, impedance_ohm=-5.0)


class TestRequiredBeta:
    def test_reference_inversion(self):
        hw = OscillatorHardware(beta=0.0)
        assert required_beta(0.548, hw, 1.0) == 0.1

    def test_round_trip(self):
        hw = OscillatorHardware(beta=0.07, persistent_current_na=80.0,
                                impedance_ohm=60.0)
        for f in (0.5, 1.0, 3.7):
            assert required_beta(coupling_ratio(hw, f), hw, f) == \
                pytest.approx(0.07, rel=1e-14)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            required_beta(0.1, OscillatorHardware(beta=0.1), -1.0)


class TestCompile:
    def test_direct_modes_copied_exactly(self):
        m = two_site_one_mode_model()
        d = compile_circuit(m)
        assert d.n_qubits == 2
        assert d.couplers == (CouplerSpec(site_i=0, site_j=1, g_ghz=0.5),)
        assert len(d.oscillators) == 2
        for o, site in zip(d.oscillators, (0, 1)):
            assert o.qubit == site
            assert o.omega_prime_ghz == 1.5
            assert o.eta_ghz == m.modes[site][0].kappa_ghz
            assert o.chain is None

    def test_chain_bath_head_only(self):
        m = ps.GeneralizedHolsteinModel(n_sites=1, coupling_matrix=np.zeros((1, 1)))
        bath = ChainBath((Chain(head_coupling=0.3, site_freq=(1.0, 2.0, 3.0),
                                link_coupling=(0.15, 0.22)),))
        d = compile_circuit(m, baths=bath)
        assert len(d.oscillators) == 3
        head, mid, tail = d.oscillators
        assert (head.position, head.eta_ghz) == (0, 0.3)
        assert (mid.position, mid.eta_ghz) == (1, 0.15)
        assert (tail.position, tail.eta_ghz) == (2, 0.22)
        assert {o.chain for o in d.oscillators} == {0}
        # only the head couples to the qubit
        assert d.head_oscillators == (head,)

    def test_empty_modes_gives_qubit_only_design(self):
        m = ps.GeneralizedHolsteinModel(
            n_sites=3, coupling_matrix=np.array([[0.0, 0.4, 0.0],
                                                 [0.4, 0.0, 0.2],
                                                 [0.0, 0.2, 0.0]]))
        d = compile_circuit(m)
        assert d.oscillators == ()
        assert len(d.couplers) == 2
        assert all(q.delta_ghz == 5.0 for q in d.qubits)

    def test_custom_splitting(self):
        m = two_site_one_mode_model()
        d = compile_circuit(m, delta_ghz=7.5)
        assert all(q.delta_ghz == 7.5 for q in d.qubits)

    def test_bare_chainbath_needs_single_site(self):
        m = two_site_one_mode_model()
        bath = ChainBath((Chain(0.1, (1.0,), ()),))
        with pytest.raises(ValueError):
            compile_circuit(m, baths=bath)

    def test_bath_on_site_with_modes_rejected(self):
        m = two_site_one_mode_model()
        bath = ChainBath((Chain(0.1, (1.0,), ()),))
        with pytest.raises(ValueError):
            compile_circuit(m, baths={0: bath})

    def test_bath_on_invalid_site_rejected(self):
        m = ps.GeneralizedHolsteinModel(n_sites=1, coupling_matrix=np.zeros((1, 1)))
        bath = ChainBath((Chain(0.1, (1.0,), ()),))
        with pytest.raises(ValueError):
            compile_circuit(m, baths={3: bath})


class TestDesignToModel:
    def test_bit_exact_round_trip(self):
        m = two_site_one_mode_model()
        m2, baths = design_to_model(compile_circuit(m))
        assert baths is None
        assert np.array_equal(m2.coupling_matrix, m.coupling_matrix)
        for a, b in zip(m.modes, m2.modes):
            for ma, mb in zip(a, b):
                assert mb.omega_ghz == ma.omega_ghz
                assert mb.kappa_ghz == ma.kappa_ghz

    def test_chain_round_trip(self):
        m = ps.GeneralizedHolsteinModel(n_sites=1, coupling_matrix=np.zeros((1, 1)))
        bath = ChainBath((Chain(head_coupling=0.3, site_freq=(1.0, 2.0, 3.0),
                                link_coupling=(0.15, 0.22)),))
        m2, baths = design_to_model(compile_circuit(m, baths=bath))
        assert baths is not None and set(baths) == {0}
        chain = baths[0].chains[0]
        assert chain.head_coupling == 0.3
        assert chain.site_freq == (1.0, 2.0, 3.0)
        assert chain.link_coupling == (0.15, 0.22)
        assert m2.modes == ((),)

    def test_missing_chain_position_rejected(self):
        d = CircuitDesign(
            qubits=(QubitSpec(),),
            couplers=(),
            oscillators=(OscillatorSpec(qubit=0, omega_prime_ghz=1.0, eta_ghz=0.1,
                                        chain=0, position=0),
                         OscillatorSpec(qubit=0, omega_prime_ghz=2.0, eta_ghz=0.1,
                                        chain=0, position=2)),
        )
        with pytest.raises(ValueError):
            design_to_model(d)

    def test_mixed_direct_and_chain_on_one_qubit_rejected(self):
        d = CircuitDesign(
            qubits=(QubitSpec(),),
            couplers=(),
            oscillators=(OscillatorSpec(qubit=0, omega_prime_ghz=1.0, eta_ghz=0.1),
                         OscillatorSpec(qubit=0, omega_prime_ghz=2.0, eta_ghz=0.1,
                                        chain=0, position=0)),
        )
        with pytest.raises(ValueError):
            design_to_model(d)


class TestAssembleFromDesign:
    def test_matches_model_assembly_bitwise(self):
        m = two_site_one_mode_model()
        trunc = ps.TruncationSpec(fock_dim=4)
        h_model = ps.assemble_hamiltonian(m, trunc)
        h_design = assemble_from_design(compile_circuit(m), trunc)
        assert (h_model.matrix != h_design.matrix).nnz == 0

    def test_trajectories_identical(self):
        m = two_site_one_mode_model()
        trunc = ps.TruncationSpec(fock_dim=5)
        h_model = ps.assemble_hamiltonian(m, trunc)
        h_design = assemble_from_design(compile_circuit(m), trunc)
        psi = np.zeros(h_model.dimension, dtype=complex)
        psi[h_model.basis.index_of(0, (0, 0))] = 1.0
        times = np.linspace(0.0, 10.0, 101)
        a = ps.propagate(h_model, psi, times)
        b = ps.propagate(h_design, psi, times)
        assert np.abs(a.populations - b.populations).max() < 1e-10

    def test_chain_design_matches_bath_assembly(self):
        m = ps.GeneralizedHolsteinModel(n_sites=1, coupling_matrix=np.zeros((1, 1)))
        bath = ChainBath((Chain(head_coupling=0.2, site_freq=(1.0, 1.7),
                                link_coupling=(0.12,)),))
        trunc = ps.TruncationSpec(fock_dim=3)
        h_bath = ps.assemble_with_baths(m, {0: bath}, trunc)
        h_design = assemble_from_design(compile_circuit(m, baths=bath), trunc)
        assert np.abs(h_bath.as_dense() - h_design.as_dense()).max() < 1e-14


class TestFeasibility:
    def design(self, g=0.5, eta=0.2, omega=1.5):
        return CircuitDesign(
            qubits=(QubitSpec(), QubitSpec()),
            couplers=(CouplerSpec(0, 1, g),),
            oscillators=(OscillatorSpec(qubit=0, omega_prime_ghz=omega, eta_ghz=eta),),
        )

    def test_passing_design_margin(self):
        rep = check_feasibility(self.design(g=0.5))
        assert rep.passed
        g_check = next(c for c in rep.checks if c.name == "g_range")
        assert g_check.margin == 0.5

    def test_coupler_out_of_range_fails(self):
        rep = check_feasibility(self.design(g=1.2))
        assert not rep.passed
        g_check = next(c for c in rep.checks if c.name == "g_range")
        assert not g_check.passed
        assert "1.2" in g_check.detail

    def test_eta_limit(self):
        rep = check_feasibility(self.design(eta=12.0))
        eta_check = next(c for c in rep.checks if c.name == "eta_range")
        assert not eta_check.passed

    def test_hardware_checks_skipped_without_hardware(self):
        rep = check_feasibility(self.design())
        assert set(rep.skipped) == {"beta_ratio", "impedance", "required_beta"}
        assert {c.name for c in rep.checks} == {"g_range", "eta_range"}

    def test_hardware_length_mismatch(self):
        with pytest.raises(ValueError):
            check_feasibility(self.design(), hardware=[OscillatorHardware(beta=0.1)] * 2)

    def test_required_beta_example_passes(self):
        # eta/omega' = 0.548 at 1 GHz needs beta = 0.1, within the 0.2 default
        d = self.design(eta=0.548, omega=1.0)
        rep = check_feasibility(d, hardware=[OscillatorHardware(beta=0.1)])
        req = next(c for c in rep.checks if c.name == "required_beta")
        assert req.passed
        assert req.margin == pytest.approx(0.1, rel=1e-12)
        assert rep.passed

    def test_required_beta_too_large_fails(self):
        d = self.design(eta=2.0, omega=1.0)  # sqrt(R) = 2 needs beta ~ 0.36
        rep = check_feasibility(d, hardware=[OscillatorHardware(beta=0.1)])
        req = next(c for c in rep.checks if c.name == "required_beta")
        assert not req.passed

    def test_impedance_and_beta_checks(self):
        d = self.design()
        hw = [OscillatorHardware(beta=0.3, impedance_ohm=90.0)]
        with pytest.raises(ValueError):
            OscillatorHardware(beta=1.2)
        rep = check_feasibility(d, hardware=hw)
        beta = next(c for c in rep.checks if c.name == "beta_ratio")
        assert not beta.passed  # 0.3 > default beta_max 0.2
        z = next(c for c in rep.checks if c.name == "impedance")
        assert z.passed

    def test_monotone_under_tightening(self):
        d = self.design(g=0.5, eta=0.2)
        hw = [OscillatorHardware(beta=0.1)]
        loose = FeasibilityLimits()
        tighter = FeasibilityLimits(g_max_ghz=0.6, eta_max_ghz=0.25, beta_max=0.15)
        tightest = FeasibilityLimits(g_max_ghz=0.4, eta_max_ghz=0.1, beta_max=0.05)
        reports = [check_feasibility(d, hardware=hw, limits=lim)
                   for lim in (loose, tighter, tightest)]
        for earlier, later in zip(reports, reports[1:]):
            for a, b in zip(earlier.checks, later.checks):
                assert a.name == b.name
                # tightening never flips fail -> pass and never grows a margin
                assert not (not a.passed and b.passed)
                assert b.margin <= a.margin + 1e-15

    def test_report_dict_shape(self):
        rep = check_feasibility(self.design())
        data = rep.to_dict()
        assert set(data) == {"passed", "checks", "skipped"}
        assert all({"name", "label", "passed", "margin", "detail"} <= set(c)
                   for c in data["checks"])

    def test_empty_design_passes(self):
        d = CircuitDesign(qubits=(QubitSpec(),), couplers=(), oscillators=())
        rep = check_feasibility(d)
        assert rep.passed


class TestDesignSerialization:
    def test_dict_uses_one_based_indices(self):
        d = compile_circuit(two_site_one_mode_model())
        data = design_to_dict(d)
        assert data["couplers"] == [{"i": 1, "j": 2, "g_ghz": 0.5}]
        assert [o["qubit"] for o in data["oscillators"]] == [1, 2]
        assert "chain" not in data["oscillators"][0]

    def test_chain_entries_serialized(self):
        m = ps.GeneralizedHolsteinModel(n_sites=1, coupling_matrix=np.zeros((1, 1)))
        bath = ChainBath((Chain(0.3, (1.0, 2.0), (0.15,)),))
        data = design_to_dict(compile_circuit(m, baths=bath))
        assert data["oscillators"][0]["chain"] == 0
        assert data["oscillators"][1]["position"] == 1

    def test_round_trip(self):
        d = compile_circuit(two_site_one_mode_model(), delta_ghz=6.0)
        assert design_from_dict(design_to_dict(d)) == d

    def test_load_design_file(self, tmp_path):
        d = compile_circuit(two_site_one_mode_model())
        p = tmp_path / "design.json"
        p.write_text(json.dumps(design_to_dict(d)))
        assert load_design(p) == d

    def test_load_hardware_file(self, tmp_path):
        p = tmp_path / "hw.json"
        p.write_text(json.dumps({"oscillators": [
            {"beta": 0.1},
            {"beta": 0.05, "persistent_current_na": 80.0, "impedance_ohm": 60.0},
        ]}))
        hw = load_hardware(p)
        assert len(hw) == 2
        assert hw[0] == OscillatorHardware(beta=0.1)
        assert hw[1].impedance_ohm == 60.0

    def test_malformed_design_rejected(self):
        with pytest.raises((ValueError, KeyError)):
            design_from_dict({"qubits": [{}], "couplers": [{"i": 1}]})


class TestDesignValidation:
    def test_coupler_indices_checked(self):
        with pytest.raises(ValueError):
            CircuitDesign(qubits=(QubitSpec(),),
                          couplers=(CouplerSpec(0, 1, 0.5),), oscillators=())
        with pytest.raises(ValueError):
            CircuitDesign(qubits=(QubitSpec(), QubitSpec()),
                          couplers=(CouplerSpec(0, 0, 0.5),), oscillators=())

    def test_oscillator_qubit_checked(self):
        with pytest.raises(ValueError):
            CircuitDesign(qubits=(QubitSpec(),), couplers=(),
                          oscillators=(OscillatorSpec(qubit=2, omega_prime_ghz=1.0,
                                                      eta_ghz=0.1),))

    def test_oscillator_field_validation(self):
        with pytest.raises(ValueError):
            OscillatorSpec(qubit=0, omega_prime_ghz=0.0, eta_ghz=0.1)
        with pytest.raises(ValueError):
            OscillatorSpec(qubit=0, omega_prime_ghz=1.0, eta_ghz=0.1, position=-1,
                           chain=0)
        with pytest.raises(ValueError):
            OscillatorSpec(qubit=0, omega_prime_ghz=1.0, eta_ghz=0.1, position=1)
