import math

import numpy as np
import pytest

from paulicloner.analytic import QualityWeights, table1_angles
from paulicloner.cloner import ClonerKind, SoftwareState, clone_fidelities
from paulicloner.mub import PauliString, mubs_for
from paulicloner.noise import channel_with_single_error
from paulicloner.optimize import (
    AnsatzSpec,
    OptimizerConfig,
    adam_optimize,
    b92_ansatz_circuit,
    b92_qml_fidelities,
    central_difference,
    evaluate_ansatz,
    fidelity_quadratic_forms,
    frontier_sweep,
    grid_frontier_b92,
    grid_search_software,
    loss,
    make_b92_loss,
    make_program_loss,
    pareto_filter,
    program_prep_circuit,
    program_prep_state,
    program_prep_state_and_shift_grads,
    quality,
    report_from_forms,
)
from paulicloner.simcore import Circuit, GateOp, apply_circuit, basis_state


class TestLossAndQuality:
    def test_loss_values(self):
        assert loss(0.7, 1.0, 0.7) == pytest.approx(-1.0)
        assert loss(0.9, 0.5, 0.8) == pytest.approx(-0.4)

    def test_loss_minimizer_structure(self):
        # at fixed F_AB = f the loss decreases with growing F_AE
        assert loss(0.8, 0.9, 0.8) < loss(0.8, 0.5, 0.8)

    def test_quality_universal_report(self):
        report = clone_fidelities(
            ClonerKind.NG, 1, table1_angles("uqcm").to_program()
        )
        w = QualityWeights.from_xyz(1.0, 1.0, 1.0)
        assert quality(w, report, "bob") == pytest.approx(2.5, abs=1e-10)

    def test_quality_missing_weight(self):
        report = clone_fidelities(ClonerKind.NG, 1, SoftwareState.computational(1))
        with pytest.raises(ValueError):
            quality(QualityWeights({"X": 1.0}), report, "bob")


class TestAnsatz:
    def test_zero_b92_acts_like_three_cnots(self):
        circuit = evaluate_ansatz(AnsatzSpec.zeros("b92"))
        plain = Circuit(2, tuple(GateOp("CNOT", (0, 1)) for _ in range(3)))
        for k in range(4):
            got = apply_circuit(basis_state(2, k), circuit).amplitudes
            ref = apply_circuit(basis_state(2, k), plain).amplitudes
            np.testing.assert_allclose(got, ref, atol=1e-12)

    def test_zero_program_prep_keeps_vacuum(self):
        state = evaluate_ansatz(AnsatzSpec.zeros("program-prep"))
        np.testing.assert_allclose(state.amplitudes, basis_state(4, 0).amplitudes)

    def test_random_parameters_stay_normalized(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            state = evaluate_ansatz(
                AnsatzSpec("program-prep", rng.uniform(-math.pi, math.pi, 60))
            )
            assert abs(np.linalg.norm(state.amplitudes) - 1) < 1e-12

    def test_parameter_count_validation(self):
        with pytest.raises(ValueError):
            AnsatzSpec("b92", np.zeros(17))
        with pytest.raises(ValueError):
            AnsatzSpec("mystery", np.zeros(3))

    def test_fast_state_matches_circuit(self):
        rng = np.random.default_rng(1)
        from paulicloner.simcore import apply_ops

        for _ in range(10):
            p = rng.uniform(-math.pi, math.pi, 60)
            init = np.zeros(16, dtype=complex)
            init[0] = 1.0
            ref = apply_ops(init, 4, program_prep_circuit(p).ops)
            np.testing.assert_allclose(program_prep_state(p), ref, atol=1e-12)

    def test_b92_fast_fidelities_match_circuit(self):
        from paulicloner.cloner import b92_per_state_fidelities

        rng = np.random.default_rng(2)
        for _ in range(10):
            p = rng.uniform(-math.pi, math.pi, 18)
            fab, fae = b92_qml_fidelities(p)
            per = b92_per_state_fidelities(b92_ansatz_circuit(p))
            assert fab == pytest.approx(np.mean([v[0] for v in per.values()]), abs=1e-12)
            assert fae == pytest.approx(np.mean([v[1] for v in per.values()]), abs=1e-12)


class TestAdam:
    def test_toy_quadratic(self):
        objective = lambda p: float((p[0] - 1.0) ** 2)
        params, trace = adam_optimize(
            objective,
            AnsatzSpec("ng-angles", np.zeros(3)),
            OptimizerConfig(steps=100, restarts=1),
        )
        assert abs(params[0] - 1.0) < 1e-3
        assert trace[-1] < trace[0]

    def test_nonfinite_objective_aborts(self):
        def bad(params):
            return float("nan")

        with pytest.raises(RuntimeError):
            adam_optimize(
                bad, AnsatzSpec("ng-angles", np.zeros(3)), OptimizerConfig(restarts=1)
            )

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(3)
        target = rng.uniform(-1, 1, 3)
        objective = lambda p: float(np.sum((p - target) ** 2))
        cfg = OptimizerConfig(steps=30, restarts=3, seed=11)
        p1, t1 = adam_optimize(objective, AnsatzSpec("ng-angles", np.zeros(3)), cfg)
        p2, t2 = adam_optimize(objective, AnsatzSpec("ng-angles", np.zeros(3)), cfg)
        np.testing.assert_array_equal(p1, p2)
        assert t1 == t2


class TestGradients:
    def test_program_prep_shift_matches_central_difference(self):
        rng = np.random.default_rng(4)
        ch = channel_with_single_error(2, PauliString("YI"), 0.45)
        forms = fidelity_quadratic_forms(ClonerKind.NG, 2, mubs_for(2).bases, ch)
        objective, gradient = make_program_loss(forms, 0.5, "program-prep")
        for _ in range(5):
            p = rng.uniform(-math.pi, math.pi, 60)
            g = gradient(p)
            fd = central_difference(objective, p)
            np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-7)

    def test_combined_shift_evaluation_matches_plain_rule(self):
        from paulicloner.optimize import shift_gradient_states

        rng = np.random.default_rng(5)
        p = rng.uniform(-math.pi, math.pi, 60)
        psi, grads = program_prep_state_and_shift_grads(p)
        np.testing.assert_allclose(psi, program_prep_state(p), atol=1e-13)
        plain = shift_gradient_states(program_prep_state, p, 0.5)
        for a, b in zip(grads, plain):
            np.testing.assert_allclose(a, b, atol=1e-13)

    def test_b92_shift_matches_central_difference(self):
        rng = np.random.default_rng(6)
        objective, gradient = make_b92_loss(0.8)
        for _ in range(5):
            p = rng.uniform(-math.pi, math.pi, 18)
            np.testing.assert_allclose(
                gradient(p), central_difference(objective, p), rtol=1e-6, atol=1e-7
            )


class TestQuadraticForms:
    def test_forms_reproduce_simulation(self):
        rng = np.random.default_rng(7)
        ch = channel_with_single_error(2, PauliString("XZ"), 0.3)
        for kind in (ClonerKind.NG, ClonerKind.QID):
            forms = fidelity_quadratic_forms(kind, 2, mubs_for(2).bases, ch)
            for _ in range(5):
                v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
                v /= np.linalg.norm(v)
                got = report_from_forms(forms, v)
                ref = clone_fidelities(kind, 2, SoftwareState(v), channel=ch)
                for lbl in ref.basis_labels:
                    np.testing.assert_allclose(
                        got.per_state_ab[lbl], ref.per_state_ab[lbl], atol=1e-12
                    )
                    np.testing.assert_allclose(
                        got.per_state_ae[lbl], ref.per_state_ae[lbl], atol=1e-12
                    )


class TestGridSearch:
    def test_recovers_phase_covariant_optimum(self):
        # maximize Eve's Z+X quality with Bob's pinned hard: the optimum is
        # the symmetric phase-covariant machine
        from paulicloner.analytic import ng1q_fidelities

        target = 0.5 + math.sin(math.pi / 4) / 2

        def objective(state):
            r = ng1q_fidelities(state)
            bob = (r.f_ab["Z"] + r.f_ab["X"]) / 2
            eve = (r.f_ae["Z"] + r.f_ae["X"]) / 2
            return eve - 100.0 * (bob - target) ** 2

        got = ng1q_fidelities(grid_search_software(ClonerKind.NG, 16, objective))
        # within grid spacing of the phase-covariant point
        assert abs((got.f_ab["Z"] + got.f_ab["X"]) / 2 - target) < 0.02
        assert abs((got.f_ae["Z"] + got.f_ae["X"]) / 2 - target) < 0.02

    def test_constant_objective_keeps_first_grid_point(self):
        best = grid_search_software(ClonerKind.NG, 8, lambda s: 0.0)
        np.testing.assert_allclose(best.amplitudes, [1, 0, 0, 0], atol=1e-12)

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            grid_search_software(ClonerKind.NG, 4, lambda s: 0.0)

    def test_b92_grid_frontiers_of_both_families_agree(self):
        fs = [0.6, 0.7, 0.8, 0.85]
        ng = grid_frontier_b92(ClonerKind.NG, fs, 48)
        qid = grid_frontier_b92(ClonerKind.QID, fs, 48)
        for (f1, e1), (f2, e2) in zip(ng, qid):
            assert f1 == f2
            assert abs(e1 - e2) < 2e-3


class TestSweep:
    def test_unknown_task(self):
        with pytest.raises(ValueError):
            frontier_sweep("mystery")

    def test_empty_targets(self):
        with pytest.raises(ValueError):
            frontier_sweep("bb84", f_values=[])

    def test_bb84_sweep_rows_and_determinism(self):
        ch = channel_with_single_error(1, PauliString("X"), 0.25)
        cfg = OptimizerConfig(steps=40, restarts=2, seed=5)
        fs = [0.7, 0.75]
        r1 = frontier_sweep("bb84", f_values=fs, cfg=cfg, channel=ch)
        r2 = frontier_sweep("bb84", f_values=fs, cfg=cfg, channel=ch)
        ng1, ng2 = r1.series("ng"), r2.series("ng")
        assert len(ng1) == 2
        for a, b in zip(ng1, ng2):
            np.testing.assert_array_equal(a.parameters, b.parameters)
            assert a.f_ab == b.f_ab and a.f_ae == b.f_ae
        assert [r.f_target for r in r1.series("pccm")] == fs

    def test_rows_sorted_by_target(self):
        ch = channel_with_single_error(1, PauliString("X"), 0.25)
        cfg = OptimizerConfig(steps=20, restarts=1, seed=5)
        result = frontier_sweep("bb84", f_values=[0.8, 0.7], cfg=cfg, channel=ch)
        targets = [r.f_target for r in result.rows if not math.isnan(r.f_target)]
        assert targets == sorted(targets)

    def test_pareto_filter_monotone(self):
        pts = [(0.6, 0.9), (0.7, 0.95), (0.8, 0.8), (0.9, 0.7), (0.85, 0.6)]
        front = pareto_filter(pts)
        xs = [p[0] for p in front]
        ys = [p[1] for p in front]
        assert xs == sorted(xs)
        assert all(ys[i] >= ys[i + 1] for i in range(len(ys) - 1))
        assert (0.6, 0.9) not in front  # dominated by (0.7, 0.95)

    def test_sixstate_beats_universal_reference(self):
        # biased noise (p_X=0.25, p_Z=0.1): the optimized cloner must beat
        # the asymmetric universal family at matched Bob averages
        from paulicloner.noise import parse_channel_spec

        ch = parse_channel_spec("X=0.25,Z=0.1", 1)
        result = frontier_sweep(
            "sixstate",
            f_values=[0.6, 0.65, 0.7],
            cfg=OptimizerConfig(steps=120, restarts=4, seed=12),
            channel=ch,
        )
        uqcm = {r.f_target: r.f_ae_avg for r in result.series("uqcm")}
        pts = pareto_filter(
            [(r.f_ab_avg, r.f_ae_avg) for r in result.series("ng")]
        )
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        compared = 0
        for f, y_ref in uqcm.items():
            if min(xs) <= f <= max(xs):
                assert float(np.interp(f, xs, ys)) > y_ref
                compared += 1
        assert compared >= 2

    def test_achieved_frontier_is_monotone_after_pareto(self):
        ch = channel_with_single_error(1, PauliString("X"), 0.25)
        result = frontier_sweep(
            "bb84",
            f_values=[0.6, 0.65, 0.7, 0.75],
            cfg=OptimizerConfig(steps=60, restarts=2, seed=13),
            channel=ch,
        )
        front = pareto_filter(
            [(r.f_ab_avg, r.f_ae_avg) for r in result.series("ng")]
        )
        assert len(front) >= 3
        ys = [p[1] for p in front]
        assert all(ys[i] >= ys[i + 1] for i in range(len(ys) - 1))

    def test_thread_pool_rows_match_serial(self, monkeypatch):
        ch = channel_with_single_error(1, PauliString("X"), 0.25)
        cfg = OptimizerConfig(steps=25, restarts=2, seed=8)
        serial = frontier_sweep("bb84", f_values=[0.7, 0.75], cfg=cfg, channel=ch)
        monkeypatch.setenv("PAULICLONER_THREADS", "4")
        threaded = frontier_sweep("bb84", f_values=[0.7, 0.75], cfg=cfg, channel=ch)
        for a, b in zip(serial.rows, threaded.rows):
            assert a.series == b.series and a.f_target == b.f_target
            assert a.f_ab == b.f_ab and a.f_ae == b.f_ae
