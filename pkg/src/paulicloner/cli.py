"""Command-line front end: evaluate fidelities, validate the closed forms
against simulation, run frontier sweeps, and print the MUB tables.

Exit codes: 0 on success, 1 when validation or an optimizer run fails,
2 on usage errors.  CSV files embed the full run configuration as
'#'-prefixed comment lines, and all numeric output uses 12 significant
digits.  The PAULICLONER_THREADS environment variable controls how many
sweep rows are computed concurrently.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import analytic, mub, optimize, simcore
from .cloner import (
    ClonerKind,
    SoftwareState,
    NgAngles,
    bob_pauli_transfer_matrix,
    clone_fidelities,
    ng_angles_to_program,
)
from .mub import mubs_for
from .noise import PauliChannel, noisy_fidelity_1q, parse_channel_spec


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _print_json(payload: dict) -> None:
    print(json.dumps(_round_floats(payload), indent=2))


# ---------------------------------------------------------------------------
# program sources


def resolve_preset(name: str, kind: ClonerKind, n: int) -> SoftwareState:
    """Named program states; 'imbalanced(eta)' carries its parameter inline."""
    name = name.strip().lower()
    if name.startswith("imbalanced(") and name.endswith(")"):
        if kind != ClonerKind.NG or n != 1:
            raise ValueError("preset imbalanced(eta) exists for the 1-qubit NG cloner")
        eta = float(name[len("imbalanced(") : -1])
        return analytic.table1_angles("imbalanced", eta=eta).to_program()
    if name == "uqcm-sym":
        if kind == ClonerKind.QID:
            if n == 1:
                return analytic.qid_closed_form("uqcm").to_program()
            return analytic.qid_uqcm_program_2q()
        return analytic.uqcm_program_ng(n)
    if name == "pccm-sym":
        if n != 1:
            raise ValueError("preset pccm-sym exists for 1-qubit registers")
        if kind == ClonerKind.QID:
            return analytic.qid_closed_form("pccm").to_program()
        return analytic.table1_angles("pccm").to_program()
    if name == "cnot-cloner":
        if n != 1:
            raise ValueError("preset cnot-cloner exists for 1-qubit registers")
        if kind == ClonerKind.QID:
            return analytic.qid_closed_form("cnot").to_program()
        return SoftwareState(np.array([1.0, 0.0, 1.0, 0.0]) / math.sqrt(2))
    if name == "qid-uqcm-sym":
        if kind != ClonerKind.QID:
            raise ValueError("preset qid-uqcm-sym is a QID program")
        if n == 1:
            return analytic.qid_closed_form("uqcm").to_program()
        return analytic.qid_uqcm_program_2q()
    raise ValueError(f"unknown preset {name!r}")


def _program_from_args(args, kind: ClonerKind) -> SoftwareState:
    given = [s for s in (args.preset, args.amplitudes, args.angles) if s]
    if len(given) != 1:
        raise ValueError("give exactly one of --preset, --amplitudes, --angles")
    if args.preset:
        return resolve_preset(args.preset, kind, args.n)
    if args.amplitudes:
        values = [complex(v) for v in args.amplitudes.split(",")]
        amps = np.asarray(values)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("amplitudes must not all be zero")
        return SoftwareState(amps / norm)
    rho, phi, theta = (float(v) for v in args.angles.split(","))
    if args.n != 1:
        raise ValueError("--angles parameterizes 1-qubit programs")
    return ng_angles_to_program(NgAngles(rho, phi, theta))


def _channel_from_args(args, n: int) -> PauliChannel | None:
    if not getattr(args, "noise", None):
        return None
    return parse_channel_spec(args.noise, n)


# ---------------------------------------------------------------------------
# fidelities


def cmd_fidelities(args) -> int:
    kind = ClonerKind(args.kind)
    program = _program_from_args(args, kind)
    if program.num_clone_qubits != args.n:
        raise ValueError(
            f"program describes {program.num_clone_qubits}-qubit registers, --n {args.n}"
        )
    channel = _channel_from_args(args, args.n)
    all_bases = mubs_for(args.n)
    if args.bases:
        labels = [b.strip() for b in args.bases.split(",")]
        bases = [all_bases[lbl] for lbl in labels]
    else:
        bases = list(all_bases.bases)
    report = clone_fidelities(kind, args.n, program, channel=channel, bases=bases)
    payload = {
        "kind": kind.value,
        "n": args.n,
        "program": [[z.real, z.imag] for z in program.amplitudes],
        "channel": {str(p): w for p, w in channel.probs.items()} if channel else None,
        "f_ab": report.f_ab,
        "f_ae": report.f_ae,
        "f_ab_avg": report.f_ab_avg,
        "f_ae_avg": report.f_ae_avg,
        "per_state_ab": {k: list(v) for k, v in report.per_state_ab.items()},
        "per_state_ae": {k: list(v) for k, v in report.per_state_ae.items()},
    }
    _print_json(payload)
    if args.out:
        lines = _config_comment(vars(args))
        lines.append("basis,state,F_AB,F_AE")
        for lbl in report.basis_labels:
            for i, (fab, fae) in enumerate(
                zip(report.per_state_ab[lbl], report.per_state_ae[lbl])
            ):
                lines.append(f"{lbl},{i},{_fmt(fab)},{_fmt(fae)}")
        _write_lines(args.out, lines)
    return 0


# ---------------------------------------------------------------------------
# validate


@dataclass
class Check:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def _random_program(rng, n: int, complex_amps: bool = False) -> SoftwareState:
    v = rng.standard_normal(4**n)
    if complex_amps:
        v = v + 1j * rng.standard_normal(4**n)
    return SoftwareState(v / np.linalg.norm(v))


def run_validation(trials: int = 200, seed: int = 0) -> list[Check]:
    """All closed-form-versus-simulation oracles and structure checks."""
    rng = np.random.default_rng(seed)
    checks: list[Check] = []

    for n in (1, 2):
        mset = mubs_for(n)
        dev = 0.0
        target = 2.0**-n
        for i, a in enumerate(mset.bases):
            for b in mset.bases[i + 1 :]:
                for sa in a.states:
                    for sb in b.states:
                        ov = abs(np.vdot(sa.amplitudes, sb.amplitudes)) ** 2
                        dev = max(dev, abs(ov - target))
        checks.append(Check(f"mub-unbiasedness-{n}q", dev, 1e-12))

    dev = 0.0
    for idx, basis in enumerate(mubs_for(2).bases):
        circuit = mub.mub_prep_circuit(idx)
        for k, ref in enumerate(basis.states):
            got = simcore.apply_circuit(simcore.basis_state(2, k), circuit)
            phase = np.vdot(ref.amplitudes, got.amplitudes)
            dev = max(dev, abs(abs(phase) - 1.0))
            dev = max(
                dev, float(np.max(np.abs(got.amplitudes - phase * ref.amplitudes)))
            )
    checks.append(Check("mub-prep-circuits", dev, 1e-12))

    expected_1q = np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)
    expected_2q = np.array(
        [
            [1, 0, 1, 1, 1],
            [1, 1, 1, 1, 0],
            [1, 1, 0, 1, 1],
            [0, 1, 1, 1, 1],
            [1, 1, 1, 0, 1],
        ]
    )
    checks.append(
        Check(
            "action-table",
            float(
                np.max(np.abs(mub.action_table(1) - expected_1q))
                + np.max(np.abs(mub.action_table(2) - expected_2q))
            ),
            0.0,
        )
    )

    dev = 0.0
    for n in (1, 2, 3):
        classes = mub.commuting_classes(n)
        seen: set[int] = set()
        ok = len(classes) == 2**n + 1
        for cls in classes:
            idx = {mub.pauli_to_index(p) for p in cls}
            ok &= len(idx) == 2**n - 1 and not (idx & seen)
            seen |= idx
            group = idx | {0}
            ok &= all((u ^ v) in group for u in group for v in group)
            ok &= all(
                mub._symplectic_commutes(u, v, n) for u in idx for v in idx
            )
        ok &= len(seen) == 4**n - 1
        dev = max(dev, 0.0 if ok else 1.0)
    checks.append(Check("commuting-classes-group-law", dev, 0.0))

    families = [
        ("ng-1q", ClonerKind.NG, 1, analytic.ng_fidelities),
        ("qid-1q", ClonerKind.QID, 1, analytic.qid_fidelities),
        ("ng-2q", ClonerKind.NG, 2, analytic.ng_fidelities),
        ("qid-2q", ClonerKind.QID, 2, analytic.qid_fidelities),
    ]
    for name, kind, n, formula in families:
        dev = 0.0
        for _ in range(trials):
            s = _random_program(rng, n, complex_amps=(n == 1 and rng.random() < 0.3))
            ref = clone_fidelities(kind, n, s)
            got = formula(s)
            for lbl in ref.basis_labels:
                dev = max(
                    dev,
                    float(
                        np.max(
                            np.abs(
                                np.array(ref.per_state_ab[lbl])
                                - np.array(got.per_state_ab[lbl])
                            )
                        )
                    ),
                    float(
                        np.max(
                            np.abs(
                                np.array(ref.per_state_ae[lbl])
                                - np.array(got.per_state_ae[lbl])
                            )
                        )
                    ),
                )
        checks.append(Check(f"analytic-vs-sim-{name}", dev, 1e-10))

    dev = 0.0
    for _ in range(max(trials, 200)):
        kind = ClonerKind.NG if rng.random() < 0.5 else ClonerKind.QID
        s = _random_program(rng, 1)
        p = rng.dirichlet(np.ones(4)) * rng.uniform(0.2, 1.0)
        p_x, p_y, p_z = p[0], p[1], p[2]
        channel = PauliChannel.from_xyz(p_x, p_y, p_z)
        clean = clone_fidelities(kind, 1, s)
        noisy = clone_fidelities(kind, 1, s, channel=channel)
        for lbl in "ZXY":
            dev = max(
                dev,
                abs(
                    noisy_fidelity_1q(clean.f_ab[lbl], lbl, p_x, p_y, p_z)
                    - noisy.f_ab[lbl]
                ),
                abs(
                    noisy_fidelity_1q(clean.f_ae[lbl], lbl, p_x, p_y, p_z)
                    - noisy.f_ae[lbl]
                ),
            )
    checks.append(Check("noisy-transform-oracle", dev, 1e-10))

    dev = 0.0
    for _ in range(100):
        n = 1 if rng.random() < 0.5 else 2
        s = _random_program(rng, n)
        r = bob_pauli_transfer_matrix(ClonerKind.NG, n, s)
        off = r - np.diag(np.diag(r))
        dev = max(dev, float(np.max(np.abs(off))))
    checks.append(Check("pauli-transfer-diagonal", dev, 1e-10))

    # structural: every unordered pair contributes to exactly one Eve
    # fidelity, every index j > 0 to exactly one Bob fidelity
    pair_counts: dict[tuple[int, int], int] = {}
    index_counts: dict[int, int] = {}
    for lbl, pairs in analytic.ng_eve_pairs(2).items():
        for pr in pairs:
            pair_counts[pr] = pair_counts.get(pr, 0) + 1
    for lbl, idx in analytic.ng_stabilizer_indices(2).items():
        for j in idx:
            index_counts[j] = index_counts.get(j, 0) + 1
    structural_ok = (
        len(pair_counts) == 120
        and all(v == 1 for v in pair_counts.values())
        and len(index_counts) == 15
        and all(v == 1 for v in index_counts.values())
    )
    checks.append(Check("eve-pair-partition", 0.0 if structural_ok else 1.0, 0.0))

    dev = 0.0
    for _ in range(min(trials, 100)):
        s = _random_program(rng, 2)
        rep = analytic.ng2q_fidelities(s)
        for basis in mubs_for(2).bases:
            dev = max(
                dev,
                abs(analytic.ng_nq_bob_fidelity(s, basis) - rep.f_ab[basis.label]),
            )
    checks.append(Check("generalized-bob-fidelity", dev, 1e-12))

    dev = 0.0
    gates = ["H", "X", "Z", "S", "RX", "RY", "RZ", "CNOT", "CCNOT", "CRY"]
    for _ in range(min(trials, 200)):
        n = int(rng.integers(2, 5))
        ops = []
        for _ in range(12):
            name = gates[rng.integers(len(gates))]
            arity = {"CNOT": 2, "CRY": 2, "CCNOT": 3}.get(name, 1)
            if arity > n:
                continue
            qubits = tuple(rng.choice(n, size=arity, replace=False).tolist())
            angle = float(rng.uniform(-math.pi, math.pi))
            needs_angle = name in simcore.ROTATION_GATES
            ops.append(
                simcore.GateOp(name, qubits, angle if needs_angle else None)
            )
        circuit = simcore.Circuit(n, tuple(ops))
        v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        state = simcore.StateVector(n, v / np.linalg.norm(v))
        out = simcore.apply_circuit(state, circuit)
        dev = max(dev, abs(float(np.linalg.norm(out.amplitudes)) - 1.0))
        back = simcore.apply_circuit(out, circuit.inverse())
        dev = max(dev, float(np.max(np.abs(back.amplitudes - state.amplitudes))))
    checks.append(Check("circuit-unitarity", dev, 1e-10))

    return checks


def cmd_validate(args) -> int:
    checks = run_validation(trials=args.trials, seed=args.seed)
    width = max(len(c.name) for c in checks)
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(
            f"[{status}] {c.name:<{width}}  max deviation {_fmt(c.deviation)}"
            f"  (tolerance {_fmt(c.tolerance)})"
        )
        failed += 0 if c.passed else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# sweep / optimize


def _parse_f_range(spec: str) -> list[float]:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise ValueError(f"malformed f range {spec!r}, expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise ValueError(f"bad f range {spec!r}")
    values = []
    f = start
    while f <= stop + 1e-9:
        values.append(round(f, 10))
        f += step
    return values


def _config_comment(config: dict) -> list[str]:
    cleaned = {
        k: v
        for k, v in sorted(config.items())
        if k != "func" and not k.startswith("_") and v is not None
    }
    return [f"# {json.dumps(cleaned, default=str)}"]


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _sweep_csv_lines(result: optimize.SweepResult, config: dict) -> list[str]:
    basis_labels: list[str] = []
    for row in result.rows:
        for lbl in row.f_ab:
            if lbl not in basis_labels:
                basis_labels.append(lbl)
    header = ["f_target", "series", "label", "F_AB_avg", "F_AE_avg"]
    header += [f"F_AB_{lbl}" for lbl in basis_labels]
    header += [f"F_AE_{lbl}" for lbl in basis_labels]
    header.append("params")
    lines = _config_comment(config)
    lines.append(",".join(header))
    for row in result.rows:
        cells = [
            _fmt(row.f_target) if not math.isnan(row.f_target) else "",
            row.series,
            row.label,
            _fmt(row.f_ab_avg),
            _fmt(row.f_ae_avg),
        ]
        for lbl in basis_labels:
            cells.append(_fmt(row.f_ab[lbl]) if lbl in row.f_ab else "")
        for lbl in basis_labels:
            cells.append(_fmt(row.f_ae[lbl]) if lbl in row.f_ae else "")
        if row.parameters is None:
            cells.append("")
        else:
            cells.append('"' + " ".join(_fmt(p) for p in row.parameters) + '"')
        lines.append(",".join(cells))
    return lines


def _optimizer_config_from_args(args) -> optimize.OptimizerConfig | None:
    overrides = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.restarts is not None:
        overrides["restarts"] = args.restarts
    if args.lr is not None:
        overrides["learning_rate"] = args.lr
    cfg = optimize.default_task_config(args.task)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if not overrides:
        return cfg
    from dataclasses import replace

    return replace(cfg, **overrides)


def cmd_sweep(args) -> int:
    n = 2 if args.task in ("twenty", "pairs") else 1
    channel = _channel_from_args(args, n)
    f_values = _parse_f_range(args.f) if args.f else None
    cfg = _optimizer_config_from_args(args)
    result = optimize.frontier_sweep(
        args.task,
        f_values=f_values,
        cfg=cfg,
        channel=channel,
        grid_resolution=args.grid_resolution,
    )
    lines = _sweep_csv_lines(result, vars(args))
    if args.out:
        _write_lines(args.out, lines)
        print(f"wrote {len(result.rows)} rows to {args.out}")
    else:
        print("\n".join(lines))
    return 0


def cmd_optimize(args) -> int:
    n = 2 if args.task in ("twenty", "pairs") else 1
    channel = _channel_from_args(args, n)
    cfg = _optimizer_config_from_args(args)
    result = optimize.frontier_sweep(
        args.task,
        f_values=[args.f_target],
        cfg=cfg,
        channel=channel,
        grid_resolution=args.grid_resolution,
    )
    payload = []
    for row in result.rows:
        payload.append(
            {
                "f_target": None if math.isnan(row.f_target) else row.f_target,
                "series": row.series,
                "label": row.label,
                "f_ab": row.f_ab,
                "f_ae": row.f_ae,
                "f_ab_avg": row.f_ab_avg,
                "f_ae_avg": row.f_ae_avg,
                "params": None
                if row.parameters is None
                else [float(p) for p in row.parameters],
            }
        )
    _print_json({"task": args.task, "rows": payload})
    return 0


# ---------------------------------------------------------------------------
# mubs / table


def cmd_mubs(args) -> int:
    mset = mubs_for(args.n)
    for basis in mset.bases:
        print(f"basis {basis.label}:")
        for i, st in enumerate(basis.states):
            comps = ", ".join(
                f"{z.real:+.6f}{z.imag:+.6f}j" for z in st.amplitudes
            )
            print(f"  state {i}: [{comps}]")
    if args.check:
        dev = 0.0
        target = 2.0**-args.n
        for i, a in enumerate(mset.bases):
            for b in mset.bases[i + 1 :]:
                for sa in a.states:
                    for sb in b.states:
                        ov = abs(np.vdot(sa.amplitudes, sb.amplitudes)) ** 2
                        dev = max(dev, abs(ov - target))
        print(f"max unbiasedness deviation: {_fmt(dev)}")
    return 0


def cmd_table(args) -> int:
    if args.n in (1, 2):
        table = mub.action_table(args.n)
        rows = (
            mub.SINGLE_QUBIT_ERROR_ROWS if args.n == 1 else mub.TWO_QUBIT_ERROR_ROWS
        )
        cols = (
            mub.SINGLE_QUBIT_TABLE_BASES
            if args.n == 1
            else tuple(b.label for b in mubs_for(2).bases)
        )
        label_width = max(len(", ".join(str(p) for p in row)) for row in rows)
        print(" " * label_width + "  " + " ".join(f"{c:>4}" for c in cols))
        for row, bits in zip(rows, table):
            name = ", ".join(str(p) for p in row)
            print(f"{name:<{label_width}}  " + " ".join(f"{b:>4}" for b in bits))
    else:
        classes = mub.commuting_classes(args.n)
        print(f"{len(classes)} commuting classes of {len(classes[0])} Pauli strings:")
        for i, cls in enumerate(classes):
            print(f"  class {i}: " + " ".join(str(p) for p in cls))
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paulicloner",
        description="Programmable 1-to-2 cloning machines for N-qubit Pauli channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelities", help="evaluate clone fidelities by simulation")
    p.add_argument("--kind", choices=["ng", "qid"], required=True)
    p.add_argument("--n", type=int, choices=[1, 2], required=True)
    p.add_argument(
        "--preset",
        help="named program: uqcm-sym | pccm-sym | imbalanced(eta) | "
        "cnot-cloner | qid-uqcm-sym",
    )
    p.add_argument("--amplitudes", help="comma-separated program amplitudes")
    p.add_argument("--angles", help="rho,phi,theta for 1-qubit programs")
    p.add_argument("--noise", help="channel spec, e.g. 'X=0.25' or 'YI=0.45'")
    p.add_argument("--bases", help="comma-separated basis labels (default: all)")
    p.add_argument("--out", help="also write a per-state CSV here")
    p.set_defaults(func=cmd_fidelities)

    p = sub.add_parser("validate", help="run all oracle and structure checks")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="frontier sweep over Bob-fidelity targets")
    p.add_argument("--task", choices=list(optimize.TASKS), required=True)
    p.add_argument("--noise", help="channel spec, e.g. 'X=0.25' or 'YI=0.45'")
    p.add_argument("--f", help="target range start:stop:step (default per task)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--grid-resolution", type=int, default=64)
    p.add_argument("--out", help="CSV output path (default: print)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="optimize one Bob-fidelity target")
    p.add_argument("--task", choices=list(optimize.TASKS), required=True)
    p.add_argument("--f-target", type=float, required=True)
    p.add_argument("--noise", help="channel spec")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--grid-resolution", type=int, default=64)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("mubs", help="print the mutually unbiased bases")
    p.add_argument("--n", type=int, choices=[1, 2], required=True)
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_mubs)

    p = sub.add_parser("table", help="error/basis table or commuting classes")
    p.add_argument("--n", type=int, choices=[1, 2, 3], required=True)
    p.set_defaults(func=cmd_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
