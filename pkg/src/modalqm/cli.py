"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 fit did not converge.
"""

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as mio
from .contexts import random_context, transition_matrix
from .exceptions import ModalQMError
from .fitting import CONVERGED_RESIDUAL, OrthostochasticFit, UnistochasticFit
from .groups import (
    PhysicalScale,
    global_phase,
    physical_observable,
    representation_defect,
    rotation_unitary,
    spin_matrices,
)
from .linalg import hermitian_eigendecomposition, matrix_to_json
from .measurement import (
    classical_refinement_demo,
    dice_contexts,
    estimate_reciprocity,
    quantum_dice_demo,
    run_sequence,
)
from .rng import derive_seed, numpy_generator
from .stochastic import birkhoff_sample, check_doubly_stochastic, is_doubly_stochastic

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 42
    tol: float = 1e-10
    shots: int = 100000
    restarts: int = 32
    output_format: str = "json"
    output_path: str = None
    jobs: int = 1

    def __post_init__(self):
        if self.shots < 1 or self.restarts < 1 or not self.tol > 0 or self.jobs < 1:
            raise InputError("shots, restarts and jobs must be >= 1 and tol > 0")


def _config(args):
    return RunConfig(
        seed=args.seed,
        tol=args.tol,
        shots=args.shots if args.shots is not None else 100000,
        restarts=args.restarts,
        output_format=args.format,
        output_path=args.out,
        jobs=args.jobs,
    )


def _complex(z):
    return {"re": z.real, "im": z.imag}


def cmd_transition(args, cfg):
    a, b = mio.load_context(args.context_a), mio.load_context(args.context_b)
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.id} has {a.dim}, {b.id} has {b.dim}")
    tm = transition_matrix(a, b)
    ok = is_doubly_stochastic(tm.probs, cfg.tol)
    row_dev, col_dev = tm.row_deviation(), tm.column_deviation()
    if cfg.output_format == "csv":
        verdict = (
            f"# verdict={'pass' if ok else 'fail'} "
            f"max_row_deviation={mio.fmt(row_dev)} max_col_deviation={mio.fmt(col_dev)}\n"
        )
        return mio.transition_to_csv(tm) + verdict, EXIT_OK
    return mio.dumps({
        "source": tm.source_context,
        "target": tm.target_context,
        "probs": tm.probs.tolist(),
        "doubly_stochastic": ok,
        "max_row_deviation": row_dev,
        "max_col_deviation": col_dev,
    }), EXIT_OK


def cmd_fit(args, cfg):
    B = mio.read_matrix_csv(Path(args.target).read_text())
    B = check_doubly_stochastic(B, cfg.tol)
    cls = UnistochasticFit if args.mode == "unistochastic" else OrthostochasticFit
    est = cls(restarts=cfg.restarts, random_state=cfg.seed, n_jobs=cfg.jobs).fit(B)
    result = est.to_result()
    code = EXIT_OK if result.converged else EXIT_NOT_CONVERGED
    if cfg.output_format == "csv":
        rows = [(r, res) for r, res in enumerate(result.per_restart_residuals)]
        head = (
            f"# mode={args.mode} residual={mio.fmt(result.residual)} "
            f"converged={str(result.converged).lower()}\n"
        )
        return head + mio.rows_csv(["restart", "residual"], rows), code
    return mio.dumps(result.to_json()), code


def cmd_spin(args, cfg):
    rep = spin_matrices(args.j)
    u = np.array(args.u, dtype=float)
    axis = np.array(args.axis, dtype=float)
    angle = np.linalg.norm(u)
    direction = u / angle if angle > 0 else np.array([0.0, 0.0, 1.0])
    expected = (-1) ** int(2 * rep.j)
    two_pi = global_phase(rotation_unitary(rep, 2 * math.pi * direction))
    rng = numpy_generator(cfg.seed, 0)
    partners = [u] + [rng.normal(size=3) * math.pi for _ in range(8)]
    defect = max(representation_defect(rep, u, v) for v in partners)
    commutators = rep.commutator_residuals()
    casimir = rep.casimir_residual()
    observable = physical_observable(rep, axis, PhysicalScale(args.hbar))
    spectrum = hermitian_eigendecomposition(observable).eigenvalues
    phase = global_phase(rotation_unitary(rep, u))
    checks = {
        "commutators": (max(commutators), max(commutators) <= cfg.tol),
        "casimir": (casimir, casimir <= cfg.tol),
        "two_pi_phase_error": (
            abs(two_pi - expected) if two_pi is not None else math.inf,
            two_pi is not None and abs(two_pi - expected) <= 1e-9,
        ),
        "representation_defect": (defect, defect <= 1e-8),
    }
    if cfg.output_format == "csv":
        rows = [(name, value, "pass" if ok else "fail") for name, (value, ok) in checks.items()]
        text = mio.rows_csv(["check", "value", "result"], rows)
        gp = "none" if phase is None else f"{mio.fmt(phase.real)},{mio.fmt(phase.imag)}"
        text += f"# global_phase={gp}\n"
        text += "# spectrum=" + " ".join(mio.fmt(x) for x in spectrum) + "\n"
        return text, EXIT_OK
    return mio.dumps({
        "j": f"{rep.j.numerator}/{rep.j.denominator}",
        "dim": rep.dim,
        "u": u.tolist(),
        "checks": {name: {"value": value, "pass": bool(ok)} for name, (value, ok) in checks.items()},
        "commutator_residuals": list(commutators),
        "two_pi_phase": None if two_pi is None else _complex(two_pi),
        "global_phase": None if phase is None else _complex(phase),
        "hbar": args.hbar,
        "axis": axis.tolist(),
        "observable": matrix_to_json(observable),
        "spectrum": spectrum.tolist(),
    }), EXIT_OK


def _load_chain(path):
    path = Path(path)
    try:
        spec = json.loads(path.read_text())
        base = path.parent
        initial = spec["initial"]
        start = mio.load_context(base / initial["context"])
        index = int(initial["index"])
        chain = [mio.load_context(base / p) for p in spec["chain"]]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"bad chain spec {path}: {exc}") from exc
    return start, index, chain, spec.get("shots")


def cmd_simulate(args, cfg):
    start, index, chain, file_shots = _load_chain(args.chain_spec)
    shots = args.shots if args.shots is not None else (file_shots or cfg.shots)
    if shots < 1:
        raise InputError("shots must be >= 1")
    result = run_sequence((start, index), chain, int(shots), cfg.seed)
    if cfg.output_format == "csv":
        return mio.histogram_csv(result), EXIT_OK
    return mio.dumps(result.to_json()), EXIT_OK


def _demo_dice(args, cfg):
    u = np.array(args.u, dtype=float)
    freqs = quantum_dice_demo(u, cfg.shots, cfg.seed)
    die, turned = dice_contexts(u)
    exact = transition_matrix(die, turned).probs[0]
    if cfg.output_format == "csv":
        rows = [(label, f, float(p)) for (label, f), p in zip(freqs.items(), exact)]
        return mio.rows_csv(["face", "frequency", "exact"], rows)
    return mio.dumps({
        "demo": "dice",
        "u": u.tolist(),
        "shots": cfg.shots,
        "frequencies": freqs,
        "exact": {label: float(p) for label, p in zip(freqs, exact)},
    })


def _demo_refinement(args, cfg):
    rows = []
    for k, theta in enumerate(np.linspace(0.0, math.pi, args.steps)):
        q, c, a = classical_refinement_demo(float(theta), cfg.shots, derive_seed(cfg.seed, k))
        sigma = math.sqrt(a * (1 - a) / cfg.shots)
        rows.append((float(theta), q, c, a, sigma))
    header = ["theta", "quantum", "classical", "analytic", "sigma"]
    if cfg.output_format == "csv":
        return mio.rows_csv(header, rows)
    return mio.dumps({"demo": "refinement", "shots": cfg.shots,
                      "rows": [dict(zip(header, r)) for r in rows]})


def _demo_reciprocity(args, cfg):
    n = args.dim
    E = random_context(n, derive_seed(cfg.seed, 0), id="E")
    F = random_context(n, derive_seed(cfg.seed, 1), id="F")
    exact = transition_matrix(E, F).probs
    rows = []
    for i in range(n):
        for j in range(n):
            est = estimate_reciprocity(E, F, i, j, cfg.shots, derive_seed(cfg.seed, 2 + i * n + j))
            agree = abs(est.p_hat_j_given_i - est.p_hat_i_given_j) <= 5 * est.stderr
            rows.append((i, j, est.p_hat_j_given_i, est.p_hat_i_given_j, est.stderr,
                         float(exact[i, j]), "yes" if agree else "no"))
    header = ["i", "j", "forward", "reverse", "stderr", "exact", "agree"]
    if cfg.output_format == "csv":
        return mio.rows_csv(header, rows)
    return mio.dumps({"demo": "reciprocity", "dim": n, "shots": cfg.shots,
                      "rows": [dict(zip(header, r)) for r in rows]})


def target_hash(B):
    return hashlib.sha256(mio.write_matrix_csv(B).encode()).hexdigest()[:16]


def _demo_atlas(args, cfg):
    rows = []
    for t in range(args.targets):
        B = birkhoff_sample(args.dim, args.permutations or args.dim, derive_seed(cfg.seed, t))
        ortho = OrthostochasticFit(restarts=cfg.restarts, random_state=cfg.seed, n_jobs=cfg.jobs).fit(B)
        # the orthogonal optimum also seeds the unitary search, since O(N) sits inside U(N)
        uni = UnistochasticFit(restarts=cfg.restarts, random_state=cfg.seed, n_jobs=cfg.jobs).fit(
            B, init=[ortho.matrix_]
        )
        rows.append((target_hash(B), uni.residual_, ortho.residual_))
    header = ["target_hash", "unistochastic_residual", "orthostochastic_residual"]
    if cfg.output_format == "csv":
        return mio.rows_csv(header, rows)
    return mio.dumps({"demo": "atlas", "dim": args.dim, "rows": [dict(zip(header, r)) for r in rows]})


DEMOS = {
    "dice": _demo_dice,
    "refinement": _demo_refinement,
    "reciprocity": _demo_reciprocity,
    "atlas": _demo_atlas,
}


def cmd_demo(args, cfg):
    return DEMOS[args.name](args, cfg), EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--shots", type=int, default=None, help="default 100000")
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers; output is unaffected")

    parser = argparse.ArgumentParser(prog="modalqm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transition", parents=[common], help="transition matrix between two contexts")
    p.add_argument("context_a")
    p.add_argument("context_b")
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("fit", parents=[common], help="realize a doubly stochastic target")
    p.add_argument("target")
    p.add_argument("--mode", choices=["unistochastic", "orthostochastic"], default="unistochastic")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("spin", parents=[common], help="check a spin-j representation")
    p.add_argument("j")
    p.add_argument("--u", type=float, nargs=3, default=[0.0, 0.0, 2 * math.pi])
    p.add_argument("--axis", type=float, nargs=3, default=[0.0, 0.0, 1.0])
    p.add_argument("--hbar", type=float, default=1.0)
    p.set_defaults(func=cmd_spin)

    p = sub.add_parser("simulate", parents=[common], help="run a measurement chain")
    p.add_argument("chain_spec")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("demo", parents=[common], help="named demonstrations")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--u", type=float, nargs=3, default=[0.0, 0.0, 0.0], help="dice rotation")
    p.add_argument("--steps", type=int, default=16, help="refinement theta points")
    p.add_argument("--dim", type=int, default=None, help="dimension (reciprocity 4, atlas 3)")
    p.add_argument("--targets", type=int, default=50, help="atlas target count")
    p.add_argument("--permutations", type=int, default=None, help="atlas permutations per target")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dim", "absent") is None:
        args.dim = 4 if args.name == "reciprocity" else 3
    try:
        cfg = _config(args)
        text, code = args.func(args, cfg)
    except (InputError, ModalQMError, OSError, ValueError) as exc:
        print(f"modalqm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_NOT_CONVERGED:
        print(
            f"modalqm: best residual above {CONVERGED_RESIDUAL:g}; target empirically infeasible",
            file=sys.stderr,
        )
    return code


if __name__ == "__main__":
    sys.exit(main())
