"""Command-line front door: fixtures, sampling, line probes, dynamics, verify.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capability
error (e.g. SVG requested for a non-planar MDP). Every file-writing command
also emits a `<out>.manifest.json` recording argv, config, seed, input
digests, and output digests; re-running the recorded argv reproduces the
outputs byte for byte.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    CemConfig,
    InitSpec,
    resolve_init,
    run_cem,
    run_npg,
    run_policy_gradient,
    run_policy_iteration,
    run_value_iteration,
)
from .errors import VfpError
from .evaluation import value_function
from .geometry import (
    AgreementSet,
    interpolation_curve,
    line_segment,
    mix_policies,
    polytope_vertices_det,
    sample_values,
)
from .mdp import (
    FIXTURE_NAMES,
    Mdp,
    Policy,
    builtin_fixture,
    dump_mdp,
    load_mdp,
    random_policy,
)
from .output import sha256_file, svg_scatter, write_csv, write_manifest, write_svg
from .verification import SUITE_NAMES, run_all_suites, run_suite

USAGE_ERROR = 2
CAPABILITY_ERROR = 3

ALGORITHMS = ("vi", "pi", "pg", "entpg", "npg", "cem", "cemcn")

DEFAULT_ITERS = {"vi": 100, "pi": 0, "pg": 2000, "entpg": 2000, "npg": 500,
                 "cem": 100, "cemcn": 100}


class CliError(Exception):
    def __init__(self, message: str, code: int = USAGE_ERROR) -> None:
        super().__init__(message)
        self.code = code


def _thread_cap() -> int:
    """VFP_THREADS caps internal parallelism; this build runs sequentially."""
    raw = os.environ.get("VFP_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _resolve_mdp(spec: str) -> tuple[Mdp, dict[str, str]]:
    """Interpret --mdp as a fixture name or a JSON document path."""
    if spec in FIXTURE_NAMES:
        return builtin_fixture(spec), {"mdp": f"fixture:{spec}"}
    path = Path(spec)
    if not path.is_file():
        raise CliError(f"--mdp {spec!r} is neither a fixture name nor a file")
    mdp = load_mdp(path.read_text())
    return mdp, {str(path): sha256_file(path)}


def _load_policy_file(path: Path, mdp: Mdp) -> Policy:
    try:
        doc = json.loads(path.read_text())
        policy = Policy(np.asarray(doc["probs"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad policy file {path}: {exc}") from exc
    if policy.probs.shape != (mdp.n_states, mdp.n_actions):
        raise CliError(f"policy in {path} does not match the MDP shape")
    return policy


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_fixtures(args, argv: list[str]) -> int:
    if args.action == "list":
        for name in FIXTURE_NAMES:
            fx = builtin_fixture(name)
            print(f"{name}\t|S|={fx.n_states}\t|A|={fx.n_actions}\tgamma={fx.gamma}")
        return 0
    mdp = builtin_fixture(args.name)  # UnknownFixture -> exit 2 via main()
    out = Path(args.out)
    out.write_text(dump_mdp(mdp) + "\n")
    write_manifest(
        out,
        argv,
        "fixtures",
        {"name": args.name},
        None,
        {"mdp": f"fixture:{args.name}"},
        [out],
        __version__,
    )
    return 0


def cmd_sample(args, argv: list[str]) -> int:
    if args.n < 1:
        raise CliError("--n must be at least 1")
    mdp, inputs = _resolve_mdp(args.mdp)
    if args.svg is not None and mdp.n_states != 2:
        raise CliError("SVG output needs a 2-state MDP", CAPABILITY_ERROR)
    fixed_states = _parse_fix(args.fix, mdp)
    agreement = None
    if fixed_states:
        agreement = AgreementSet(
            base=random_policy(mdp, args.seed), fixed_states=tuple(fixed_states)
        )
    values = sample_values(mdp, args.n, args.seed, agreement)
    header = [f"v_s{i}" for i in range(mdp.n_states)]
    out = Path(args.out)
    write_csv(out, header, values)
    outputs = [out]
    if args.svg is not None:
        vertices = np.stack([v for _, v in polytope_vertices_det(mdp)])
        svg_path = Path(args.svg)
        write_svg(svg_path, svg_scatter(values, vertices=vertices))
        outputs.append(svg_path)
    write_manifest(
        out,
        argv,
        "sample",
        {"n": args.n, "fix": sorted(fixed_states)},
        args.seed,
        inputs,
        outputs,
        __version__,
    )
    return 0


def _parse_fix(fix_args: list[str], mdp: Mdp) -> set[int]:
    fixed: set[int] = set()
    for item in fix_args or []:
        state_str, _, rhs = item.partition("=")
        if rhs != "copy-of-base":
            raise CliError(f"--fix expects '<state>=copy-of-base', got {item!r}")
        try:
            state = int(state_str)
        except ValueError:
            raise CliError(f"--fix state must be an integer, got {state_str!r}") from None
        if not 0 <= state < mdp.n_states:
            raise CliError(f"--fix state {state} out of range")
        fixed.add(state)
    return fixed


def cmd_line(args, argv: list[str]) -> int:
    mdp, inputs = _resolve_mdp(args.mdp)
    if not 0 <= args.state < mdp.n_states:
        raise CliError(f"--state {args.state} out of range for |S|={mdp.n_states}")
    if args.grid < 2:
        raise CliError("--grid must be at least 2")
    base = random_policy(mdp, args.seed)
    segment = line_segment(mdp, base, args.state)
    curve = interpolation_curve(
        mdp, segment.pi_low, segment.pi_high, args.state, grid_size=args.grid
    )
    header = ["mu", "rho"] + [f"v_s{i}" for i in range(mdp.n_states)] + ["endpoint_flag"]
    rows = []
    for idx, (mu, rho) in enumerate(zip(curve.mus, curve.rhos)):
        value = value_function(
            mdp, mix_policies(segment.pi_low, segment.pi_high, float(mu))
        )
        flag = 1 if idx in (0, len(curve.mus) - 1) else 0
        rows.append([float(mu), float(rho), *value, flag])
    out = Path(args.out)
    write_csv(out, header, rows)
    write_manifest(
        out,
        argv,
        "line",
        {"state": args.state, "grid": args.grid},
        args.seed,
        inputs,
        [out],
        __version__,
    )
    return 0


def _resolve_dynamics_init(args, mdp: Mdp) -> tuple[InitSpec, dict[str, str]]:
    label = args.init
    named = {
        "vertex": "near_vertex",
        "boundary": "near_boundary",
        "interior": "interior",
    }
    if label in named:
        return InitSpec(kind=named[label]), {}
    path = Path(label)
    if not path.is_file():
        raise CliError(
            f"--init must be vertex|boundary|interior or a policy file, got {label!r}"
        )
    policy = _load_policy_file(path, mdp)
    return (
        InitSpec(kind="explicit_policy", policy=policy),
        {str(path): sha256_file(path)},
    )


def cmd_dynamics(args, argv: list[str]) -> int:
    if args.algo not in ALGORITHMS:
        raise CliError(f"unknown --algo {args.algo!r}")
    mdp, inputs = _resolve_mdp(args.mdp)
    if args.svg is not None and mdp.n_states != 2:
        raise CliError("SVG output needs a 2-state MDP", CAPABILITY_ERROR)
    init_spec, init_inputs = _resolve_dynamics_init(args, mdp)
    inputs = {**inputs, **init_inputs}
    iters = args.iters if args.iters is not None else DEFAULT_ITERS[args.algo]
    if args.algo != "pi" and iters < 1:
        raise CliError("--iters must be at least 1")
    eta = args.eta if args.eta is not None else 0.05
    if args.algo in ("pg", "entpg", "npg") and eta <= 0:
        raise CliError("--eta must be positive")
    start_policy = resolve_init(mdp, init_spec, args.seed)
    if args.algo == "vi":
        trajectory = run_value_iteration(
            mdp, value_function(mdp, start_policy), iters
        )
    elif args.algo == "pi":
        trajectory = run_policy_iteration(mdp, value_function(mdp, start_policy))
    elif args.algo == "pg":
        trajectory = run_policy_gradient(
            mdp, start_policy, eta, iters, entropy_coeff=0.0, seed=args.seed
        )
    elif args.algo == "entpg":
        coeff = args.entropy_coeff if args.entropy_coeff is not None else 0.1
        trajectory = run_policy_gradient(
            mdp, start_policy, eta, iters, entropy_coeff=coeff, seed=args.seed
        )
    elif args.algo == "npg":
        trajectory = run_npg(mdp, start_policy, eta, iters, seed=args.seed)
    else:
        noise = 0.0 if args.algo == "cem" else 0.05
        config = CemConfig(
            population=500,
            elites=50,
            init_cov_scale=0.1,
            noise_scale=noise,
            iterations=iters,
            seed=args.seed,
        )
        trajectory = run_cem(mdp, np.log(start_policy.probs), config)

    meta_keys = sorted({k for m in trajectory.meta for k in m} - {"iteration"})
    header = (
        ["iter"]
        + [f"v_s{i}" for i in range(mdp.n_states)]
        + [f"meta_{k}" for k in meta_keys]
    )
    rows = []
    for point, meta in zip(trajectory.points, trajectory.meta):
        rows.append(
            [int(meta["iteration"]), *point]
            + [float(meta.get(k, 0.0)) for k in meta_keys]
        )
    out = Path(args.out)
    write_csv(out, header, rows)
    outputs = [out]
    if args.svg is not None:
        cloud = sample_values(mdp, 4000, args.seed)
        vertices = np.stack([v for _, v in polytope_vertices_det(mdp)])
        svg_path = Path(args.svg)
        write_svg(
            svg_path,
            svg_scatter(cloud, vertices=vertices, path_points=trajectory.points),
        )
        outputs.append(svg_path)
    write_manifest(
        out,
        argv,
        "dynamics",
        {
            "algo": args.algo,
            "init": args.init,
            "iters": iters,
            "eta": eta,
            "entropy_coeff": args.entropy_coeff,
        },
        args.seed,
        inputs,
        outputs,
        __version__,
    )
    return 0


def cmd_verify(args, argv: list[str]) -> int:
    if args.suite != "all" and args.suite not in SUITE_NAMES:
        raise CliError(f"unknown suite {args.suite!r}; known: all, {', '.join(SUITE_NAMES)}")
    mdp = None
    inputs: dict[str, str] = {}
    if args.mdp is not None:
        mdp, inputs = _resolve_mdp(args.mdp)
    if args.suite == "all":
        reports = run_all_suites(trials=args.trials, seed=args.seed, mdp=mdp)
    else:
        reports = [run_suite(args.suite, trials=args.trials, seed=args.seed, mdp=mdp)]
    payload = {
        "reports": [r.to_dict() for r in reports],
        "all_passed": all(r.passed for r in reports),
    }
    out = Path(args.report)
    out.write_bytes((json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("ascii"))
    write_manifest(
        out,
        argv,
        "verify",
        {"suite": args.suite, "trials": args.trials},
        args.seed,
        inputs,
        [out],
        __version__,
    )
    for report in reports:
        status = "pass" if report.passed else "FAIL"
        print(
            f"{status} {report.check_name}: {report.instances_run} instances, "
            f"max deviation {report.max_deviation:.3e}"
        )
    return 0 if payload["all_passed"] else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vfp",
        description="Exact value-function geometry and learning dynamics for finite MDPs.",
    )
    parser.add_argument("--version", action="version", version=f"vfp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fixtures = sub.add_parser("fixtures", help="list or dump built-in MDPs")
    fixtures_sub = fixtures.add_subparsers(dest="action", required=True)
    fixtures_sub.add_parser("list", help="print the catalog")
    dump = fixtures_sub.add_parser("dump", help="write one fixture as JSON")
    dump.add_argument("name")
    dump.add_argument("--out", required=True)

    sample = sub.add_parser("sample", help="sample policy values into a CSV")
    sample.add_argument("--mdp", required=True, help="fixture name or JSON path")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument(
        "--fix",
        action="append",
        metavar="S=copy-of-base",
        help="pin state S to the seed-derived base policy (repeatable)",
    )
    sample.add_argument("--out", required=True)
    sample.add_argument("--svg")

    line = sub.add_parser("line", help="bracket segment and mixture curve at one state")
    line.add_argument("--mdp", required=True)
    line.add_argument("--state", type=int, required=True)
    line.add_argument("--seed", type=int, default=0)
    line.add_argument("--grid", type=int, default=21)
    line.add_argument("--out", required=True)

    dynamics = sub.add_parser("dynamics", help="run a learning algorithm, record values")
    dynamics.add_argument("--mdp", required=True)
    dynamics.add_argument("--algo", required=True, choices=ALGORITHMS)
    dynamics.add_argument(
        "--init", default="interior", help="vertex|boundary|interior or a policy JSON path"
    )
    dynamics.add_argument("--iters", type=int)
    dynamics.add_argument("--eta", type=float)
    dynamics.add_argument("--entropy-coeff", dest="entropy_coeff", type=float)
    dynamics.add_argument("--seed", type=int, default=0)
    dynamics.add_argument("--out", required=True)
    dynamics.add_argument("--svg")

    verify = sub.add_parser("verify", help="run property suites, write a JSON report")
    verify.add_argument("--suite", required=True, help=f"all or one of {', '.join(SUITE_NAMES)}")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--mdp", help="optional fixture name or JSON path")
    verify.add_argument("--report", required=True)

    return parser


_HANDLERS = {
    "fixtures": cmd_fixtures,
    "sample": cmd_sample,
    "line": cmd_line,
    "dynamics": cmd_dynamics,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _thread_cap()  # parsed for interface stability; execution is sequential
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args, argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except VfpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
