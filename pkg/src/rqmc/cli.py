"""Command-line front end.

Subcommands: generate, check-net, quadrature, sweep-mse, bounds, anova,
sir, sqmc, simulate.  All outputs are data files (CSV plus a JSON metadata
sidecar); plotting is left to downstream tooling.  Exit codes: 0 ok,
1 check failed, 2 usage error, 3 runtime/IO error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .anova import AnovaTable, build_table, theorem1_bound
from .integrands import get_integrand
from .netcheck import is_lambda_tms_net, is_tms_net
from .quadrature import bound_report, estimate, replicate
from .scrambling import ScrambleState, derive_seed, scramble
from .sequences import GeneratorSpec, generate
from .sir import get_problem, sir_estimate
from .sqmc import get_model, grid_loglik, mse_sweep, simulate, smc_loglik, sqmc_loglik

SCHEME_ALIASES = {"owen": "owen_nested", "linear": "linear_matousek"}


class UsageError(Exception):
    pass


def parse_grid(spec: str) -> list[int]:
    """N-grid spec: 'powers:b:m_min:m_max' or 'arith:start:step:count'."""
    parts = spec.split(":")
    try:
        if parts[0] == "powers" and len(parts) == 4:
            b, lo, hi = int(parts[1]), int(parts[2]), int(parts[3])
            grid = [b**m for m in range(lo, hi + 1)]
        elif parts[0] == "arith" and len(parts) == 4:
            start, step, count = int(parts[1]), int(parts[2]), int(parts[3])
            grid = [start + i * step for i in range(count)]
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"malformed grid spec {spec!r}") from None
    if not grid:
        raise UsageError("empty grid")
    if any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("grid must be strictly increasing positive integers")
    return grid


def _gen_spec(args) -> GeneratorSpec:
    return GeneratorSpec(kind=args.gen.replace("-", "_"), dim=args.dim, base=args.base)


def _scheme(name: str) -> str:
    return SCHEME_ALIASES.get(name, name)


def _sidecar(path: str, args, t0: float, extra: dict | None = None) -> None:
    meta = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    meta["version"] = __version__
    meta["wall_time"] = time.time() - t0
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _cmd_generate(args) -> int:
    spec = _gen_spec(args)
    ps = generate(spec, args.n)
    if args.scramble != "none":
        ps = scramble(ps, ScrambleState(seed=args.seed, scheme=_scheme(args.scramble)))
    vals = ps.values()
    lines = ["," .join(f"x{j+1}" for j in range(ps.dim))]
    for row in vals:
        lines.append(",".join(repr(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_check_net(args) -> int:
    spec = _gen_spec(args)
    lam = args.lam
    count = (lam if lam else 1) * args.base**args.m
    ps = generate(spec, count)
    if args.scramble != "none":
        ps = scramble(ps, ScrambleState(seed=args.seed, scheme=_scheme(args.scramble)))
    if lam:
        ok = is_lambda_tms_net(ps, lam, args.t, args.m)
        kind = f"({lam},{args.t},{args.m},{args.dim})-net"
    else:
        ok = is_tms_net(ps, args.t, args.m)
        kind = f"({args.t},{args.m},{args.dim})-net"
    print(f"{spec.kind} base {args.base} dim {args.dim}: {kind} check "
          f"{'PASSED' if ok else 'FAILED'}")
    return 0 if ok else 1


def _cmd_quadrature(args) -> int:
    spec = _gen_spec(args)
    phi = get_integrand(args.integrand, args.dim)
    ps = scramble(generate(spec, args.n), ScrambleState(seed=args.seed, scheme=_scheme(args.scheme)))
    rng = np.random.Generator(np.random.Philox(key=derive_seed(args.seed, 7)))
    est = estimate(ps, phi, rng)
    print(f"I_hat({args.integrand}, s={args.dim}, N={args.n}) = {est.value!r}")
    if phi.exact_integral is not None:
        print(f"exact = {phi.exact_integral!r}  abs.err = {abs(est.value - phi.exact_integral):.3e}")
    return 0


def _cmd_sweep_mse(args) -> int:
    t0 = time.time()
    grid = parse_grid(args.grid)
    phi = get_integrand(args.integrand, args.dim)
    if phi.exact_integral is None:
        raise UsageError(f"integrand {args.integrand!r} has no reference integral")
    spec = _gen_spec(args)
    report = replicate(
        spec, _scheme(args.scheme), phi, phi.exact_integral, grid, args.reps,
        args.seed, threads=args.threads,
    )
    report.to_csv(args.out)
    _sidecar(_meta_path(args.out), args, t0)
    print(f"wrote {args.out} ({len(report.records)} rows)")
    return 0


def _cmd_bounds(args) -> int:
    rep = bound_report(args.t, args.s, args.b, sigma2=args.sigma2, n=args.n)
    text = rep.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_anova(args) -> int:
    t0 = time.time()
    phi = get_integrand(args.integrand, args.dim)
    table = build_table(phi, args.depth, base=args.base, resolution=args.resolution)
    if args.out:
        table.to_json(args.out)
        _sidecar(_meta_path(args.out), args, t0)
        print(f"wrote {args.out} ({len(table.entries)} entries, "
              f"tabled mass {table.tabled_mass!r})")
    else:
        print(table.to_json())
    if args.bound_at:
        for n in (int(x) for x in args.bound_at.split(",")):
            print(f"theorem bound at N={n}: {theorem1_bound(table, n, args.t)!r}")
    return 0


def _cmd_sir(args) -> int:
    t0 = time.time()
    prob = get_problem(args.problem)
    vals = [
        sir_estimate(prob, args.n, derive_seed(args.seed, r), scheme=_scheme(args.scheme))
        for r in range(args.reps)
    ]
    arr = np.asarray(vals)
    print(f"SIR {args.problem}: N={args.n} reps={args.reps} "
          f"mean={arr.mean()!r} var={arr.var(ddof=1) if args.reps > 1 else 0.0!r}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("rep,estimate\n")
            for r, v in enumerate(vals):
                fh.write(f"{r},{v!r}\n")
        _sidecar(_meta_path(args.out), args, t0)
    return 0


def _load_obs(path: str) -> np.ndarray:
    return np.loadtxt(path, dtype=np.float64, ndmin=1)


def _cmd_sqmc(args) -> int:
    t0 = time.time()
    model = get_model(args.model)
    if args.obs:
        y = _load_obs(args.obs)
    else:
        _, y = simulate(model, args.T, derive_seed(args.seed, 0xD, 0xA))
    if args.grid:
        grid = parse_grid(args.grid)
        ref = None if args.ref == "auto" else float(args.ref)
        if ref is None and len(y) <= 5:
            ref = grid_loglik(model, y)
        reports = mse_sweep(
            model, y, grid, args.reps, args.seed, reference=ref,
            algos=("sqmc", "smc") if args.algo == "both" else (args.algo,),
            scheme=_scheme(args.scheme),
        )
        if not args.out:
            raise UsageError("--out is required for sweep mode")
        base, ext = os.path.splitext(args.out)
        written = []
        for algo, rep in reports.items():
            path = f"{base}_{algo}{ext or '.csv'}"
            rep.to_csv(path)
            written.append(path)
        _sidecar(_meta_path(args.out), args, t0, extra={"files": written})
        print("wrote " + ", ".join(written))
        return 0
    run = (sqmc_loglik(model, y, args.n, args.seed, scheme=_scheme(args.scheme))
           if args.algo in ("both", "sqmc")
           else smc_loglik(model, y, args.n, args.seed))
    print(f"{run.algo} log p_hat(y_0:{len(y)-1}) = {run.loglik!r}  "
          f"(N={args.n}, min ESS {run.ess.min():.1f})")
    return 0


def _cmd_simulate(args) -> int:
    model = get_model(args.model)
    z, y = simulate(model, args.T, args.seed)
    with open(args.out, "w") as fh:
        for v in y:
            fh.write(f"{float(v)!r}\n")
    if args.states_out:
        with open(args.states_out, "w") as fh:
            for v in z:
                fh.write(f"{float(v)!r}\n")
    print(f"wrote {args.T} observations to {args.out}")
    return 0


def _meta_path(out: str) -> str:
    base, _ = os.path.splitext(out)
    return base + ".meta.json"


def _add_common(p, *, gen=True, scheme=True):
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    if gen:
        p.add_argument("--gen", default="sobol",
                       choices=["sobol", "faure", "van-der-corput", "van_der_corput"])
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--base", type=int, default=2)
    if scheme:
        p.add_argument("--scheme", default="owen",
                       choices=["owen", "linear", "owen_nested", "linear_matousek"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rqmc",
        description="Scrambled (t,s)-sequences of arbitrary size: quadrature, "
                    "variance bounds, SIR and SQMC experiment runner.",
    )
    parser.add_argument("--version", action="version", version=f"rqmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit the first N (optionally scrambled) points as CSV")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scramble", default="none", choices=["none", "owen", "linear"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("check-net", help="verify the (t,m,s)-net property (exit 1 on failure)")
    _add_common(p, scheme=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--lam", type=int, help="check the (lambda,t,m,s)-net property instead")
    p.add_argument("--scramble", default="none", choices=["none", "owen", "linear"])
    p.set_defaults(func=_cmd_check_net)

    p = sub.add_parser("quadrature", help="one scrambled-net quadrature estimate")
    _add_common(p)
    p.add_argument("--integrand", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_quadrature)

    p = sub.add_parser("sweep-mse", help="replicated MSE sweep over an N grid (writes CSV)")
    _add_common(p)
    p.add_argument("--integrand", required=True)
    p.add_argument("--grid", required=True, help="powers:b:m_min:m_max or arith:start:step:count")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep_mse)

    p = sub.add_parser("bounds", help="closed-form variance bounds and crossover size")
    p.add_argument("--config")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("anova", help="tabulate sigma2_{u,kappa} and evaluate the variance bound")
    p.add_argument("--config")
    p.add_argument("--integrand", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--resolution", type=int, default=8)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--bound-at", help="comma-separated N values to evaluate the bound at")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_anova)

    p = sub.add_parser("sir", help="scrambled-net sampling importance resampling")
    _add_common(p, gen=False)
    p.add_argument("--problem", default="linear1d")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sir)

    p = sub.add_parser("sqmc", help="SQMC/SMC likelihood estimation in state-space models")
    _add_common(p, gen=False)
    p.add_argument("--model", required=True, choices=["sv", "nonlinear"])
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--obs", help="observations CSV, one value per line")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--grid", help="run an MSE sweep over this N grid instead of one filter pass")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--algo", default="both", choices=["both", "sqmc", "smc"])
    p.add_argument("--ref", default="auto", help="reference log-likelihood, or 'auto'")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sqmc)

    p = sub.add_parser("simulate", help="simulate observations from a model")
    p.add_argument("--config")
    p.add_argument("--model", required=True, choices=["sv", "nonlinear"])
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--states-out")
    p.set_defaults(func=_cmd_simulate)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Splice config-file entries in as flags so explicit flags override them."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"malformed config line {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            extra += [f"--{key.replace('_', '-')}", value]
    # insert right after the subcommand so user flags (later) take precedence
    for i, tok in enumerate(argv):
        if not tok.startswith("-"):
            return argv[: i + 1] + extra + argv[i + 1 :]
    return argv + extra


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except (RuntimeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
