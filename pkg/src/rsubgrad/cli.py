"""Command-line driver: ``generate``, ``run``, ``certify`` and ``plot``.

Exit codes: 0 success, 1 certification failure, 2 usage, config or run error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .bounds import THEOREMS, CurvatureConstants, certify_trace
from .feasibility import FeasibilityInstance, generate
from .io import (
    ConfigError,
    RunConfig,
    parse_float,
    read_config,
    read_instance,
    read_report,
    read_trace,
    update_config,
    validate_config,
    write_instance,
    write_report,
    write_trace,
)
from .plot import write_svg
from .solver import BASEL_SIGMA, Exogenous, Polyak, SolverConfig, SolverError, run

DEFAULT_THEOREM = {"exogenous": "exogenous", "polyak": "polyak"}


def build_config(args) -> RunConfig:
    cfg = read_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {
        "manifold": args.manifold, "n": args.n, "m": args.m, "r": args.r,
        "eps": args.eps, "lambda": args.lam, "seed": args.seed, "kappa": args.kappa,
    }
    for key in ("rule", "alpha_factor", "alpha_kappa", "max_iter", "out"):
        overrides[key] = getattr(args, key, None)
    return validate_config(update_config(cfg, overrides))


def instance_from_config(cfg: RunConfig, seed: int | None = None) -> FeasibilityInstance:
    return generate(cfg.manifold, seed=cfg.seed if seed is None else seed,
                    **cfg.instance_params())


def make_rule(inst: FeasibilityInstance, rule: str, alpha_factor: float = 1.9999,
              alpha_kappa: float | None = None):
    """Exogenous 1/(k+1), or Polyak with alpha = factor tanh(x)/x, x = sqrt|k| d(p0, q).

    On the sphere ``alpha_kappa`` defaults to -1, the conservative choice used
    in the sphere experiment; on SPD it defaults to the manifold bound.
    """
    man = inst.manifold
    if rule == "exogenous":
        return Exogenous()
    if rule == "polyak":
        if alpha_kappa is None:
            alpha_kappa = -1.0 if man.kind == "sphere" else man.kappa
        d_hat = man.dist(inst.p0, inst.q)
        return Polyak.from_factor(alpha_factor, d_hat, kappa=man.kappa,
                                  alpha_kappa=alpha_kappa, f_star=-inst.eps)
    raise ValueError(f"unknown rule {rule!r}")


def run_instance(inst: FeasibilityInstance, rule: str = "exogenous",
                 alpha_factor: float = 1.9999, alpha_kappa: float | None = None,
                 max_iter: int = 1000):
    """Solve a feasibility instance; returns the trace and its CSV footer metadata."""
    step_rule = make_rule(inst, rule, alpha_factor, alpha_kappa)
    config = SolverConfig(max_iterations=max_iter, stop_mode="feasibility",
                          seed=inst.seed, reference=inst.q)
    trace = run(inst.manifold, inst.oracle(), inst.p0, step_rule, config)
    meta = {
        "rule": rule,
        "manifold": inst.manifold.kind,
        "seed": inst.seed,
        "kappa": inst.manifold.kappa,
        "tau": 1.0,
        "f_star": -inst.eps,
    }
    if isinstance(step_rule, Exogenous):
        meta["sigma"] = step_rule.sigma
    else:
        meta["alpha"] = step_rule.alpha
    return trace, meta


# ------------------------------------------------------------------ commands

def cmd_generate(args) -> int:
    cfg = build_config(args)
    out = args.out or cfg.out
    if not out:
        raise ConfigError("out", "an output path is required")
    write_instance(out, instance_from_config(cfg))
    return 0


def _run_one(job):
    inst, rule, factor, akappa, max_iter, out = job
    trace, meta = run_instance(inst, rule, factor, akappa, max_iter)
    write_trace(out, trace, meta)
    return out, trace.iterations, trace.reason


def parse_seeds(text: str) -> list[int]:
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def cmd_run(args) -> int:
    cfg = build_config(args)
    out = args.out or cfg.out
    if not out:
        raise ConfigError("out", "an output path is required")
    if args.instance:
        if args.seeds:
            raise ConfigError("seeds", "cannot be combined with --instance")
        instances = [read_instance(args.instance)]
        # the instance file decides the manifold; fall back to its default rule
        rule = args.rule or ("polyak" if instances[0].manifold.kind == "sphere" else "exogenous")
    else:
        try:
            seeds = parse_seeds(args.seeds) if args.seeds else [cfg.seed]
        except ValueError:
            raise ConfigError("seeds", f"cannot parse {args.seeds!r}") from None
        if len(seeds) > 1 and "{seed}" not in out:
            raise ConfigError("out", "must contain '{seed}' when running several seeds")
        instances = [instance_from_config(cfg, s) for s in seeds]
        rule = cfg.step_rule
    jobs = [(inst, rule, cfg.alpha_factor, cfg.alpha_kappa, cfg.max_iter,
             out.replace("{seed}", str(inst.seed))) for inst in instances]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    for path, iters, reason in results:
        print(f"{path}: {iters} iterations, {reason}")
    return 0


def cmd_certify(args) -> int:
    trace, meta = read_trace(args.trace)

    def pick(flag, key, default=None):
        if flag is not None:
            return flag
        if key in meta:
            return parse_float(meta[key])
        return default

    theorem = args.theorem or DEFAULT_THEOREM.get(meta.get("rule", ""))
    if theorem is None:
        raise ConfigError("theorem", "not given and the trace does not name its step rule")
    kappa = pick(args.kappa, "kappa")
    if kappa is None:
        raise ConfigError("kappa", "not given and missing from the trace footer")
    constants = CurvatureConstants(
        kappa=kappa,
        tau=pick(args.tau, "tau", 1.0),
        sigma=pick(args.sigma, "sigma", BASEL_SIGMA if meta.get("rule") == "exogenous" else None),
        alpha=pick(args.alpha, "alpha"),
    )
    try:
        report = certify_trace(trace, theorem, constants)
    except ValueError as exc:
        raise ConfigError("trace", str(exc)) from None
    if args.out:
        write_report(args.out, report)
    if report.ok:
        print(f"{theorem}: OK ({len(report)} rows, min margin {report.min_margin:.6g})")
        return 0
    print(f"{theorem}: VIOLATED at N={report.first_violation} "
          f"(min margin {report.min_margin:.6g})")
    return 1


def cmd_plot(args) -> int:
    report = read_report(args.report)
    if len(report) == 0:
        raise ConfigError("report", "empty report")
    write_svg(args.out, report, args.title)
    return 0


# -------------------------------------------------------------------- parser

def _add_instance_flags(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--manifold", choices=["spd", "sphere"])
    p.add_argument("--n")
    p.add_argument("--m")
    p.add_argument("--r")
    p.add_argument("--eps")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--seed")
    p.add_argument("--kappa")
    p.add_argument("--out")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsubgrad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a feasibility instance file")
    _add_instance_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run the subgradient method and write a trace CSV")
    _add_instance_flags(p)
    p.add_argument("--instance", help="instance file written by 'generate'")
    p.add_argument("--rule", choices=["exogenous", "polyak"])
    p.add_argument("--alpha-factor", dest="alpha_factor")
    p.add_argument("--alpha-kappa", dest="alpha_kappa")
    p.add_argument("--max-iter", dest="max_iter")
    p.add_argument("--seeds", help="e.g. '0-19' or '1,5,7'; --out must contain {seed}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("certify", help="check a trace against a complexity bound")
    p.add_argument("trace")
    p.add_argument("--theorem", choices=THEOREMS)
    p.add_argument("--kappa", type=parse_float)
    p.add_argument("--sigma", type=parse_float)
    p.add_argument("--alpha", type=parse_float)
    p.add_argument("--tau", type=parse_float)
    p.add_argument("--out", help="report CSV path")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("plot", help="render a report CSV as SVG")
    p.add_argument("report")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"rsubgrad {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ValueError, OSError) as exc:
        print(f"rsubgrad {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
