"""Command-line front end.

Every subcommand writes one JSON report (stdout or ``--out``), optionally a
text table (``--text``) and figures (``--plot DIR``).  Exit codes: 0 when every
assertion holds, 1 on an assertion failure (the report lists the failures),
2 on configuration or guard errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema

from . import acceptance
from .abgroups import format_group, parse_group
from .category import GuardError, Skeleton, SkeletonSpec, build_skeleton, reduce_mod
from .expr import ExprError, parse_functor

TASKS = ("sdim", "pol", "koszul", "degree", "trunc", "ext", "compare", "excl", "dold", "verify-all")
SKELETON_TASKS = {"degree", "trunc", "ext", "compare", "dold"}


class ConfigError(ValueError):
    pass


@dataclass
class Report:
    result: dict
    assertions: dict = field(default_factory=dict)
    skeleton: dict | None = None
    guard_exceeded: bool = False
    plots: Callable[[Path], list[str]] | None = None


@dataclass
class RunConfig:
    task: str
    skeleton: dict | None = None
    params: dict = field(default_factory=dict)
    output: str | None = None
    jobs: int = 1
    seed: int = 0

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        try:
            jsonschema.validate(data, config_schema())
        except jsonschema.ValidationError as e:
            raise ConfigError(f"invalid config: {e.message}") from None
        return cls(
            data["task"],
            data.get("skeleton"),
            dict(data.get("params", {})),
            data.get("output"),
            data.get("jobs", 1),
            data.get("seed", 0),
        )

    def to_json(self) -> dict:
        out = {"task": self.task, "params": self.params, "output": self.output, "jobs": self.jobs, "seed": self.seed}
        if self.skeleton is not None:
            out["skeleton"] = self.skeleton
        return out


def config_schema() -> dict:
    text = resources.files("functorlab").joinpath("schema/run_config.schema.json").read_text()
    return json.loads(text)


# --- helpers ---------------------------------------------------------------------------


def _skeleton(args) -> Skeleton:
    gens = [g.strip() for g in args.gens.split(",") if g.strip()]
    if not gens:
        raise ConfigError("--gens needs at least one group")
    first = parse_group(gens[0], args.p)
    data = {"p": first.p, "generators": gens, "K": args.K, "mod": args.mod}
    return build_skeleton(SkeletonSpec.from_json(data))


def _functor(skel: Skeleton, text: str):
    try:
        return parse_functor(skel, text)
    except ExprError as e:
        raise ConfigError(f"cannot parse functor {text!r}: {e}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


# --- tasks -------------------------------------------------------------------------------


def task_sdim(args) -> Report:
    from .groupalg import caps_of, monomial_count, s_graded_dims

    V = parse_group(args.group, args.p)
    dims = s_graded_dims(V, args.dmax)
    mons = [monomial_count(V, d) for d in range(args.dmax + 1)]
    result = {"group": format_group(V), "p": V.p, "dims": dims, "monomial_counts": mons, "caps": list(caps_of(V))}

    def plots(d: Path):
        from .plots import bars

        return [bars(d / "sdim.png", range(args.dmax + 1), {"dim S^d": dims}, f"graded dims for {format_group(V)}")]

    return Report(result, {"matches_monomial_model": dims == mons}, plots=plots)


def task_pol(args) -> Report:
    from .groupalg import pol_space, pol_stationarity_check

    V = parse_group(args.group, args.p)
    dims = [pol_space(V, d).shape[1] for d in range(args.dmax + 1)]
    result = {"group": format_group(V), "p": V.p, "dims": dims}
    checks = {}
    if args.quotient is not None:
        for d in range(args.dmax + 1):
            if V.p**args.quotient > d:
                checks[str(d)] = pol_stationarity_check(V, d, args.quotient)
        result["quotient_exponent"] = args.quotient
        result["pulled_back_equal"] = checks

    def plots(d: Path):
        from .plots import bars

        return [bars(d / "pol.png", range(args.dmax + 1), {"dim Pol_d": dims}, f"Pol_d({format_group(V)})")]

    return Report(result, {"stationary": all(checks.values())} if checks else {}, plots=plots)


def task_koszul(args) -> Report:
    import numpy as np

    from .koszul import verify_vanishing

    V = parse_group(args.group, args.p)
    if V.free:
        raise ConfigError("the Koszul grid needs a torsion group")
    rep = verify_vanishing(V, args.nmax)
    table = {f"{n},{i}": h for (n, i), h in sorted(rep.table.items())}
    result = {
        "group": format_group(V),
        "p": V.p,
        "nmax": args.nmax,
        "bound": V.p**V.exponent,
        "table": table,
        "violations": [list(v) for v in rep.violations],
    }

    def plots(d: Path):
        from .plots import heatmap

        grid = np.zeros((args.nmax + 1, args.nmax + 1), dtype=int)
        for (n, i), h in rep.table.items():
            grid[n, i] = h
        return [heatmap(d / "koszul.png", grid, range(args.nmax + 1), range(args.nmax + 1), f"H_i(n)({format_group(V)})", "i", "n")]

    return Report(result, {"vanishing": rep.ok}, plots=plots)


def task_degree(args) -> Report:
    from .polynomial import poly_degree

    skel = _skeleton(args)
    F = _functor(skel, args.functor)
    rep = poly_degree(F, args.dmax)
    result = {"F": F.label, "dims": F.dims(), **rep.to_json()}
    return Report(result, {}, skel.describe(), rep.guard_exceeded)


def task_trunc(args) -> Report:
    from .polynomial import graded_piece_dims, p_trunc, q_trunc

    skel = _skeleton(args)
    F = _functor(skel, args.functor)
    tr = (q_trunc if args.side == "q" else p_trunc)(F, args.d)
    dims = tr.functor.dims()
    result = {"F": F.label, "side": args.side, "d": args.d, "dims": dims, "F_dims": F.dims(), "guard_exceeded": False}
    if args.side == "q" and args.d >= 1:
        result["graded_piece_dims"] = {skel.name(a): v for a, v in graded_piece_dims(F, args.d).items()}

    def plots(d: Path):
        from .plots import bars

        names = list(dims)
        return [bars(d / "trunc.png", names, {F.label: list(F.dims().values()), tr.functor.label: list(dims.values())}, "dimensions by object")]

    return Report(result, {}, skel.describe(), plots=plots)


def task_ext(args) -> Report:
    from .homological import exploratory_mod_sweep, ext

    skel = _skeleton(args)
    if args.exploratory:
        ts = _int_list(args.mod_ts)
        sweep = exploratory_mod_sweep(
            skel.spec, lambda s: (_functor(s, args.F), _functor(s, args.G)), ts, args.imax
        )
        result = {
            "F": args.F,
            "G": args.G,
            "exploratory": True,
            "acceptance": False,
            "note": "finite probe on hom groups reduced mod p^t; no colimit claim",
            "sweep": {str(t): dims for t, dims in sweep.items()},
            "skeletons": {str(t): reduce_mod(skel.spec, t).to_json() for t in ts},
        }
        return Report(result, {}, skel.describe())
    F, G = _functor(skel, args.F), _functor(skel, args.G)
    tab = ext(F, G, args.imax, d=args.d)
    result = tab.to_json()

    def plots(d: Path):
        from .plots import bars

        return [bars(d / "ext.png", range(len(tab.dims)), {tab.mode: tab.dims}, f"Ext^i({F.label}, {G.label})")]

    return Report(result, {}, skel.describe(), plots=plots)


def _compare_one(payload):
    args, K = payload
    from .homological import comparison

    ns = argparse.Namespace(**{**vars(args), "K": K})
    skel = _skeleton(ns)
    F, G = _functor(skel, args.F), _functor(skel, args.G)
    try:
        cm = comparison(F, G, args.d, args.imax, check_lifts=args.check_lifts)
    except GuardError as e:
        return K, skel.describe(), {"guard_error": str(e)}
    return K, skel.describe(), cm.to_json()


def _comparison_ok(cm: dict) -> bool:
    ok = all(cm["iso"][:2])
    if len(cm["mono"]) > 2:
        ok = ok and cm["mono"][2]
    return ok and cm["lifts_agree"] is not False


def task_compare(args) -> Report:
    Ks = _int_list(args.sweep) if args.sweep else [args.K]
    payloads = [(args, K) for K in Ks]
    if args.jobs > 1 and len(Ks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_compare_one, payloads))
    else:
        rows = [_compare_one(p) for p in payloads]
    guarded = {str(K): cm["guard_error"] for K, _, cm in rows if "guard_error" in cm}
    if len(guarded) == len(rows):
        raise GuardError("; ".join(f"K={K}: {msg}" for K, msg in guarded.items()))
    rows = [r for r in rows if "guard_error" not in r[2]]
    per_k = {}
    for K, desc, cm in rows:
        per_k[str(K)] = {
            "dims": {"poly": cm["dims_poly"], "full": cm["dims_full"]},
            "comparison": {"iso_upto": cm["iso_upto"], "mono_at": cm["mono_at"], **cm},
            "skeleton": desc,
        }
    last = per_k[str(Ks[-1])]
    result = {"F": args.F, "G": args.G, "d": args.d, "truncated": True, **last}
    if len(Ks) > 1:
        result["sweep"] = per_k
    if guarded:
        result["guard_exceeded"] = True
        result["guard_errors"] = guarded
    asserts = {f"K={K}: iso in degrees <= 1, mono in degree 2": _comparison_ok(cm) for K, _, cm in rows}

    def plots(d: Path):
        from .plots import bars

        out = []
        for K, _, cm in rows:
            n = len(cm["dims_poly"])
            out.append(
                bars(
                    d / f"compare_K{K}.png",
                    range(n),
                    {"poly": cm["dims_poly"], "full": cm["dims_full"], "image rank": cm["ranks"]},
                    f"comparison, K={K}",
                )
            )
        return out

    return Report(result, asserts, last["skeleton"], plots=plots)


def task_excl(args) -> Report:
    from .homological import excl_class_check, excl_dims

    chk = excl_class_check(args.p, args.K)
    chk["ext_full_dims_by_K"] = {str(k): v for k, v in excl_dims(args.p, _int_list(args.dims_K)).items()}
    asserts = {
        "sequence_exact": chk["sequence_exact"],
        "class_nonzero_full": chk["class_nonzero_full"],
        "poly_below_p_vanishes": all(v == 0 for v in chk["ext2_poly_below_p"].values()),
        "class_in_image_from_poly": chk["class_in_image_from_poly"],
        "split_class_zero": chk["split_class_zero"],
    }
    return Report(chk, asserts, chk["skeleton"])


def task_dold(args) -> Report:
    from .doldpuppe import dold_report

    skel = _skeleton(args)
    F = _functor(skel, args.functor)
    rep = dold_report(F, args.n, args.imax)
    asserts = {}
    for name, e in rep["objects"].items():
        if e["i_max"] >= 1:
            asserts[f"{name}: H_0 is q_n"] = e["h0_is_q"]
            asserts[f"{name}: H^0 is p_n"] = e["h0_dual_is_p"]
            asserts[f"{name}: simplicial identities"] = e["simplicial"]
    rep["guard_exceeded"] = any(e["guard_limited"] for e in rep["objects"].values())

    def plots(d: Path):
        import numpy as np

        from .plots import heatmap

        names = [n for n, e in rep["objects"].items() if e["i_max"] >= 1]
        if not names:
            return []
        grid = np.zeros((len(names), args.imax + 1), dtype=int)
        for r, n in enumerate(names):
            for i, v in enumerate(rep["objects"][n]["dims"]):
                grid[r, i] = v
        return [heatmap(d / "dold_terms.png", grid, names, range(args.imax + 1), f"term dims, n={args.n}", "i", "object")]

    return Report(rep, asserts, skel.describe(), plots=plots)


def _run_criterion(payload):
    number, seed = payload
    return acceptance.run_criterion(number, seed)


def task_verify_all(args) -> Report:
    numbers = _int_list(args.only) if args.only else sorted(acceptance.criteria())
    unknown = [n for n in numbers if n not in acceptance.criteria()]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}")
    payloads = [(n, args.seed) for n in numbers]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_criterion, payloads))
    else:
        results = []
        for p in payloads:
            results.append(_run_criterion(p))
            print(results[-1].line(), file=sys.stderr, flush=True)
    result = {"seed": args.seed, "criteria": [r.to_json() for r in results]}
    asserts = {f"criterion {r.number}: {r.name}": r.passed for r in results}

    def plots(d: Path):
        from .plots import outcome_bars

        return [outcome_bars(d / "verify_all.png", [r.number for r in results], [r.seconds for r in results], [r.passed for r in results], "acceptance criteria")]

    return Report(result, asserts, plots=plots)


HANDLERS: dict[str, Callable] = {
    "sdim": task_sdim,
    "pol": task_pol,
    "koszul": task_koszul,
    "degree": task_degree,
    "trunc": task_trunc,
    "ext": task_ext,
    "compare": task_compare,
    "excl": task_excl,
    "dold": task_dold,
    "verify-all": task_verify_all,
}


# --- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--text", action="store_true", help="also print a plain-text table to stderr")
    common.add_argument("--plot", metavar="DIR", help="render figures into DIR")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled (F,G) pairs")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for grid cells")

    skel = argparse.ArgumentParser(add_help=False)
    skel.add_argument("--gens", default="Z/2", help='comma-separated generators, e.g. "Z/2" or "Z/2,Z/4"')
    skel.add_argument("--K", type=int, default=3, help="bound on summand multiplicities")
    skel.add_argument("--p", type=int, default=None)
    skel.add_argument("--mod", type=int, default=None, help="reduce hom groups mod p^t")

    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("--group", required=True, help='e.g. "Z/2 + Z/8"')
    group.add_argument("--p", type=int, default=None)

    ap = argparse.ArgumentParser(prog="functorlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="task", required=True)

    s = sub.add_parser("sdim", parents=[common, group], help="graded dims of the augmentation filtration")
    s.add_argument("--dmax", type=int, default=10)

    s = sub.add_parser("pol", parents=[common, group], help="polynomial maps of degree <= d")
    s.add_argument("--dmax", type=int, default=4)
    s.add_argument("--quotient", type=int, default=None, metavar="I", help="compare with V/p^I")

    s = sub.add_parser("koszul", parents=[common, group], help="Koszul homology grid")
    s.add_argument("--nmax", type=int, default=8)

    s = sub.add_parser("degree", parents=[common, skel], help="operational polynomial degree")
    s.add_argument("--functor", required=True)
    s.add_argument("--dmax", type=int, default=3)

    s = sub.add_parser("trunc", parents=[common, skel], help="polynomial quotient q_d or subfunctor p_d")
    s.add_argument("--functor", required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--side", choices=("q", "p"), default="q")

    s = sub.add_parser("ext", parents=[common, skel], help="Ext groups in the truncated category")
    s.add_argument("--F", required=True)
    s.add_argument("--G", required=True)
    s.add_argument("--imax", type=int, default=3)
    s.add_argument("--d", type=int, default=None, help="compute in the degree <= d subcategory")
    s.add_argument("--exploratory", action="store_true", help="finite mod-p^t probe, no acceptance status")
    s.add_argument("--mod-ts", default="1,2", help="reductions for --exploratory")

    s = sub.add_parser("compare", parents=[common, skel], help="poly(d) to full comparison maps")
    s.add_argument("--F", required=True)
    s.add_argument("--G", required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--imax", type=int, default=2)
    s.add_argument("--sweep", default=None, metavar="K1,K2,...", help="repeat across skeleton bounds")
    s.add_argument("--check-lifts", action="store_true", help="recompute with a second chain-map lift")

    s = sub.add_parser("excl", parents=[common], help="Frobenius, norm and Verschiebung extension class")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--dims-K", default="2,3", help="skeleton bounds for the Ext^2 dimension report")

    s = sub.add_parser("dold", parents=[common, skel], help="stabilization complexes")
    s.add_argument("--functor", required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--imax", type=int, default=2)

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance grid")
    s.add_argument("--only", default=None, help="comma-separated criterion numbers")

    s = sub.add_parser("run", help="run a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--text", action="store_true")
    s.add_argument("--plot", metavar="DIR")
    return ap


def args_from_config(cfg: RunConfig) -> argparse.Namespace:
    """Namespace for ``cfg.task`` built from parser defaults, the skeleton and the params."""
    ap = build_parser()
    argv = [cfg.task]
    required = {"sdim": ["--group", "Z/2"], "pol": ["--group", "Z/2"], "koszul": ["--group", "Z/2"]}
    argv += required.get(cfg.task, [])
    for flag in ("functor", "F", "G"):
        if cfg.task in SKELETON_TASKS and flag in cfg.params:
            argv += [f"--{flag}", str(cfg.params[flag])]
    if cfg.task in ("trunc", "compare"):
        argv += ["--d", str(cfg.params.get("d", 1))]
    try:
        args = ap.parse_args(argv)
    except SystemExit:
        raise ConfigError(f"config for {cfg.task!r} is missing required parameters") from None
    known = set(vars(args))
    for key, value in cfg.params.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ConfigError(f"unknown parameter {key!r} for task {cfg.task!r}")
        setattr(args, dest, value)
    if cfg.skeleton is not None:
        if cfg.task not in SKELETON_TASKS:
            raise ConfigError(f"task {cfg.task!r} takes no skeleton")
        args.gens = ",".join(cfg.skeleton["generators"])
        args.K = cfg.skeleton["K"]
        args.p = cfg.skeleton.get("p")
        args.mod = cfg.skeleton.get("mod")
    args.out = cfg.output
    args.jobs = cfg.jobs
    args.seed = cfg.seed
    return args


def load_config(path: str) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return RunConfig.from_json(data)


# --- output -------------------------------------------------------------------------------


def _envelope(task: str, args, rep: Report | None, error: str | None = None, guard: bool = False) -> dict:
    out = {
        "task": task,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": getattr(args, "seed", 0),
    }
    if rep is not None:
        failures = sorted(k for k, v in rep.assertions.items() if not v)
        out.update(
            skeleton=rep.skeleton,
            guard_exceeded=bool(rep.guard_exceeded or rep.result.get("guard_exceeded", False)),
            result=rep.result,
            assertions=rep.assertions,
            failures=failures,
            ok=not failures,
        )
    else:
        out.update(error=error, guard_exceeded=guard, ok=False)
    return out


def _text_table(doc: dict) -> str:
    lines = [f"task: {doc['task']}"]
    if doc.get("skeleton"):
        s = doc["skeleton"]
        lines.append(f"skeleton: gens={s.get('generators')} K={s.get('K')} p={s.get('p')}")
    lines.append(f"guard_exceeded: {doc.get('guard_exceeded')}")
    if "error" in doc:
        lines.append(f"error: {doc['error']}")
    res = doc.get("result", {})
    for key, val in res.items():
        if isinstance(val, (int, str, bool, float, list)) and len(str(val)) < 100:
            lines.append(f"  {key:<24} {val}")
    for name, ok in doc.get("assertions", {}).items():
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return "\n".join(lines)


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if getattr(args, "out", None):
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if getattr(args, "text", False):
        print(_text_table(doc), file=sys.stderr)


def execute(task: str, args) -> int:
    t0 = time.perf_counter()
    try:
        rep = HANDLERS[task](args)
    except GuardError as e:
        _emit(_envelope(task, args, None, str(e), guard=True), args)
        return 2
    except (ConfigError, ValueError) as e:
        _emit(_envelope(task, args, None, str(e)), args)
        return 2
    doc = _envelope(task, args, rep)
    doc["seconds"] = round(time.perf_counter() - t0, 3)
    plot_dir = getattr(args, "plot", None)
    if plot_dir and rep.plots is not None:
        doc["figures"] = rep.plots(Path(plot_dir))
    _emit(doc, args)
    if doc["failures"]:
        print("assertion failures:\n  " + "\n  ".join(doc["failures"]), file=sys.stderr)
        return 1
    if doc["guard_exceeded"] and task in ("degree", "compare"):
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.task == "run":
        try:
            cfg = load_config(args.config)
            run_args = args_from_config(cfg)
        except ConfigError as e:
            doc = {"task": "run", "error": str(e), "ok": False, "guard_exceeded": False,
                   "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
            print(json.dumps(doc, indent=2, sort_keys=True))
            return 2
        run_args.text = args.text
        run_args.plot = args.plot
        return execute(cfg.task, run_args)
    return execute(args.task, args)


if __name__ == "__main__":
    sys.exit(main())
