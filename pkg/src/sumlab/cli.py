"""Reproducible experiment driver: one subcommandish --experiment per operation.

Config comes from --config JSON plus --param overrides; unknown keys are
rejected.  Randomized experiments require --seed, trials fan out over a
thread pool but always land in trial order, and certificates serialize to
canonical JSON so reruns diff byte-for-byte.  Exit code 0 iff every
certificate passed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .completeness import (
    SequencePrefix,
    eps_necessary_check,
    gen_F,
    gen_friendly,
    graham_complete_test,
    parse_polynomial,
    prefix_completeness_window,
)
from .core import ElementSet, IntervalWitness, find_homog_progression, longest_interval, subset_sums
from .extremal import HomogCertificate, exact_H, exact_g, exact_h, g_constructions, homog_pipeline
from .mono import Coloring, build_avoiding_coloring, exact_f, find_y, verify_coloring
from .numtheory import R_nm, euler_phi, rho_nm, s_formula, snd, tau
from .ramsey import (
    adversary_coloring,
    concat_prefix,
    iterated_growth_check,
    poly_block,
    sample_block,
    verify_subsequences,
)
from .report import Certificate, canonical, canonical_dumps
from .rng import substream
from .structure import NiceParams, diverse_decompose, is_k_diverse, nice_decompose, phase_process

__all__ = ["main", "run", "emit", "EXPERIMENTS"]


def _as_fraction(v) -> Fraction:
    return Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**9)


def _as_elements(v) -> ElementSet:
    """Accept a JSON list, an inline 'range:lo:hi[:step]', or a file path."""
    if isinstance(v, (list, tuple)):
        return ElementSet.of(int(x) for x in v)
    if isinstance(v, str) and v.startswith("range:"):
        parts = [int(x) for x in v.split(":")[1:]]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return ElementSet.of(range(lo, hi + 1, step))
    if isinstance(v, str):
        return ElementSet.parse(Path(v).read_text())
    raise ValueError(f"cannot interpret element set: {v!r}")


def _as_terms(v) -> tuple[int, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(int(x) for x in v)
    if isinstance(v, str) and v.startswith("powers:"):
        _, base, count = v.split(":")
        return tuple(int(base) ** k for k in range(int(count)))
    if isinstance(v, str) and v.startswith("linear:"):
        return tuple(range(1, int(v.split(":")[1]) + 1))
    if isinstance(v, str) and v.startswith("geometric:"):
        _, base, count = v.split(":")
        return tuple(int(base) ** k for k in range(1, int(count) + 1))
    if isinstance(v, str):
        return tuple(ElementSet.parse(Path(v).read_text(), multiset=True).elements)
    raise ValueError(f"cannot interpret sequence: {v!r}")


@dataclass(frozen=True)
class Experiment:
    name: str
    params: dict  # name -> (caster, default); default "REQUIRED" marks mandatory
    randomized: bool
    fn: object  # (params: dict, seed: int | None) -> (list[Certificate], dict)


REQUIRED = object()
EXPERIMENTS: dict[str, Experiment] = {}


def _experiment(name: str, params: dict, randomized: bool = False):
    def wrap(fn):
        EXPERIMENTS[name] = Experiment(name=name, params=params, randomized=randomized, fn=fn)
        return fn

    return wrap


def _cert(claim, passed, params, detail=None, **kw) -> Certificate:
    return Certificate(claim=claim, passed=passed, params=params, detail=detail or {}, **kw)


@_experiment("sums", {"input": (_as_elements, REQUIRED), "cap": (int, None)})
def _run_sums(p, seed):
    A = p["input"]
    mask = subset_sums(A, cap=p["cap"])
    run = longest_interval(mask)
    detail = {
        "count": mask.count(),
        "total": A.total(),
        "longest_interval": [run.start, run.length],
        "mask": mask.to_json_dict(),
    }
    return [_cert("subset-sums", True, {"n_elements": len(A), "cap": mask.cap}, detail)], detail


@_experiment(
    "interval",
    {"input": (_as_elements, REQUIRED), "cap": (int, None), "min_len": (int, 2)},
)
def _run_interval(p, seed):
    A = p["input"]
    mask = subset_sums(A, cap=p["cap"])
    run = longest_interval(mask)
    prog = find_homog_progression(mask, p["min_len"])
    detail = {
        "longest_interval": [run.start, run.length],
        "progression": None if prog is None else [prog.first, prog.diff, prog.count],
    }
    return [_cert("longest-interval", True, {"n_elements": len(A)}, detail)], detail


@_experiment(
    "homog",
    {"input": (_as_elements, REQUIRED), "n": (int, REQUIRED), "k_factor": (int, 8)},
)
def _run_homog(p, seed):
    result = homog_pipeline(p["input"], p["n"], k_factor=p["k_factor"])
    if isinstance(result, HomogCertificate):
        ok = result.validate()
        detail = {
            "d": result.d,
            "k": result.k,
            "interval": [result.interval.start, result.interval.length],
            "progression": [result.progression.first, result.progression.diff, result.progression.count],
        }
        certs = [_cert("homog-progression", ok, {"n": p["n"], "k_factor": p["k_factor"]}, detail)]
    else:
        detail = {"status": result.reason, "d": result.d, "best": [result.best.start, result.best.length]}
        certs = [_cert("homog-progression", False, {"n": p["n"], "k_factor": p["k_factor"]}, detail)]
    return certs, detail


@_experiment(
    "coloring-build",
    {"n": (int, REQUIRED), "m": (int, REQUIRED), "r": (int, None), "d": (int, None), "kappa": (float, 1.0)},
)
def _run_coloring_build(p, seed):
    coloring = build_avoiding_coloring(p["n"], p["m"], r_override=p["r"], d_override=p["d"], kappa=p["kappa"])
    cert = verify_coloring(coloring)
    detail = {"coloring": coloring.to_json_dict(), "colors": coloring.color_count}
    return [cert], detail


@_experiment("coloring-verify", {"input": (str, REQUIRED)})
def _run_coloring_verify(p, seed):
    data = json.loads(Path(p["input"]).read_text())
    coloring = Coloring.from_json_dict(data)
    cert = verify_coloring(coloring)
    return [cert], {"colors": coloring.color_count}


@_experiment("f-exact", {"n": (int, REQUIRED), "m": (int, REQUIRED), "r_max": (int, 12)})
def _run_f_exact(p, seed):
    value = exact_f(p["n"], p["m"], r_max=p["r_max"])
    detail = {"value": value if value is not None else f"> {p['r_max']}"}
    return [_cert("f-exact", value is not None, {"n": p["n"], "m": p["m"]}, detail)], detail


@_experiment("g-exact", {"n": (int, REQUIRED), "m": (int, REQUIRED)})
def _run_g_exact(p, seed):
    value, witness = exact_g(p["n"], p["m"])
    detail = {"value": value, "witness": list(witness)}
    return [_cert("g-exact", True, {"n": p["n"], "m": p["m"]}, detail)], detail


@_experiment("g-constructions", {"n": (int, REQUIRED), "m": (int, REQUIRED)})
def _run_g_constructions(p, seed):
    cons = g_constructions(p["n"], p["m"])
    certs = [
        _cert(
            f"g-construction-{c.name}",
            c.verified or not c.elements,
            {"n": p["n"], "m": p["m"]},
            {"size": c.size, "elements": list(c.elements), "reason": c.reason},
        )
        for c in cons
    ]
    return certs, {"sizes": {c.name: c.size for c in cons}}


@_experiment("H-exact", {"n": (int, REQUIRED)})
def _run_H_exact(p, seed):
    value, witness = exact_H(p["n"])
    detail = {"value": value, "witness": None if witness is None else [list(w) for w in witness]}
    return [_cert("H-exact", True, {"n": p["n"]}, detail)], detail


@_experiment("h-exact", {"n": (int, REQUIRED)})
def _run_h_exact(p, seed):
    value, witness = exact_h(p["n"])
    detail = {"value": value, "witness": list(witness)}
    if p["n"] <= 12:
        H, _ = exact_H(p["n"])
        detail["H"] = H
        detail["straus_ok"] = value <= 2 * H + 2
    return [_cert("h-exact", detail.get("straus_ok", True), {"n": p["n"]}, detail)], detail


@_experiment(
    "ramsey-sample",
    {"x": (int, REQUIRED), "eps": (_as_fraction, Fraction(1, 2)), "C": (float, 2.0), "w": (float, None)},
    randomized=True,
)
def _run_ramsey_sample(p, seed):
    block = sample_block(p["x"], p["eps"], p["C"], w_override=p["w"], seed=seed)
    detail = {"block": block.to_json_dict(), "size": len(block.elements)}
    return [
        _cert(
            "ramsey-sample",
            True,
            {"x": p["x"], "eps": p["eps"], "C": p["C"]},
            detail,
            seed=seed,
            mode="sample",
        )
    ], detail


@_experiment(
    "ramsey-verify",
    {
        "x": (int, REQUIRED),
        "eps": (_as_fraction, Fraction(1, 2)),
        "C": (float, 2.0),
        "w": (float, None),
        "mode": (str, "auto"),
        "trials": (int, 10**4),
    },
    randomized=True,
)
def _run_ramsey_verify(p, seed):
    block = sample_block(p["x"], p["eps"], p["C"], w_override=p["w"], seed=seed)
    s = block.subsequence_size
    mode = p["mode"]
    if mode == "auto":
        mode = "exact" if math.comb(len(block.elements), s) <= 10**7 else "montecarlo"
    cert = verify_subsequences(block, s, block.target, mode=mode, trials=p["trials"], seed=seed)
    detail = {"block": block.to_json_dict(), "s": s, "mode": mode}
    return [cert], detail


@_experiment(
    "ramsey-concat",
    {"r": (int, REQUIRED), "x0": (int, REQUIRED), "blocks": (int, 3), "C": (float, 2.0)},
    randomized=True,
)
def _run_ramsey_concat(p, seed):
    result = concat_prefix(p["r"], p["x0"], p["blocks"], p["C"], seed=seed)
    detail = result.to_json_dict()
    cert = _cert(
        "ramsey-concat-overlap",
        result.overlap_ok,
        {"r": p["r"], "x0": p["x0"], "blocks": p["blocks"], "C": p["C"]},
        {"density": detail["density"]},
        seed=seed,
    )
    return [cert], detail


@_experiment(
    "ramsey-lower",
    {"sequence": (_as_terms, REQUIRED), "r": (int, 4), "j_max": (int, None), "gap": (float, 2.0)},
)
def _run_ramsey_lower(p, seed):
    seq = SequencePrefix(p["sequence"])
    result = adversary_coloring(seq, p["r"], j_max=p["j_max"], gap=p["gap"])
    detail = result.to_json_dict()
    missed_total = sum(len(v) for _, v in result.missed)
    cert = _cert(
        "ramsey-lower-adversary",
        result.status == "ok",
        {"r": p["r"], "gap": p["gap"]},
        {"status": result.status, "chosen": list(result.chosen), "missed_total": missed_total},
    )
    return [cert], detail


@_experiment("poly-complete", {"poly": (str, REQUIRED)})
def _run_poly_complete(p, seed):
    P = parse_polynomial(p["poly"])
    verdict = graham_complete_test(P)
    detail = {
        "complete": verdict.complete,
        "failing_condition": verdict.failing_condition,
        "L": verdict.L,
        "alphas": [str(a) for a in P.alphas],
    }
    return [_cert("poly-complete", True, {"poly": p["poly"]}, detail)], detail


@_experiment("birch-window", {"p": (int, 2), "q": (int, 3), "limit": (int, 10**4)})
def _run_birch(p, seed):
    terms = sorted(
        p["p"] ** a * p["q"] ** b
        for a in range(p["limit"].bit_length() + 1)
        for b in range(p["limit"].bit_length() + 1)
        if p["p"] ** a * p["q"] ** b <= p["limit"]
    )
    prefix = SequencePrefix(tuple(terms))
    lo, hi = prefix_completeness_window(prefix)
    total = sum(terms)
    detail = {"window": [lo, hi], "total": total, "terms": len(terms)}
    return [
        _cert("birch-window", (lo, hi) == (0, total), {"p": p["p"], "q": p["q"], "limit": p["limit"]}, detail)
    ], detail


@_experiment(
    "friendly",
    {"eps": (_as_fraction, REQUIRED), "initial": (_as_terms, REQUIRED), "N": (int, REQUIRED)},
)
def _run_friendly(p, seed):
    seq, report = gen_friendly(p["eps"], list(p["initial"]), p["N"])
    detail = {
        "terms_tail": list(seq.terms[-8:]),
        "best_C": report.best_C,
        "best_c": report.best_c,
        "strict_from": report.strict_from,
        "doubleclaim_from": report.doubleclaim_from,
    }
    return [_cert("friendly", True, {"eps": p["eps"], "N": p["N"]}, detail)], detail


@_experiment(
    "F-seq",
    {"eps": (_as_fraction, REQUIRED), "initial": (_as_terms, REQUIRED), "N": (int, REQUIRED)},
)
def _run_F(p, seed):
    seq = gen_F(p["eps"], list(p["initial"]), p["N"])
    detail = {
        "head": list(seq.terms[:8]),
        "growth_ratio": seq.params["growth_ratio"],
        "growth_target": seq.params["growth_target"],
    }
    return [_cert("F-seq", True, {"eps": p["eps"], "N": p["N"]}, detail)], detail


@_experiment(
    "eps-check",
    {"sequence": (_as_terms, REQUIRED), "eps": (_as_fraction, REQUIRED), "c_max": (int, 64)},
)
def _run_eps_check(p, seed):
    seq = SequencePrefix(p["sequence"])
    result = eps_necessary_check(seq, p["eps"], c_max=p["c_max"])
    detail = {
        "holds": result.holds,
        "best_C": result.best_C,
        "witness": result.witness,
        "certificate_ok": result.certificate_ok,
    }
    passed = result.holds or bool(result.certificate_ok)
    return [_cert("eps-necessary-check", passed, {"eps": p["eps"], "c_max": p["c_max"]}, detail)], detail


@_experiment(
    "phase",
    {"input": (_as_elements, REQUIRED), "b": (int, REQUIRED), "k_cap": (int, None)},
    randomized=True,
)
def _run_phase(p, seed):
    log = phase_process(p["input"], p["b"], k_cap=p["k_cap"], seed=seed)
    detail = log.to_json_dict()
    return [
        _cert(
            "phase-process",
            log.bound is None or len(log.final_residues) >= log.bound,
            {"b": p["b"]},
            {"phases": [s.phase for s in log.steps], "final_size": len(log.final_residues)},
            seed=seed,
        )
    ], detail


@_experiment(
    "nice",
    {
        "input": (_as_elements, REQUIRED),
        "n": (int, REQUIRED),
        "ell": (int, 1),
        "t1": (float, 0.0),
        "t2": (float, 1.0),
        "density": (float, 2.0),
    },
)
def _run_nice(p, seed):
    params = NiceParams(ell=p["ell"], t1=p["t1"], t2=p["t2"], density=p["density"])
    trace = nice_decompose(p["input"], p["n"], params)
    detail = {
        "status": trace.status,
        "divisor": trace.divisor,
        "ambient": trace.ambient,
        "final_size": len(trace.final),
        "steps": [[kind, d, len(removed)] for kind, d, removed in trace.steps],
    }
    return [_cert("nice-decompose", trace.status == "nice", {"n": p["n"]}, detail)], detail


@_experiment(
    "diverse",
    {"input": (_as_elements, REQUIRED), "k": (int, REQUIRED), "budget": (int, REQUIRED)},
)
def _run_diverse(p, seed):
    trace = diverse_decompose(p["input"], p["k"], p["budget"])
    report = is_k_diverse(trace.final, p["k"]) if len(trace.final) else None
    detail = {
        "status": trace.status,
        "divisor": trace.divisor,
        "final": list(trace.final.elements),
        "steps": [[v, list(removed)] for v, removed in trace.steps],
        "final_diverse": None if report is None else report.diverse,
    }
    return [_cert("diverse-decompose", trace.status == "diverse", {"k": p["k"]}, detail)], detail


@_experiment("numtheory-table", {"n": (int, REQUIRED), "m": (int, REQUIRED)})
def _run_numtheory(p, seed):
    n, m = p["n"], p["m"]
    rep = R_nm(n, m)
    detail = {
        "phi": euler_phi(m),
        "snd": snd(m),
        "s_formula": s_formula(n, m),
        "rho": rep.rho,
        "tau_rho_m": rep.tau_rho_m,
        "psi": rep.psi,
        "R": rep.R,
        "branch": rep.branch,
    }
    return [_cert("numtheory-table", True, {"n": n, "m": m}, detail)], detail


@_experiment(
    "growth-check",
    {
        "poly": (str, REQUIRED),
        "input": (_as_elements, REQUIRED),
        "m": (int, REQUIRED),
        "x_base": (int, None),
    },
)
def _run_growth(p, seed):
    P = parse_polynomial(p["poly"])
    result = iterated_growth_check(P, p["input"], p["m"], x_base=p["x_base"])
    detail = {
        "modulus": result.modulus,
        "count": result.count,
        "alpha": result.alpha,
        "exponent": result.exponent,
    }
    return [_cert("growth-check", True, {"poly": p["poly"], "m": p["m"]}, detail)], detail


@dataclass
class Report:
    config: dict
    certificates: list
    summary: list
    version: str
    wall_clock: float


def _resolve_params(exp: Experiment, raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key in ("experiment", "seed", "threads", "trials", "out", "format"):
            continue
        if key not in exp.params:
            raise ValueError(f"unknown parameter {key!r} for experiment {exp.name}")
    for key, (caster, default) in exp.params.items():
        if key in raw:
            value = raw[key]
            out[key] = caster(value) if value is not None else None
        elif default is REQUIRED:
            raise ValueError(f"experiment {exp.name} requires parameter {key!r}")
        else:
            out[key] = default
    return out


def run(config: dict) -> Report:
    """Dispatch one experiment config; collect certificates from all trials."""
    name = config.get("experiment")
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}")
    exp = EXPERIMENTS[name]
    seed = config.get("seed")
    if exp.randomized and seed is None:
        raise ValueError(f"experiment {name} is randomized: --seed is mandatory")
    trials = int(config.get("trials", 1))
    threads = int(config.get("threads", 1))
    params = _resolve_params(exp, config)
    t0 = time.monotonic()

    def one(trial: int):
        trial_seed = None
        if seed is not None:
            trial_seed = seed if trials == 1 else substream(seed, name, trial).getrandbits(63)
        return exp.fn(params, trial_seed)

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]
    certificates = []
    summary = []
    for trial, (certs, detail) in enumerate(results):
        certificates.extend(certs)
        row = {"trial": trial, "experiment": name}
        row.update(
            {
                k: v
                for k, v in detail.items()
                if isinstance(v, (int, float, str, bool, type(None), Fraction))
            }
        )
        row["pass"] = all(c.passed for c in certs)
        summary.append(row)
    return Report(
        config={k: canonical(v) for k, v in config.items()},
        certificates=certificates,
        summary=summary,
        version=__version__,
        wall_clock=time.monotonic() - t0,
    )


def emit(report: Report, out_dir: str | Path, fmt: str = "json") -> list[Path]:
    """Write certificates.json (canonical) plus report.json or summary.tsv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    certs_path = out / "certificates.json"
    certs_path.write_text(canonical_dumps([c.to_json_dict() for c in report.certificates]) + "\n")
    paths.append(certs_path)
    if fmt == "json":
        payload = {
            "config": report.config,
            "version": report.version,
            "certificates": [c.to_json_dict() for c in report.certificates],
            "summary": report.summary,
            "wall_clock": report.wall_clock,
        }
        path = out / "report.json"
        path.write_text(json.dumps(canonical(payload), sort_keys=True, indent=1) + "\n")
        paths.append(path)
    elif fmt == "tsv":
        keys: list[str] = []
        for row in report.summary:
            for k in row:
                if k not in keys:
                    keys.append(k)
        lines = ["\t".join(keys)]
        for row in report.summary:
            lines.append("\t".join(str(canonical(row.get(k, ""))) for k in keys))
        path = out / "summary.tsv"
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return paths


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        if "/" in text:
            try:
                return Fraction(text)
            except ValueError:
                pass
        return text


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sumlab", description=__doc__)
    parser.add_argument("--experiment", help=f"one of: {', '.join(sorted(EXPERIMENTS))}")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--trials", type=int, default=1)
    parser.add_argument("--out", default=None, help="output directory for report files")
    parser.add_argument("--param", action="append", default=[], help="key=value, repeatable")
    parser.add_argument("--config", default=None, help="JSON config file; flags override")
    parser.add_argument("--format", default="json", choices=["json", "tsv"])
    parser.add_argument("--list", action="store_true", help="list experiments and exit")
    args = parser.parse_args(argv)

    if args.list:
        for name in sorted(EXPERIMENTS):
            exp = EXPERIMENTS[name]
            keys = ", ".join(sorted(exp.params))
            print(f"{name}{' [seeded]' if exp.randomized else ''}: {keys}")
        return 0

    config = {}
    if args.config:
        config.update(json.loads(Path(args.config).read_text()))
    if args.experiment:
        config["experiment"] = args.experiment
    if args.seed is not None:
        config["seed"] = args.seed
    config.setdefault("threads", args.threads)
    config.setdefault("trials", args.trials)
    if args.threads != 1:
        config["threads"] = args.threads
    if args.trials != 1:
        config["trials"] = args.trials
    for kv in args.param:
        if "=" not in kv:
            parser.error(f"--param needs key=value, got {kv!r}")
        key, _, value = kv.partition("=")
        config[key] = _parse_value(value)

    try:
        report = run(config)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        emit(report, args.out, args.format)
    failures = [c for c in report.certificates if not c.passed]
    for row in report.summary:
        print(canonical_dumps(row))
    if failures:
        print(f"FAIL: {failures[0].claim}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
