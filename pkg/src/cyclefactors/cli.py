"""Batch command-line front end for the cycle-factor toolkit.

Subcommands
-----------
analyze     regularity summary of a hypergraph file
regsub      exact-regular spanning subgraph search
pfm         perfect fractional matchings (exact walk-shift, LP, or uniform)
walk        weighted tight-walk marginals, exact or sampled
absorbers   absorber enumeration with insertion checks
cover       fractional cycle decomposition extracted into path bundles
decompose   the full reserve/cover/pack pipeline emitting a manifest
verify      validate a factors artifact against its host

Every artifact embeds the fully resolved run configuration; identical
configuration and seed produce byte-identical artifacts (pass
``--normalize-timings`` to zero the only nondeterministic fields).

Exit codes: 0 success, 10 partial packing, 20 parse error, 21 parameter or
target error, 30 stage or verification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .absorbing import enumerate_absorbers, is_absorber_for
from .assemble import (
    AssembleError,
    AssembleParamError,
    Profile,
    pack_factors,
)
from .bruteforce import OracleError, reg_k, validate_packing, walk_distribution
from .cover import (
    CoverError,
    cycles_to_paths,
    extract_cycle_collections,
    fractional_cycle_decomposition,
)
from .fractional import (
    FractionalError,
    LPInfeasibleError,
    NotConnectedError,
    balancedness,
    build_walk_registry,
    pfm_lp,
    redistribute_pfm,
    sparsify_intersecting,
    uniform_weighting,
)
from .hypergraph import Hypergraph, HypergraphError, parse_hypergraph
from .tightpaths import TightnessError, factors_from_document
from .walks import OracleCapError, StuckWalkError, sample_walk

EXIT_OK = 0
EXIT_PARTIAL = 10
EXIT_PARSE = 20
EXIT_PARAMS = 21
EXIT_STAGE = 30


class CLIError(Exception):
    """Abort with a message and a specific exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    """The fully resolved configuration embedded in every artifact."""

    command: str
    input: Optional[str]
    seed: int
    profile: Profile
    options: dict
    normalize_timings: bool
    verbosity: int

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "input": self.input,
            "seed": self.seed,
            "profile": self.profile.as_dict(),
            "options": dict(sorted(self.options.items())),
            "normalize_timings": self.normalize_timings,
        }


def _parse_scalar(text: str, where: str):
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            pass
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise CLIError(EXIT_PARSE, f"{where}: cannot parse value {text!r}")


def load_profile(path: Optional[str], overrides: Sequence[str]) -> Profile:
    """Line-oriented key=value files with # comments, then flag overrides."""
    data: dict = {}
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise CLIError(EXIT_PARSE, f"cannot read profile {path}: {exc}")
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CLIError(
                    EXIT_PARSE,
                    f"{path} line {lineno}: expected key=value, got {raw.strip()!r}",
                )
            key, _, value = line.partition("=")
            data[key.strip()] = _parse_scalar(
                value.strip(), f"{path} line {lineno}"
            )
    for item in overrides:
        if "=" not in item:
            raise CLIError(EXIT_PARSE, f"--set {item!r}: expected key=value")
        key, _, value = item.partition("=")
        data[key.strip()] = _parse_scalar(value.strip(), f"--set {item!r}")
    try:
        return Profile.from_mapping(data)
    except AssembleParamError as exc:
        raise CLIError(EXIT_PARAMS, f"profile: {exc}")


def load_hypergraph(path: str) -> Hypergraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"cannot read {path}: {exc}")
    try:
        return parse_hypergraph(text)
    except HypergraphError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc}")


def parse_targets(text: str) -> list:
    """Factor shapes: cycle lengths joined by ',', factors joined by ';'."""
    factors = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        lengths = []
        for token in chunk.replace(",", " ").split():
            try:
                lengths.append(int(token))
            except ValueError:
                raise CLIError(
                    EXIT_PARAMS, f"targets: {token!r} is not a cycle length"
                )
        if lengths:
            factors.append(lengths)
    if not factors:
        raise CLIError(EXIT_PARAMS, f"targets: no factor shapes in {text!r}")
    return factors


def _rational(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def emit(doc: dict, output: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _say(config: RunConfig, message: str) -> None:
    if config.verbosity > 0:
        print(message)


def _make_config(args, command: str, **options) -> RunConfig:
    profile = load_profile(args.profile, args.set or [])
    return RunConfig(
        command=command,
        input=getattr(args, "input", None),
        seed=args.seed,
        profile=profile,
        options=options,
        normalize_timings=args.normalize_timings,
        verbosity=0 if args.quiet else 1,
    )


def _weighting_for(H: Hypergraph, mode: str, seed: int):
    if mode == "uniform":
        return uniform_weighting(H)
    if mode == "lp":
        return pfm_lp(H)
    if mode == "exact":
        return redistribute_pfm(H, build_walk_registry(H, seed=seed))
    raise CLIError(EXIT_PARAMS, f"unknown weighting mode {mode!r}")


# ---------------------------------------------------------------- analyze

def cmd_analyze(args) -> int:
    config = _make_config(args, "analyze")
    H = load_hypergraph(args.input)
    report = H.regularity_report()
    histogram = Counter(H.degree(v) for v in range(H.n))
    _say(config, f"k = {H.k}")
    _say(config, f"n = {H.n}")
    _say(config, f"m = {H.m}")
    _say(config, f"delta_{H.k - 1} = {report.delta_codegree}")
    _say(config, f"eta_star = {_rational(report.eta_star)}")
    _say(config, f"rho_star = {_rational(report.rho_star)}")
    _say(config, "degree histogram:")
    for degree in sorted(histogram):
        _say(config, f"  {degree}: {histogram[degree]}")
    if args.output:
        emit(
            {
                "config": config.as_dict(),
                "report": report.as_dict(),
                "degree_histogram": {str(d): histogram[d] for d in sorted(histogram)},
            },
            args.output,
        )
    return EXIT_OK


# ---------------------------------------------------------------- regsub

def cmd_regsub(args) -> int:
    config = _make_config(args, "regsub", cap=args.cap)
    H = load_hypergraph(args.input)
    try:
        result = reg_k(H, cap=args.cap)
    except OracleError as exc:
        raise CLIError(EXIT_PARAMS, f"regsub: {exc}")
    _say(config, f"reg_{H.k} = {result.r}")
    _say(config, f"witness edges: {result.witness.m}")
    if args.output:
        emit({"config": config.as_dict(), "result": result.as_dict()}, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- pfm

def cmd_pfm(args) -> int:
    config = _make_config(args, "pfm", mode=args.mode)
    H = load_hypergraph(args.input)
    w = _weighting_for(H, args.mode, args.seed)
    is_pfm = bool(w.is_pfm())
    ratio = balancedness(w)
    _say(config, f"mode = {args.mode}")
    _say(config, f"is_pfm = {is_pfm}")
    _say(config, f"balancedness = {_rational(ratio)}")
    doc = {
        "config": config.as_dict(),
        "mode": args.mode,
        "is_pfm": is_pfm,
        "balancedness": _rational(ratio),
        "max_weight": _rational(w.max_weight()),
        "min_weight": _rational(w.min_weight()),
        "weights": [
            [list(e), _rational(w.weight_of(e))] for e in H.edges
        ],
    }
    if args.output:
        emit(doc, args.output)
    return EXIT_OK if is_pfm else EXIT_STAGE


# ---------------------------------------------------------------- walk

def cmd_walk(args) -> int:
    config = _make_config(
        args,
        "walk",
        mode=args.mode,
        walk_length=args.walk_length,
        steps=args.steps,
        samples=args.samples,
    )
    if args.steps < 1:
        raise CLIError(EXIT_PARAMS, "walk: steps must be at least 1")
    H = load_hypergraph(args.input)
    w = _weighting_for(H, args.mode, args.seed)
    doc = {"config": config.as_dict()}
    if args.samples == 0:
        try:
            dist = walk_distribution(H, w, args.walk_length, args.steps)
        except OracleCapError as exc:
            raise CLIError(EXIT_PARAMS, f"walk: {exc}")
        marginal: dict = {}
        mass = Fraction(0)
        for seq, p in dist.items():
            marginal[seq[-1]] = marginal.get(seq[-1], Fraction(0)) + p
            mass += p
        doc["exact"] = {
            "sequences": len(dist),
            "total_mass": _rational(mass),
            "final_marginal": {str(v): _rational(marginal[v]) for v in sorted(marginal)},
        }
        _say(config, f"exact distribution over {len(dist)} sequences, mass {mass}")
    else:
        rng = random.Random(args.seed)
        counts = Counter()
        for _ in range(args.samples):
            seq = sample_walk(
                H, w, args.walk_length, args.steps, seed=rng.randrange(2**63)
            )
            counts[seq[-1]] += 1
        target = 1.0 / H.n
        deviation = max(
            abs(counts.get(v, 0) / args.samples - target) for v in range(H.n)
        )
        doc["sampled"] = {
            "samples": args.samples,
            "final_counts": {str(v): counts.get(v, 0) for v in range(H.n)},
            "max_deviation_from_uniform": deviation,
        }
        _say(
            config,
            f"{args.samples} samples, max final-vertex deviation from 1/n: "
            f"{deviation:.5f}",
        )
    if args.output:
        emit(doc, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- absorbers

def cmd_absorbers(args) -> int:
    config = _make_config(args, "absorbers", x=args.x, cap=args.cap)
    H = load_hypergraph(args.input)
    vertices = range(H.n) if args.x is None else [args.x]
    per_vertex = {}
    all_pass = True
    for x in vertices:
        try:
            absorbers = enumerate_absorbers(H, x, cap=args.cap)
        except HypergraphError as exc:
            raise CLIError(EXIT_PARAMS, f"absorbers: {exc}")
        checked = all(is_absorber_for(H, a.seq, x) for a in absorbers)
        all_pass = all_pass and checked
        per_vertex[x] = {"count": len(absorbers), "insertion_check": checked}
        _say(
            config,
            f"x = {x}: {len(absorbers)} absorbers, insertion check "
            f"{'passed' if checked else 'FAILED'}",
        )
    if args.output:
        emit(
            {
                "config": config.as_dict(),
                "per_vertex": {str(x): per_vertex[x] for x in per_vertex},
                "all_insertion_checks_pass": all_pass,
            },
            args.output,
        )
    return EXIT_OK if all_pass else EXIT_STAGE


# ---------------------------------------------------------------- cover

def cmd_cover(args) -> int:
    config = _make_config(
        args,
        "cover",
        cycle_length=args.cycle_length,
        collections=args.collections,
        per_edge=args.per_edge,
    )
    H = load_hypergraph(args.input)
    prof = config.profile
    L = args.cycle_length if args.cycle_length is not None else prof.L
    r = args.collections if args.collections is not None else prof.r_prime
    frac = fractional_cycle_decomposition(
        H, L, seed=args.seed, per_edge=args.per_edge
    )
    ext = extract_cycle_collections(
        H, frac, r, seed=args.seed, gates={"mu": prof.mu}
    )
    doc = {
        "config": config.as_dict(),
        "ok": bool(ext.ok),
        "gamma": _rational(ext.gamma),
        "coverages": ext.coverages(),
        "attempts": ext.attempts,
        "diagnostics": list(ext.diagnostics),
    }
    if ext.ok:
        bundle = cycles_to_paths(ext.collections, seed=args.seed, host=H, mu=prof.mu)
        doc["bundle"] = bundle.as_dict()
        _say(config, f"{r} collections extracted, coverages {ext.coverages()}")
    else:
        _say(config, "extraction gates failed; partial diagnostics written")
    if args.output:
        emit(doc, args.output)
    return EXIT_OK if ext.ok else EXIT_STAGE


# ---------------------------------------------------------------- decompose

def _input_weighting(H: Hypergraph):
    """Uniform weighting on regular hosts, LP otherwise, uniform fallback."""
    degrees = {H.degree(v) for v in range(H.n)}
    if len(degrees) == 1:
        return uniform_weighting(H)
    try:
        return pfm_lp(H)
    except (LPInfeasibleError, NotConnectedError):
        return uniform_weighting(H)


def _pipeline_once(H, targets, prof, seed, cover_length, per_edge):
    """One sparsify -> cover -> pack pass; raises on any stage failure."""
    empty = Hypergraph(H.k, H.n, [])
    sp = sparsify_intersecting(H, empty, prof.eps, _input_weighting(H), seed)
    reserve = sp.subgraph
    rest = H.remove_edges(reserve.edges)
    frac = fractional_cycle_decomposition(
        rest, cover_length, seed=seed, per_edge=per_edge
    )
    ext = extract_cycle_collections(
        rest, frac, len(targets), seed=seed, gates={"mu": prof.mu}
    )
    if not ext.ok:
        raise CoverError(
            "collection extraction gates failed: "
            + "; ".join(str(d) for d in ext.diagnostics[-1:])
        )
    bundle = cycles_to_paths(ext.collections, seed=seed, host=rest, mu=prof.mu)
    return pack_factors(H, reserve, bundle, targets, params=prof, seed=seed)


def _decompose_job(payload: dict) -> dict:
    """Retry the pipeline with sub-seeds; JSON-ready summary of the best run."""
    H = Hypergraph(
        payload["k"], payload["n"], [tuple(e) for e in payload["edges"]]
    )
    prof = Profile.from_mapping(payload["profile"])
    targets = payload["targets"]
    master = random.Random(payload["seed"])
    log = []
    best = None
    for attempt in range(payload["retries"]):
        sub = master.randrange(2**63)
        try:
            result = _pipeline_once(
                H, targets, prof, sub, payload["cover_length"], payload["per_edge"]
            )
        except AssembleParamError:
            raise
        except (CoverError, FractionalError, AssembleError) as exc:
            log.append(
                {"attempt": attempt, "stage": type(exc).__name__, "detail": str(exc)}
            )
            continue
        if result.ok:
            return {
                "ok": True,
                "achieved": result.achieved,
                "requested": result.requested,
                "seed": payload["seed"],
                "attempts": attempt + 1,
                "log": log,
                "manifest": result.manifest(payload["normalize"]),
            }
        log.append(
            {
                "attempt": attempt,
                "stage": "pack",
                "detail": f"partial {result.achieved} of {result.requested}",
            }
        )
        if best is None or result.achieved > best.achieved:
            best = result
    return {
        "ok": False,
        "achieved": best.achieved if best else 0,
        "requested": len(targets),
        "seed": payload["seed"],
        "attempts": payload["retries"],
        "log": log,
        "manifest": best.manifest(payload["normalize"]) if best else None,
    }


def cmd_decompose(args) -> int:
    config = _make_config(
        args,
        "decompose",
        targets=args.targets,
        pipeline_retries=args.pipeline_retries,
        cover_length=args.cover_length,
        per_edge=args.per_edge,
        parallel_seeds=args.parallel_seeds,
    )
    H = load_hypergraph(args.input)
    prof = config.profile
    targets = parse_targets(args.targets)
    gate = prof.girth_factor * prof.L
    for shape in targets:
        if sum(shape) != H.n:
            raise CLIError(
                EXIT_PARAMS,
                f"targets: factor shape {shape} sums to {sum(shape)}, "
                f"host has {H.n} vertices",
            )
        if min(shape) < gate:
            raise CLIError(
                EXIT_PARAMS,
                f"targets: cycle length {min(shape)} below the girth gate {gate}",
            )
    started = time.perf_counter()
    fanout = max(1, args.parallel_seeds)
    payloads = [
        {
            "k": H.k,
            "n": H.n,
            "edges": [list(e) for e in H.edges],
            "profile": prof.as_dict(),
            "targets": targets,
            "seed": args.seed + i,
            "retries": args.pipeline_retries,
            "cover_length": args.cover_length,
            "per_edge": args.per_edge,
            "normalize": args.normalize_timings,
        }
        for i in range(fanout)
    ]
    if fanout == 1:
        results = [_decompose_job(payloads[0])]
    else:
        with ProcessPoolExecutor(max_workers=fanout) as pool:
            results = list(pool.map(_decompose_job, payloads))
    # deterministic winner: first full success in seed order, else most factors
    winner = None
    for res in results:
        if res["ok"]:
            winner = res
            break
    if winner is None:
        winner = max(results, key=lambda r: (r["achieved"], -r["seed"]))
    wall = 0.0 if args.normalize_timings else time.perf_counter() - started
    doc = {
        "config": config.as_dict(),
        "targets": targets,
        "ok": winner["ok"],
        "achieved": winner["achieved"],
        "requested": winner["requested"],
        "wall_time": wall,
        "pipeline": {
            "winning_seed": winner["seed"],
            "attempts": winner["attempts"],
            "log": winner["log"],
            "seeds": [
                {"seed": r["seed"], "ok": r["ok"], "achieved": r["achieved"]}
                for r in results
            ],
        },
        "manifest": winner["manifest"],
    }
    emit(doc, args.output)
    if args.factors_out and winner["manifest"]:
        emit(
            {
                "config": config.as_dict(),
                "factors": winner["manifest"]["factors"]["factors"],
            },
            args.factors_out,
        )
    _say(
        config,
        f"achieved {winner['achieved']} of {winner['requested']} factors "
        f"(seed {winner['seed']}, {winner['attempts']} pipeline attempts)",
    )
    if winner["ok"]:
        return EXIT_OK
    return EXIT_PARTIAL if winner["achieved"] > 0 else EXIT_STAGE


# ---------------------------------------------------------------- verify

def _locate_factors(doc):
    """Accept decompose manifests or bare factors documents."""
    if isinstance(doc, dict):
        sub = doc.get("factors")
        if isinstance(sub, dict) and isinstance(sub.get("factors"), list):
            return sub["factors"]
        if isinstance(sub, list):
            return sub
        inner = doc.get("manifest")
        if isinstance(inner, dict):
            return _locate_factors(inner)
    raise CLIError(EXIT_PARSE, "factors file: no factors list found")


def cmd_verify(args) -> int:
    config = _make_config(args, "verify", factors=args.factors)
    H = load_hypergraph(args.input)
    try:
        doc = json.loads(Path(args.factors).read_text())
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"cannot read {args.factors}: {exc}")
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{args.factors}: {exc}")
    items = _locate_factors(doc)
    if not items:
        _say(config, "warning: empty factors list; vacuously valid")
        if args.output:
            emit(
                {"config": config.as_dict(), "ok": True, "factors": 0,
                 "warning": "empty factors list"},
                args.output,
            )
        return EXIT_OK
    try:
        factors = factors_from_document({"factors": items}, H)
    except (TightnessError, HypergraphError, ValueError, KeyError, TypeError) as exc:
        _say(config, f"invalid factors: {exc}")
        if args.output:
            emit(
                {"config": config.as_dict(), "ok": False, "error": str(exc)},
                args.output,
            )
        return EXIT_STAGE
    report = validate_packing(H, factors)
    _say(config, f"factors: {len(factors)}")
    _say(config, f"valid: {bool(report.ok)}")
    for reason in report.reasons:
        _say(config, f"  {reason}")
    if args.output:
        emit(
            {
                "config": config.as_dict(),
                "ok": bool(report.ok),
                "factors": len(factors),
                "lengths": [f.lengths() for f in factors],
                "reasons": list(report.reasons),
            },
            args.output,
        )
    return EXIT_OK if report.ok else EXIT_STAGE


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclefactors",
        description="Tight-cycle factor toolkit for k-uniform hypergraphs.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", help="key=value parameter file")
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one profile entry (repeatable)",
    )
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--output", help="write the JSON artifact here")
    common.add_argument(
        "--normalize-timings",
        action="store_true",
        help="zero all timing fields for byte-identical artifacts",
    )
    common.add_argument("-q", "--quiet", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="regularity summary")
    p.add_argument("input")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser(
        "regsub", parents=[common], help="largest exact-regular spanning subgraph"
    )
    p.add_argument("input")
    p.add_argument("--cap", type=int, default=64, help="edge-count search cap")
    p.set_defaults(handler=cmd_regsub)

    p = sub.add_parser("pfm", parents=[common], help="perfect fractional matching")
    p.add_argument("input")
    p.add_argument(
        "--mode", choices=["exact", "lp", "uniform"], default="exact"
    )
    p.set_defaults(handler=cmd_pfm)

    p = sub.add_parser("walk", parents=[common], help="weighted tight walks")
    p.add_argument("input")
    p.add_argument("--walk-length", type=int, default=6, metavar="L")
    p.add_argument("--steps", type=int, default=3, metavar="T")
    p.add_argument(
        "--samples",
        type=int,
        default=0,
        help="sample count; 0 runs the exact enumeration",
    )
    p.add_argument(
        "--mode", choices=["exact", "lp", "uniform"], default="uniform"
    )
    p.set_defaults(handler=cmd_walk)

    p = sub.add_parser("absorbers", parents=[common], help="absorber enumeration")
    p.add_argument("input")
    p.add_argument("--x", type=int, help="vertex to absorb (default: all)")
    p.add_argument("--cap", type=int, help="stop after this many per vertex")
    p.set_defaults(handler=cmd_absorbers)

    p = sub.add_parser("cover", parents=[common], help="cycle cover extraction")
    p.add_argument("input")
    p.add_argument("--cycle-length", type=int, metavar="L")
    p.add_argument("--collections", type=int, metavar="R")
    p.add_argument("--per-edge", type=int, default=12)
    p.set_defaults(handler=cmd_cover)

    p = sub.add_parser(
        "decompose", parents=[common], help="full packing pipeline"
    )
    p.add_argument("input")
    p.add_argument(
        "--targets",
        required=True,
        help="factor shapes, e.g. '12;12' or '6,6;12'",
    )
    p.add_argument("--pipeline-retries", type=int, default=8)
    p.add_argument("--cover-length", type=int, default=6)
    p.add_argument("--per-edge", type=int, default=20)
    p.add_argument("--factors-out", help="also write a bare factors file")
    p.add_argument(
        "--parallel-seeds",
        type=int,
        default=1,
        metavar="N",
        help="run N seeds in parallel processes, keep the best",
    )
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="validate factors")
    p.add_argument("input")
    p.add_argument("factors")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HypergraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (AssembleParamError, OracleCapError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (
        AssembleError,
        CoverError,
        FractionalError,
        StuckWalkError,
        TightnessError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
