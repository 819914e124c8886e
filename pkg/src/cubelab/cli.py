"""Command-line workbench.

Subcommands: `spectrum` (level weights, tails, approximate degree),
`check` (class predicates with witnesses), `verify` (seeded suite
batteries), `learn` (end-to-end PAC pipeline), `experiment` (CSV
sweeps).

Function-spec files are UTF-8 JSON with a `schema_version` field and
exactly one constructor key; randomized constructors must carry an
explicit seed.  Every output is wrapped in (JSON) or accompanied by
(CSV sidecar) a run manifest: tool version, command line, resolved
configuration, seeds, input hashes and a timestamp.  Outputs are
byte-identical across runs apart from the timestamp field.

Exit codes: 0 all checks pass, 1 bound/predicate failure, 2 usage or
parse error, 3 resource cap exceeded.  The dimension cap can be
overridden with the CUBELAB_MAX_N environment variable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import (
    hockey_tail_experiment,
    large_derivative_census,
    lipschitz_sum_experiment,
    load_calibration,
    submodular_corpus,
    talagrand_experiment,
    threshold_census,
    verify_core,
    verify_submodular,
    verify_xos,
)
from .core import (
    CubeFunction,
    dimension_cap,
    l2_degree,
    level_weights,
    transform,
)
from .errors import CubeLabError, DimensionCapError, DomainError, SpecError
from .learner import LearnerConfig, learn
from .zoo import (
    MDNF,
    VectorSet,
    XOSRep,
    boolean_to_submodular,
    hamming_self_bounding,
    hockey_stick,
    is_monotone,
    is_self_bounding,
    is_subadditive,
    is_submodular,
    is_xos,
    majority,
    mdnf_to_table,
    mdnf_to_xos,
    rademacher_function,
    random_talagrand_mdnf,
    separation_example,
    xos_to_table,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

SCHEMA_VERSION = 1

CONSTRUCTOR_KEYS = (
    "table",
    "xos",
    "mdnf",
    "mdnf_xos",
    "hockey_stick",
    "majority",
    "embed_submodular",
    "hamming_sb",
    "rademacher",
    "separation_example",
    "random_xos",
    "random_talagrand",
)


def fmt(x: float) -> str:
    """Full round-trip decimal formatting for CSV cells."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# function-spec parsing
# ---------------------------------------------------------------------------


@dataclass
class ParsedFunction:
    kind: str
    cube: CubeFunction
    xos_rep: XOSRep | None = None
    mdnf: MDNF | None = None
    params: dict | None = None
    seeds: tuple = ()


def _need(body: dict, key: str, kind: str):
    if key not in body:
        raise SpecError(f"{kind} spec is missing required field '{key}'")
    return body[key]


def _need_seed(body: dict, kind: str) -> int:
    if "seed" not in body:
        raise SpecError(
            f"randomized spec '{kind}' must carry an explicit seed"
        )
    return int(body["seed"])


def parse_function(obj: dict) -> ParsedFunction:
    """Build the function described by one constructor object."""
    if not isinstance(obj, dict):
        raise SpecError("function spec must be a JSON object")
    keys = [k for k in obj if k in CONSTRUCTOR_KEYS]
    if len(keys) != 1:
        raise SpecError(
            f"spec must contain exactly one constructor key from "
            f"{CONSTRUCTOR_KEYS}, found {keys}"
        )
    kind = keys[0]
    body = obj[kind] if obj[kind] is not None else {}
    if not isinstance(body, dict):
        raise SpecError(f"constructor '{kind}' must map to an object")

    if kind == "table":
        n = int(_need(body, "n", kind))
        values = _need(body, "values", kind)
        if n > dimension_cap():
            raise DimensionCapError(n, dimension_cap(), "table spec")
        return ParsedFunction(kind, CubeFunction(n, np.asarray(values, dtype=float)))
    if kind == "xos":
        n = int(_need(body, "n", kind))
        rep = XOSRep(n, np.asarray(_need(body, "clauses", kind), dtype=float))
        return ParsedFunction(kind, xos_to_table(rep), xos_rep=rep)
    if kind == "mdnf":
        k = int(_need(body, "k", kind))
        terms = tuple(frozenset(t) for t in _need(body, "terms", kind))
        m = MDNF(k, terms)
        return ParsedFunction(kind, mdnf_to_table(m), mdnf=m)
    if kind == "mdnf_xos":
        inner = parse_function({"mdnf": _need(body, "mdnf", kind)})
        assert inner.mdnf is not None
        rep = mdnf_to_xos(inner.mdnf)
        return ParsedFunction(kind, xos_to_table(rep), xos_rep=rep, mdnf=inner.mdnf)
    if kind == "hockey_stick":
        return ParsedFunction(
            kind,
            hockey_stick(int(_need(body, "n", kind)), int(_need(body, "k", kind))),
        )
    if kind == "majority":
        return ParsedFunction(
            kind,
            majority(int(_need(body, "n", kind)), int(_need(body, "k", kind))),
        )
    if kind == "embed_submodular":
        inner = parse_function(_need(body, "inner", kind))
        if not inner.cube.is_boolean():
            raise SpecError("embed_submodular needs a 0/1-valued inner function")
        return ParsedFunction(
            kind, boolean_to_submodular(inner.cube), seeds=inner.seeds
        )
    if kind == "hamming_sb":
        r = int(_need(body, "r", kind))
        inner = parse_function(_need(body, "inner", kind))
        if not inner.cube.is_boolean():
            raise SpecError("hamming_sb needs a 0/1-valued inner function")
        return ParsedFunction(
            kind, hamming_self_bounding(inner.cube, r), seeds=inner.seeds
        )
    if kind == "rademacher":
        n = int(_need(body, "n", kind))
        vs = VectorSet(n, np.asarray(_need(body, "vectors", kind), dtype=float))
        return ParsedFunction(kind, rademacher_function(vs))
    if kind == "separation_example":
        return ParsedFunction(kind, separation_example())
    if kind == "random_xos":
        n = int(_need(body, "n", kind))
        clauses = int(_need(body, "clauses", kind))
        seed = _need_seed(body, kind)
        density = float(body.get("density", 0.75))
        rng = np.random.default_rng(np.random.SeedSequence([seed]))
        w = rng.uniform(0.0, 1.0, size=(clauses, n))
        w *= rng.random(size=(clauses, n)) < density
        peak = float(w.sum(axis=1).max())
        if peak > 0:
            w /= peak
        rep = XOSRep(n, w)
        return ParsedFunction(
            kind, xos_to_table(rep), xos_rep=rep, seeds=(seed,)
        )
    if kind == "random_talagrand":
        k = int(_need(body, "k", kind))
        seed = _need_seed(body, kind)
        m = random_talagrand_mdnf(k, seed)
        return ParsedFunction(kind, mdnf_to_table(m), mdnf=m, seeds=(seed,))
    raise SpecError(f"unknown constructor '{kind}'")  # unreachable


def load_spec(path: str) -> tuple[ParsedFunction, str]:
    """Parse a spec file; returns the function and the file's sha256."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file {path}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SpecError(f"spec file {path} is not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SpecError(f"spec file {path} must hold a JSON object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SpecError(
            f"spec file {path}: schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    fn = parse_function({k: v for k, v in obj.items() if k != "schema_version"})
    return fn, digest


# ---------------------------------------------------------------------------
# manifests and output
# ---------------------------------------------------------------------------


def make_manifest(args, config: dict, seeds, input_hashes: dict) -> dict:
    return {
        "tool": "cubelab",
        "version": __version__,
        "command": config.get("_argv", []),
        "config": {k: v for k, v in config.items() if not k.startswith("_")},
        "seeds": list(seeds),
        "input_hashes": input_hashes,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_csv(header, rows, out: str | None, manifest: dict) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(fmt(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    fn, digest = load_spec(args.spec)
    s = transform(fn.cube)
    weights = level_weights(s)
    tails = np.concatenate([np.cumsum(weights[::-1])[::-1][1:], [0.0]])
    eps_list = [float(e) for e in args.eps.split(",")] if args.eps else []
    degrees = {fmt(e): l2_degree(s, e) for e in eps_list}
    config = {
        "_argv": _argv_of(args),
        "spec": args.spec,
        "eps": eps_list,
        "format": args.format,
    }
    manifest = make_manifest(args, config, fn.seeds, {args.spec: digest})
    if args.format == "csv":
        rows = [
            (d, float(weights[d]), float(tails[d])) for d in range(fn.cube.n + 1)
        ]
        emit_csv(("level", "weight", "tail"), rows, args.out, manifest)
        return EXIT_OK
    payload = {
        "manifest": manifest,
        "result": {
            "kind": fn.kind,
            "n": fn.cube.n,
            "levels": [float(w) for w in weights],
            "tails": [float(t) for t in tails],
            "l2_degree": degrees,
        },
    }
    emit_json(payload, args.out)
    return EXIT_OK


KNOWN_CLASSES = ("monotone", "submodular", "subadditive", "self-bounding", "xos")


def cmd_check(args) -> int:
    fn, digest = load_spec(args.spec)
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    for c in classes:
        if c not in KNOWN_CLASSES:
            raise SpecError(
                f"unknown class '{c}'; choose from {', '.join(KNOWN_CLASSES)}"
            )
    results = {}
    all_ok = True
    for c in classes:
        if c == "monotone":
            res = is_monotone(fn.cube)
            ok, witness = bool(res), res.witness
        elif c == "submodular":
            res = is_submodular(fn.cube)
            ok, witness = bool(res), res.witness
        elif c == "subadditive":
            res = is_subadditive(fn.cube)
            ok, witness = bool(res), res.witness
        elif c == "self-bounding":
            res = is_self_bounding(fn.cube, args.sb_a)
            ok, witness = bool(res), res.witness
        else:
            try:
                cert = is_xos(fn.cube)
                ok = bool(cert)
                witness = (
                    None
                    if ok
                    else {"violating_set": sorted(cert.violating_set or ())}
                )
            except DomainError as exc:
                ok, witness = False, {"domain": str(exc)}
        results[c] = {"pass": ok, "witness": witness}
        all_ok = all_ok and ok
        line = f"{c}: {'pass' if ok else 'FAIL'}"
        if witness:
            line += f"  witness={witness}"
        print(line)
    config = {"_argv": _argv_of(args), "spec": args.spec, "classes": classes}
    manifest = make_manifest(args, config, fn.seeds, {args.spec: digest})
    if args.out:
        emit_json({"manifest": manifest, "result": results}, args.out)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    threads = args.threads if args.threads > 0 else min(4, os.cpu_count() or 1)
    if args.count == 0:
        print("warning: empty corpus, vacuous pass")
        result = {"suite": args.suite, "checks": 0, "failures": 0}
        ok = True
    else:
        if args.suite == "core":
            suite = verify_core(args.count, args.seed, threads=threads)
        elif args.suite == "xos":
            suite = verify_xos(
                args.count, args.seed, junta_eps=(0.2, 0.3, 0.4), threads=threads
            )
        else:
            suite = verify_submodular(args.count, args.seed, threads=threads)
        ok = suite.ok
        result = {
            "suite": suite.suite,
            "checks": suite.checks,
            "failures": suite.failures,
            "worst_slack": suite.worst_slack,
            "failure_reports": suite.failure_reports[:50],
        }
    print(
        f"suite={args.suite} checks={result['checks']} "
        f"failures={result['failures']}"
    )
    config = {
        "_argv": _argv_of(args),
        "suite": args.suite,
        "count": args.count,
        "seed": args.seed,
        "threads": threads,
    }
    manifest = make_manifest(args, config, [args.seed], {})
    if args.out:
        emit_json({"manifest": manifest, "result": result}, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_learn(args) -> int:
    fn, digest = load_spec(args.spec)
    config = LearnerConfig(
        eps=args.eps,
        s=args.s,
        d=args.d,
        m=args.m,
        seed=args.seed,
        clip=not args.no_clip,
    )
    model, report = learn(fn.cube, config, mode=args.mode)
    config_dict = {
        "_argv": _argv_of(args),
        "spec": args.spec,
        "mode": args.mode,
        "eps": args.eps,
        "seed": args.seed,
        "s": args.s,
        "d": args.d,
        "m": args.m,
        "clip": not args.no_clip,
    }
    manifest = make_manifest(
        args, config_dict, (args.seed, *fn.seeds), {args.spec: digest}
    )
    model_payload = {
        "manifest": manifest,
        "model": {
            "n": model.polynomial.n,
            "junta": sorted(model.junta),
            "clip": model.clip,
            "degree": model.polynomial.degree,
            "terms": {
                str(mask): coeff
                for mask, coeff in sorted(model.polynomial.terms.items())
            },
        },
    }
    emit_json(model_payload, args.out)
    emit_json({"manifest": manifest, "report": report}, args.report)
    print(f"exact_l2_error={report['exact_l2_error']:.6g}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = {
        "_argv": _argv_of(args),
        "name": args.name,
    }
    input_hashes = {}
    seeds: tuple = ()
    if args.name == "hockey-tail":
        ks = [int(k) for k in args.k.split(",")]
        rows = hockey_tail_experiment(ks)
        header = ("k", "d", "tail", "scaled")
        table = [(r["k"], r["d"], r["tail"], r["scaled"]) for r in rows]
        config["k"] = ks
    elif args.name == "talagrand-ns":
        summary = talagrand_experiment(int(args.k), range(args.seeds), args.alpha)
        header = ("seed", "ns", "ns_half", "d", "tail", "chain_rhs", "chain_ok")
        table = [
            (
                r["seed"],
                r["ns"],
                r["ns_half"],
                r["d"],
                r["tail"],
                r["chain_rhs"],
                int(r["chain_ok"]),
            )
            for r in summary["rows"]
        ]
        config.update(
            {
                "k": args.k,
                "seeds": args.seeds,
                "alpha": summary["alpha"],
                "mean_ns": summary["mean_ns"],
                "min_ns": summary["min_ns"],
                "max_ns": summary["max_ns"],
                "chain_failures": summary["chain_failures"],
            }
        )
        seeds = tuple(range(args.seeds))
        print(
            f"mean_ns={fmt(summary['mean_ns'])} min_ns={fmt(summary['min_ns'])} "
            f"max_ns={fmt(summary['max_ns'])} chain_failures={summary['chain_failures']}"
        )
    elif args.name == "lipschitz-sum":
        alphas = [float(a) for a in args.alphas.split(",")]
        corpus = submodular_corpus(args.count, args.seed, n_max=args.n_max)
        rows = lipschitz_sum_experiment(corpus, alphas)
        header = ("function", "alpha", "set_size", "numerator", "ratio")
        table = [
            (r["function"], r["alpha"], r["set_size"], r["numerator"], r["ratio"])
            for r in rows
        ]
        config.update({"count": args.count, "seed": args.seed, "alphas": alphas})
        seeds = (args.seed,)
    elif args.name == "census":
        if not args.spec:
            raise SpecError("experiment census requires --spec")
        fn, digest = load_spec(args.spec)
        input_hashes[args.spec] = digest
        seeds = fn.seeds
        eps_list = [float(e) for e in args.eps.split(",")]
        table = []
        for eps in eps_list:
            delta = args.delta if args.delta is not None else eps**3
            j = large_derivative_census(fn.cube, eps, delta)
            t = threshold_census(fn.cube, eps)
            table.append(
                (
                    eps,
                    delta,
                    len(j),
                    " ".join(map(str, sorted(j))),
                    len(t),
                    " ".join(map(str, sorted(t))),
                )
            )
        header = (
            "eps",
            "delta",
            "large_derivative_count",
            "large_derivative_set",
            "threshold_census_count",
            "threshold_census_set",
        )
        config.update({"spec": args.spec, "eps": eps_list, "delta": args.delta})
    else:
        raise SpecError(f"unknown experiment '{args.name}'")
    manifest = make_manifest(args, config, seeds, input_hashes)
    emit_csv(header, table, args.out, manifest)
    return EXIT_OK


def cmd_calibration(args) -> int:
    emit_json({"calibration": load_calibration()}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _argv_of(args) -> list[str]:
    return list(getattr(args, "_raw_argv", []))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubelab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="level weights, tails and l2 degree")
    p.add_argument("--spec", required=True, help="function spec JSON file")
    p.add_argument("--eps", help="comma-separated accuracies for l2 degree")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", help="class predicates with witnesses")
    p.add_argument("--spec", required=True)
    p.add_argument(
        "--class",
        dest="classes",
        required=True,
        help=f"comma-separated from: {', '.join(KNOWN_CLASSES)}",
    )
    p.add_argument("--sb-a", type=float, default=1.0, help="self-bounding constant a")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=("core", "xos", "submodular"), required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=1, help="0 = auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("learn", help="end-to-end PAC learning run")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=("submodular", "xos"), default="submodular")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=int, help="junta parameter override")
    p.add_argument("--d", type=int, help="degree override")
    p.add_argument("--m", type=int, help="sample count override")
    p.add_argument("--no-clip", action="store_true")
    p.add_argument("--out", help="model JSON path (stdout if omitted)")
    p.add_argument("--report", help="report JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("experiment", help="CSV sweeps")
    p.add_argument(
        "name", choices=("hockey-tail", "talagrand-ns", "lipschitz-sum", "census")
    )
    p.add_argument("--k", default="8,12,16,20", help="hockey-tail: k list; talagrand: k")
    p.add_argument("--seeds", type=int, default=200, help="talagrand seed count")
    p.add_argument("--alpha", type=float, help="talagrand noise rate override")
    p.add_argument("--count", type=int, default=25, help="lipschitz corpus size")
    p.add_argument("--seed", type=int, default=2, help="lipschitz corpus master seed")
    p.add_argument("--n-max", type=int, default=8, help="lipschitz corpus dimension cap")
    p.add_argument("--alphas", default="0.05,0.1,0.2,0.3,0.4", help="lipschitz alphas")
    p.add_argument("--spec", help="census: function spec file")
    p.add_argument("--eps", default="0.1,0.2", help="census eps list")
    p.add_argument("--delta", type=float, help="census delta (default eps^3)")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("calibration", help="print the frozen calibration fixtures")
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibration)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._raw_argv = argv
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CubeLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
