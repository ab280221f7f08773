"""Batch front door: scenario files in, verdicts and certificates out.

A scenario is a JSON document {"schema_version": 1, "id": ..., "kind": ...,
"payload": {...}}; payloads are validated against per-kind JSON schemas
before dispatch.  Reports are reproducible: identical inputs give identical
bytes apart from the wall-time field, regardless of --jobs.

Exit codes: 0 all verdicts hold, 1 some verdict fails, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import jsonschema

from . import dynamics, intpoly, ipstruct, keyengine, lattice, spectral
from .errors import CheckFailed, InputError, PolyrecError

DEFAULT_CAP = 10**6

RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
INTEGER_STRING = {"type": "string", "pattern": r"^-?[0-9]+$"}

BINPOLY_SCHEMA = {
    "type": "object",
    "required": ["nvars", "terms"],
    "properties": {
        "nvars": {"type": "integer", "minimum": 1},
        "basis": {"const": "binomial"},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["idx", "coef"],
                "properties": {
                    "idx": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "coef": INTEGER_STRING,
                },
            },
        },
    },
}

LATTICE_SCHEMA = {
    "type": "object",
    "required": ["ambient", "basis"],
    "properties": {
        "ambient": {"type": "integer", "minimum": 1},
        "basis": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}},
        },
    },
}

SYSTEM_SCHEMA = {
    "type": "object",
    "required": ["points", "weights", "maps"],
    "properties": {
        "points": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "weights": {"type": "object", "additionalProperties": RATIONAL},
        "maps": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "string"}},
        },
    },
}

UNITARY_SCHEMA = {
    "type": "object",
    "required": ["phases"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "ops": {"type": "integer", "minimum": 1},
        "phases": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": RATIONAL, "minItems": 1},
        },
    },
}

PAYLOAD_SCHEMAS: Dict[str, dict] = {
    "khintchine": {
        "schema_version": 1,
        "type": "object",
        "required": ["system", "A", "fs"],
        "additionalProperties": False,
        "properties": {
            "system": SYSTEM_SCHEMA,
            "A": {"type": "array", "items": {"type": "string"}},
            "fs": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
        },
    },
    "r-epsilon": {
        "schema_version": 1,
        "type": "object",
        "required": ["system", "A", "fs", "epsilon"],
        "additionalProperties": False,
        "properties": {
            "system": SYSTEM_SCHEMA,
            "A": {"type": "array", "items": {"type": "string"}},
            "fs": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
            "epsilon": RATIONAL,
        },
    },
    "ip-star": {
        "schema_version": 1,
        "type": "object",
        "required": ["system", "A", "fs", "epsilon", "k", "W"],
        "additionalProperties": False,
        "properties": {
            "system": SYSTEM_SCHEMA,
            "A": {"type": "array", "items": {"type": "string"}},
            "fs": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
            "epsilon": RATIONAL,
            "k": {"type": "integer", "minimum": 1},
            "W": {"type": "integer", "minimum": 1},
        },
    },
    "key-lemma": {
        "schema_version": 1,
        "type": "object",
        "required": ["v", "V", "hypothesis"],
        "additionalProperties": False,
        "properties": {
            "v": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
            "V": LATTICE_SCHEMA,
            "hypothesis": LATTICE_SCHEMA,
        },
    },
    "stable-rank": {
        "schema_version": 1,
        "type": "object",
        "required": ["v", "window"],
        "additionalProperties": False,
        "properties": {
            "v": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
            "window": {"type": "integer", "minimum": 1},
        },
    },
    "spectral-limit": {
        "schema_version": 1,
        "type": "object",
        "required": ["unitary", "fs"],
        "additionalProperties": False,
        "properties": {
            "unitary": UNITARY_SCHEMA,
            "fs": {"type": "array", "items": BINPOLY_SCHEMA, "minItems": 1},
        },
    },
    "delta-check": {
        "schema_version": 1,
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "poly": BINPOLY_SCHEMA,
            "recursion_max_s": {"type": "integer", "minimum": 2, "maximum": 4},
            "c_table_max": {"type": "integer", "minimum": 1, "maximum": 12},
            "random": {
                "type": "object",
                "required": ["count", "nvars", "max_degree"],
                "additionalProperties": False,
                "properties": {
                    "count": {"type": "integer", "minimum": 1, "maximum": 1000},
                    "nvars": {"type": "integer", "minimum": 1, "maximum": 3},
                    "max_degree": {"type": "integer", "minimum": 1, "maximum": 4},
                    "coeff_bound": {"type": "integer", "minimum": 1, "maximum": 99},
                },
            },
        },
    },
    "hindman-search": {
        "schema_version": 1,
        "type": "object",
        "required": ["coloring", "k"],
        "additionalProperties": False,
        "properties": {
            "coloring": {
                "type": "object",
                "required": ["W", "colors"],
                "properties": {
                    "W": {"type": "integer", "minimum": 1},
                    "colors": {"type": "array"},
                },
            },
            "k": {"type": "integer", "minimum": 1},
        },
    },
}

SCENARIO_SCHEMA = {
    "schema_version": 1,
    "type": "object",
    "required": ["schema_version", "id", "kind", "payload"],
    "properties": {
        "schema_version": {"const": 1},
        "id": {"type": "string", "minLength": 1},
        "kind": {"enum": sorted(PAYLOAD_SCHEMAS)},
        "payload": {"type": "object"},
    },
}


# ---------------------------------------------------------------------------
# Scenario runners: payload -> (verdict, details, certificate-or-None)
# ---------------------------------------------------------------------------


def _run_khintchine(payload, cap, seed):
    sys_ = dynamics.system_from_json(payload["system"])
    fs = [intpoly.from_json(p) for p in payload["fs"]]
    query = dynamics.recurrence_query(payload["A"], fs, payload.get("epsilon", 0))
    rep = dynamics.verify_khintchine(sys_, query, cap=cap)
    details = {
        "sup": str(rep.sup_value),
        "bound": str(rep.bound),
        "witness_residue": list(rep.witness_residue),
        "period": list(rep.period),
    }
    return rep.holds, details, None


def _residue_details(verdict: dynamics.ResidueVerdict) -> dict:
    return {
        "period": list(verdict.period),
        "members": sorted(list(m) for m in verdict.members),
        "member_count": len(verdict.members),
        "epsilon": str(verdict.epsilon),
        "mu_a": str(verdict.mu_a),
        "mu_a_sq": str(verdict.mu_a_sq),
    }


def _run_r_epsilon(payload, cap, seed):
    sys_ = dynamics.system_from_json(payload["system"])
    fs = [intpoly.from_json(p) for p in payload["fs"]]
    query = dynamics.recurrence_query(payload["A"], fs, payload["epsilon"])
    verdict = dynamics.r_epsilon(sys_, query, cap=cap)
    details = _residue_details(verdict)
    details["table"] = dynamics.residue_table(sys_, query, verdict)
    zero = (0,) * fs[0].nvars
    return zero in verdict.members, details, None


def _run_ip_star(payload, cap, seed):
    sys_ = dynamics.system_from_json(payload["system"])
    fs = [intpoly.from_json(p) for p in payload["fs"]]
    query = dynamics.recurrence_query(payload["A"], fs, payload["epsilon"])
    verdict = dynamics.r_epsilon(sys_, query, cap=cap)
    window = dynamics.ip_star_verdict(verdict, payload["k"], payload["W"])
    details = _residue_details(verdict)
    details.update(
        {
            "ip_star": {
                "holds": window.ip_star.holds,
                "witness": list(window.ip_star.witness) if window.ip_star.witness else None,
            },
            "syndetic_gap": window.gap,
            "horizon": window.horizon,
            "window": {"k": payload["k"], "W": payload["W"]},
        }
    )
    return window.ip_star.holds and window.gap is not None, details, None


def _run_key_lemma(payload, cap, seed):
    v = intpoly.polytuple_from_json(payload["v"])
    target = lattice.from_json(payload["V"])
    hypothesis = lattice.from_json(payload["hypothesis"])
    inst = keyengine.key_instance(v, target)
    witness = keyengine.key_lemma_lattice(inst, hypothesis, cap=cap)
    details = {
        "witness": lattice.to_json(witness),
        "witness_index": lattice.index(witness),
    }
    return True, details, keyengine.key_certificate_json(inst, witness)


def _run_stable_rank(payload, cap, seed):
    v = intpoly.polytuple_from_json(payload["v"])
    cert = keyengine.stable_rank_subgroup(v, payload["window"], cap=cap)
    details = {
        "r": cert.r,
        "samples": [list(pt) for pt in cert.samples],
        "V": lattice.to_json(cert.V),
        "saturation_window": cert.saturation_window,
    }
    return True, details, keyengine.rank_certificate_json(v, cert)


def _run_spectral_limit(payload, cap, seed):
    u = spectral.from_json(payload["unitary"])
    fs = [intpoly.from_json(p) for p in payload["fs"]]
    desc = spectral.limit_projection(u, fs, cap=cap)
    details = {
        "fixed": sorted(desc.fixed),
        "is_identity": len(desc.fixed) == u.dim,
        "certificate": lattice.to_json(desc.certificate),
        "phase_order": spectral.phase_lcm(u),
    }
    certificate = {
        "certificate_kind": "spectral-limit",
        "unitary": spectral.to_json(u),
        "fs": [intpoly.to_json(f) for f in fs],
        "lattice": lattice.to_json(desc.certificate),
    }
    return True, details, certificate


def _random_binpoly(rng: random.Random, nvars: int, max_degree: int, bound: int):
    terms = {}
    for _ in range(rng.randint(1, 6)):
        while True:
            idx = tuple(rng.randint(0, max_degree) for _ in range(nvars))
            if 0 < sum(idx) <= max_degree:
                break
        coef = rng.randint(-bound, bound)
        if coef:
            terms[idx] = coef
    terms[(0,) * nvars] = rng.randint(-bound, bound)
    f = intpoly.binpoly(nvars, terms)
    if f.degree < 1:
        idx = (1,) + (0,) * (nvars - 1)
        f = intpoly.add(f, intpoly.binpoly(nvars, {idx: 1}))
    return f


def _delta_identities(f) -> Tuple[bool, dict]:
    d = max(f.degree, 0)
    collapsed = intpoly.delta(f, d + 1)
    expected_value = (-1) ** d * f.constant_term()
    expected = intpoly.constant((d + 1) * f.nvars, expected_value)
    constant_ok = collapsed == expected
    drop_ok = True
    if f.degree >= 1:
        doubled = intpoly.delta(f, 2)
        n = f.nvars
        for block in (range(n), range(n, 2 * n)):
            if intpoly.degree_in_vars(doubled, block) >= f.degree:
                drop_ok = False
    return constant_ok and drop_ok, {
        "constant_collapse": constant_ok,
        "collapsed_value": str(expected_value),
        "block_degree_drop": drop_ok,
    }


def _recursion_consistent(f, s: int) -> bool:
    return intpoly.delta(f, s) == intpoly.delta_recursive(f, s)


def _run_delta_check(payload, cap, seed):
    details = {}
    ok = True
    if "poly" in payload:
        f = intpoly.from_json(payload["poly"])
        good, info = _delta_identities(f)
        ok &= good
        details["poly"] = info
        max_s = payload.get("recursion_max_s", 3)
        rec = all(_recursion_consistent(f, s) for s in range(2, max_s + 1))
        ok &= rec
        details["recursion_consistent"] = rec
    if "c_table_max" in payload:
        top = payload["c_table_max"]
        diag = all(intpoly.c_number(m, m) == math.factorial(m) for m in range(1, top + 1))
        zeros = all(
            intpoly.c_number(s, m) == 0
            for m in range(1, top + 1)
            for s in range(m + 1, top + 1)
        )
        ok &= diag and zeros
        details["c_table"] = {"factorial_diagonal": diag, "upper_zeros": zeros}
    if "random" in payload:
        params = payload["random"]
        rng = random.Random(seed)
        bound = params.get("coeff_bound", 9)
        failures = 0
        for _ in range(params["count"]):
            f = _random_binpoly(rng, params["nvars"], params["max_degree"], bound)
            good, _info = _delta_identities(f)
            failures += 0 if good else 1
        ok &= failures == 0
        details["random"] = {"count": params["count"], "failures": failures, "seed": seed}
    return ok, details, None


def _run_hindman_search(payload, cap, seed):
    coloring = ipstruct.coloring_from_json(payload["coloring"])
    k = payload["k"]
    witness = ipstruct.find_monochromatic_fs(coloring, k)
    w = len(coloring)
    if witness is not None:
        sums = ipstruct.fs_expand(witness)
        verified = max(sums) <= w and len({coloring[s] for s in sums}) == 1
        details = {
            "witness": list(witness.generators),
            "subset_sums": sorted(sums),
            "verified": verified,
        }
        return verified, details, None
    # independent exhaustion: no strictly increasing tuple works
    from itertools import combinations

    exhausted = True
    for gens in combinations(range(1, w + 1), k):
        sums = ipstruct.fs_expand(ipstruct.FiniteIP(gens))
        if max(sums) <= w and len({coloring[s] for s in sums}) == 1:
            exhausted = False
            break
    return exhausted, {"witness": None, "verified_by_exhaustion": exhausted}, None


RUNNERS = {
    "khintchine": _run_khintchine,
    "r-epsilon": _run_r_epsilon,
    "ip-star": _run_ip_star,
    "key-lemma": _run_key_lemma,
    "stable-rank": _run_stable_rank,
    "spectral-limit": _run_spectral_limit,
    "delta-check": _run_delta_check,
    "hindman-search": _run_hindman_search,
}


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (Fraction,)):
        return str(value)
    return value


def load_scenarios(paths: List[Path], bundled: bool) -> List[Tuple[str, dict]]:
    """Collect (source, scenario) pairs, sorted by scenario id."""
    files: List[Tuple[str, Path]] = []
    if bundled:
        root = resources.files("polyrec") / "scenarios"
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".json"):
                files.append((f"bundled:{entry.name}", entry))
    for path in paths:
        if path.is_dir():
            files.extend((str(p), p) for p in sorted(path.glob("*.json")))
        elif path.exists():
            files.append((str(path), path))
        else:
            raise InputError(f"{path}: no such file or directory")
    scenarios = []
    seen = set()
    for source, path in files:
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: invalid JSON ({exc})") from None
        try:
            jsonschema.validate(doc, SCENARIO_SCHEMA)
            jsonschema.validate(doc["payload"], PAYLOAD_SCHEMAS[doc["kind"]])
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise InputError(f"{source}: at {where}: {exc.message}") from None
        if doc["id"] in seen:
            raise InputError(f"{source}: duplicate scenario id {doc['id']!r}")
        seen.add(doc["id"])
        scenarios.append((source, doc))
    scenarios.sort(key=lambda item: item[1]["id"])
    return scenarios


def run_scenario(source: str, doc: dict, cap: int, seed: int) -> dict:
    start = time.perf_counter()
    runner = RUNNERS[doc["kind"]]
    certificate = None
    try:
        verdict, details, certificate = runner(doc["payload"], cap=cap, seed=seed)
    except CheckFailed as exc:
        verdict = False
        details = {
            "error": type(exc).__name__,
            "message": str(exc),
            "witness": _jsonable(exc.witness),
        }
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return {
        "id": doc["id"],
        "kind": doc["kind"],
        "verdict": "holds" if verdict else "fails",
        "details": details,
        "certificate": certificate,
        "wall_time_ms": round(elapsed_ms, 3),
    }


def _format_text(report: dict) -> str:
    lines = [f"== {report['id']} [{report['kind']}] {report['verdict'].upper()}"]
    details = report["details"]
    table = details.get("table")
    for key in sorted(details):
        if key == "table":
            continue
        lines.append(f"   {key}: {json.dumps(details[key], sort_keys=True)}")
    if table:
        lines.extend("   " + row for row in table.splitlines())
    return "\n".join(lines)


def cmd_run(args) -> int:
    try:
        scenarios = load_scenarios([Path(p) for p in args.paths], args.bundled)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not scenarios:
        print("error: no scenarios given (pass files, a directory, or --bundled)", file=sys.stderr)
        return 2
    try:
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            reports = list(
                pool.map(
                    lambda item: run_scenario(item[0], item[1], args.cap, args.seed),
                    scenarios,
                )
            )
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for report in reports:
        print(_format_text(report))
    if args.emit_certificates:
        outdir = Path(args.emit_certificates)
        outdir.mkdir(parents=True, exist_ok=True)
        for report in reports:
            if report["certificate"] is not None:
                cert_doc = {"schema_version": 1, **report["certificate"]}
                path = outdir / f"{report['id']}.cert.json"
                path.write_text(json.dumps(cert_doc, indent=2, sort_keys=True) + "\n")
    if args.json:
        doc = {
            "schema_version": 1,
            "reports": [
                {k: v for k, v in report.items() if k != "certificate"}
                for report in reports
            ],
        }
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0 if all(r["verdict"] == "holds" for r in reports) else 1


def cmd_verify_certificate(args) -> int:
    path = Path(args.certificate)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return 2
    kind = doc.get("certificate_kind")
    try:
        if kind == "key-lemma":
            keyengine.verify_key_certificate_json(doc, cap=args.cap)
        elif kind == "stable-rank":
            keyengine.verify_rank_certificate_json(doc)
        elif kind == "spectral-limit":
            u = spectral.from_json(doc["unitary"])
            fs = [intpoly.from_json(f) for f in doc["fs"]]
            cert = lattice.from_json(doc["lattice"])
            spectral.verify_limit_certificate(u, fs, cert, cap=args.cap)
        else:
            print(f"error: {path}: unknown certificate kind {kind!r}", file=sys.stderr)
            return 2
    except CheckFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (InputError, KeyError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return 2
    print(f"certificate verified: {kind}")
    return 0


def cmd_list_scenarios(args) -> int:
    root = resources.files("polyrec") / "scenarios"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            doc = json.loads(entry.read_text())
            print(f"{doc['id']}  [{doc['kind']}]  bundled:{entry.name}")
    return 0


def cmd_schema(args) -> int:
    if args.kind not in PAYLOAD_SCHEMAS:
        print(
            f"error: unknown kind {args.kind!r}; choose from {', '.join(sorted(PAYLOAD_SCHEMAS))}",
            file=sys.stderr,
        )
        return 2
    print(json.dumps(PAYLOAD_SCHEMAS[args.kind], indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrec",
        description="Exact verification scenarios: polynomial differences, lattice "
        "witnesses, subset-sum windows, recurrence on finite systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run scenario files or directories")
    run_p.add_argument("paths", nargs="*", help="scenario files or directories")
    run_p.add_argument("--bundled", action="store_true", help="include the bundled corpus")
    run_p.add_argument("--json", metavar="PATH", help="also write a JSON report document")
    run_p.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="scenario-level parallelism (output is identical for any value)",
    )
    run_p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="sweep point budget")
    run_p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    run_p.add_argument(
        "--emit-certificates", metavar="DIR", help="write re-verifiable certificates"
    )
    run_p.set_defaults(func=cmd_run)

    ver_p = sub.add_parser("verify-certificate", help="re-verify an emitted certificate")
    ver_p.add_argument("certificate", help="certificate JSON file")
    ver_p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    ver_p.set_defaults(func=cmd_verify_certificate)

    list_p = sub.add_parser("list-scenarios", help="list the bundled scenario corpus")
    list_p.set_defaults(func=cmd_list_scenarios)

    schema_p = sub.add_parser("schema", help="print the JSON schema for a scenario kind")
    schema_p.add_argument("kind")
    schema_p.set_defaults(func=cmd_schema)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PolyrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
