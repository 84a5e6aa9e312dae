"""Command-line interface: verify / construct / chars.

Exit codes: 0 success, 1 verification failure (report still emitted),
2 usage or capacity errors.  JSON reports are deterministic byte for byte
(pass --no-timestamp to drop the only run-dependent field); the schema
ships with the package under schema/report.schema.json.
"""
from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

from . import __version__
from .errors import CaminaError, CapacityError, ScaleError
from .fields import is_prime, make_field

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def _env_max_enum(default: int) -> int:
    raw = os.environ.get("CAMINA_MAX_ENUM")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"CAMINA_MAX_ENUM must be an integer, got {raw!r}")


def _field_dict(field) -> dict:
    return {
        "p": field.p,
        "n": field.n,
        "modulus_digits": "".join(str(c) for c in field.modulus),
    }


def _structure_dict(report) -> dict:
    return {
        e.name: {"status": e.status, "detail": e.detail} for e in report.entries
    }


def _candidate_dict(rec) -> dict:
    camina = None
    if rec.camina is not None:
        camina = {
            "is_camina": rec.camina.is_camina,
            "method": rec.camina.method,
            "witness": list(rec.camina.witness) if rec.camina.witness else None,
        }
    if rec.gagola_skipped is not None:
        gagola = rec.gagola_skipped
    elif rec.gagola_degrees is not None:
        gagola = rec.gagola_degrees
    else:
        gagola = None
    return {
        "fingerprint": rec.fingerprint,
        "order": rec.handle.order,
        "is_k": rec.is_k,
        "camina": camina,
        "p_closed": rec.p_closed,
        "p_length": rec.plength,
        "gagola_degrees": gagola,
        "gagola_consistency": rec.consistency,
        "stabilizes_theta_constituent": rec.stabilizes_constituent,
        "passes": rec.passes,
    }


def build_report(field, structure, pipeline, *, timestamp: bool) -> dict:
    doc = {
        "tool": "camina",
        "version": __version__,
        "field": _field_dict(field),
        "orders": {
            "H": pipeline.bundle.H.order if pipeline else None,
            "K": pipeline.bundle.K.order if pipeline else None,
            "G": pipeline.bundle.G.order if pipeline else None,
        },
        "structure_checks": _structure_dict(structure),
        "structure_all_pass": structure.all_pass,
        "pipeline": None,
        "success": None,
    }
    if timestamp:
        doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    if pipeline is not None:
        doc["pipeline"] = {
            "p": pipeline.p,
            "residual_index": pipeline.residual_index,
            "m_choices": pipeline.m_choices,
            "gm_order": pipeline.gm_order,
            "gm_elementary_abelian": pipeline.gm_elementary_abelian,
            "order_p_subgroups": pipeline.order_p_subgroups,
            "chars_mode": pipeline.chars_mode,
            "theta_degree": pipeline.theta_degree,
            "stabilizer_candidate": pipeline.stabilizer_index,
            "candidates": [_candidate_dict(c) for c in pipeline.candidates],
            "winners": pipeline.winners,
            "expected_winner_count": pipeline.expected_winner_count,
            "spot_checked_cosets": {str(k): v for k, v in pipeline.spot_checks.items()},
        }
        doc["success"] = structure.all_pass and pipeline.success
    else:
        doc["success"] = structure.all_pass
    return doc


def render_text(doc: dict) -> str:
    lines = [f"camina {doc['version']}"]
    f = doc["field"]
    lines.append(f"field: GF({f['p']}^{f['n']}), modulus digits {f['modulus_digits']}")
    o = doc["orders"]
    if o["G"] is not None:
        lines.append(f"orders: |H| = {o['H']}  |K| = {o['K']}  |G| = {o['G']}")
    lines.append("structure checks:")
    for name, entry in doc["structure_checks"].items():
        status = {True: "pass", False: "FAIL", None: "skip"}[entry["status"]]
        detail = f"  ({entry['detail']})" if entry["detail"] else ""
        lines.append(f"  [{status}] {name}{detail}")
    pipe = doc["pipeline"]
    if pipe is not None:
        lines.append(
            f"pipeline: O^p index {pipe['residual_index']}, {pipe['m_choices']} valid M, "
            f"|G/M| = {pipe['gm_order']} "
            f"({'elementary abelian' if pipe['gm_elementary_abelian'] else 'NOT elementary abelian'}), "
            f"{pipe['order_p_subgroups']} candidates")
        lines.append(f"characters: {pipe['chars_mode']}"
                     + (f", theta degree {pipe['theta_degree']}"
                        if pipe["theta_degree"] else ""))
        for i, c in enumerate(pipe["candidates"]):
            if c["is_k"]:
                lines.append(f"  candidate {i} [{c['fingerprint']}]: K itself (skipped)")
                continue
            cam = c["camina"]
            gag = c["gagola_degrees"]
            lines.append(
                f"  candidate {i} [{c['fingerprint']}]: order {c['order']}, "
                f"camina={cam['is_camina']} ({cam['method']}), "
                f"p_closed={c['p_closed']}, p_length={c['p_length']}, "
                f"gagola={gag}, stabilizer={c['stabilizes_theta_constituent']}, "
                f"passes={c['passes']}")
        lines.append(f"winners: {pipe['winners']} "
                     f"(expected {pipe['expected_winner_count']})")
        if pipe["spot_checked_cosets"]:
            lines.append(f"fast-verdict spot checks: {pipe['spot_checked_cosets']}")
    lines.append(f"success: {doc['success']}")
    if "timestamp" in doc:
        lines.append(f"timestamp: {doc['timestamp']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    from .constructions import build_bundle, structural_checks, theorem_pipeline

    p = args.p
    n = args.n if args.n is not None else p
    if not is_prime(p):
        print(f"error: --p must be prime, got {p}", file=sys.stderr)
        return EXIT_USAGE
    if n != p:
        print(f"error: the pipeline requires n = p (got n = {n}); "
              "use 'construct'/'chars' for other fields", file=sys.stderr)
        return EXIT_USAGE
    max_enum = _env_max_enum(args.max_enum)
    try:
        pipeline = theorem_pipeline(p, chars=args.chars, max_enum=max_enum,
                                    threads=args.threads)
        structure = structural_checks(pipeline.bundle)
    except (ScaleError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    doc = build_report(pipeline.bundle.field, structure, pipeline,
                       timestamp=not args.no_timestamp)
    if args.format == "json":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(render_text(doc))
    return EXIT_OK if doc["success"] else EXIT_VERIFICATION_FAILED


def cmd_construct(args) -> int:
    from .constructions import build_bundle, dump_group

    if not is_prime(args.p):
        print(f"error: --p must be prime, got {args.p}", file=sys.stderr)
        return EXIT_USAGE
    max_enum = _env_max_enum(args.max_enum)
    try:
        field = make_field(args.p, args.n)
        bundle = build_bundle(field, max_enum=max_enum)
    except (ScaleError, CapacityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handle = {"h": bundle.H, "k": bundle.K, "g": bundle.G}[args.group]
    text = dump_group(field, handle)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_chars(args) -> int:
    from . import chars as chars_mod
    from .constructions import build_bundle
    from .groups import conjugacy_classes

    if not is_prime(args.p):
        print(f"error: --p must be prime, got {args.p}", file=sys.stderr)
        return EXIT_USAGE
    max_enum = _env_max_enum(args.max_enum)
    try:
        field = make_field(args.p, args.n)
        bundle = build_bundle(field, max_enum=max_enum)
        handle = {"h": bundle.H, "k": bundle.K, "g": bundle.G}[args.group]
        table = chars_mod.dixon_table(handle)
    except (ScaleError, CapacityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = conjugacy_classes(handle)
    print(f"group {args.group} over GF({field.p}^{field.n}): order {handle.order}, "
          f"{table.k} classes")
    print("class sizes:", " ".join(str(int(s)) for s in data.sizes))
    print("degrees:", " ".join(str(int(d)) for d in table.degrees))
    reports = chars_mod.gagola_characters(table)
    if not reports:
        print("gagola characters: none")
    for rep in reports:
        print(f"gagola character: degree {rep.degree}, |N| = {rep.minimal_normal.order}, "
              f"p = {rep.prime}, e = {rep.ramification}")
        checks = chars_mod.gagola_consistency(handle, rep, rep.prime)
        print("  consistency:", ", ".join(f"{k}={v}" for k, v in checks.items()))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camina",
        description="Exact verification of Camina pairs built from Heisenberg "
                    "groups over finite fields")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run the full index-p pipeline and report")
    pv.add_argument("--p", type=int, required=True, help="the prime p (field GF(p^p))")
    pv.add_argument("--n", type=int, default=None,
                    help="field degree (defaults to p; the pipeline requires n = p)")
    pv.add_argument("--chars", choices=["auto", "on", "off"], default="auto")
    pv.add_argument("--format", choices=["json", "text"], default="text")
    pv.add_argument("--threads", type=int, default=1,
                    help="worker threads for candidate checks (never changes results)")
    pv.add_argument("--max-enum", type=int, default=2_000_000)
    pv.add_argument("--no-timestamp", action="store_true",
                    help="omit the timestamp for byte-identical reruns")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("construct", help="dump a group's elements as text")
    pc.add_argument("--p", type=int, required=True)
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--group", choices=["h", "k", "g"], required=True)
    pc.add_argument("--out", default="-", help="output path (default stdout)")
    pc.add_argument("--max-enum", type=int, default=2_000_000)
    pc.set_defaults(func=cmd_construct)

    ph = sub.add_parser("chars", help="character table, degrees and Gagola reports")
    ph.add_argument("--p", type=int, required=True)
    ph.add_argument("--n", type=int, required=True)
    ph.add_argument("--group", choices=["h", "k", "g"], required=True)
    ph.add_argument("--max-enum", type=int, default=2_000_000)
    ph.set_defaults(func=cmd_chars)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CaminaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
