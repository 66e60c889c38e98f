"""
toriclab/cli.py
===============
Interface en ligne de commande.

    python -m toriclab.cli <commande> GERME.json [--t p/q] [--r n] [--scope fiber|total]
                           [--output json|text] [--cap-cells N] [--cap-index N]

Commandes : validate, mld, check-ct, reduce, complement, hyperplane, series, oracle.

Codes de sortie :
    0  succès / réponse vraie
    1  réponse mathématique négative (témoin dans le rapport)
    2  entrée invalide
    3  plafond d'énumération atteint
    4  incohérence interne
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from toriclab.core.config import settings
from toriclab.core.errors import (
    EXIT_INTERNAL,
    EXIT_NEGATIVE,
    InputError,
    ToricLabError,
)
from toriclab.core.limits import use_caps
from toriclab.schemas.common import parse_rational, vec_out
from toriclab.schemas.complements import (
    ComplementCertificateIO,
    HyperplaneCertificateIO,
    certificate_from_json,
)
from toriclab.schemas.germs import CtOut, dump_germ, load_germ
from toriclab.schemas.reductions import GroupRepIO, QFactorialOut, ReductionCertificateIO, SeriesCheck
from toriclab.services.complement import (
    global_complement,
    hyperplane_sections,
    local_complement,
    verify_certificate,
)
from toriclab.services.oracle import oracle_mld
from toriclab.services.reduction import germ_reduce, series_dictionary
from toriclab.services.toric_germ import FibrationGerm, check_Ct, mld_fiber, mld_total

logger = logging.getLogger("toriclab.cli")

COMMANDS = ("validate", "mld", "check-ct", "reduce", "complement", "hyperplane", "series", "oracle")
NEEDS_T = {"check-ct", "reduce", "complement", "hyperplane"}
DEFAULT_SERIES_T = ("1/2", "1", "3/2")


# ============================================================
# PARSEUR
# ============================================================

def _rational(value: str) -> Fraction:
    try:
        return Fraction(parse_rational(value))
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toriclab", description="Germes de fibrations toriques : mld, (C_t), réductions, compléments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", nargs="?", help="germe JSON (chemin, ou - pour stdin)")
    parser.add_argument("--t", type=_rational, default=None)
    parser.add_argument("--r", type=int, default=1)
    parser.add_argument("--scope", choices=("fiber", "total"), default="fiber")
    parser.add_argument("--output", choices=("json", "text"), default="json")
    parser.add_argument("--cap-cells", type=int, default=None)
    parser.add_argument("--cap-index", type=int, default=None)
    parser.add_argument("--certificate", type=Path, default=None, help="certificat à re-vérifier (oracle)")
    parser.add_argument("--verbose", action="store_true")
    return parser


# ============================================================
# RAPPORTS
# ============================================================

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"lecture impossible : {path}", reason=str(err)) from err


def build_report(
    command: str,
    g: FibrationGerm,
    t: Fraction | None = None,
    r: int = 1,
    scope: str = "fiber",
) -> tuple[int, Any]:
    """(code de sortie, rapport JSON-sérialisable) ; lève ToricLabError."""
    if command in NEEDS_T and t is None:
        raise InputError("--t requis", command=command)

    if command == "validate":
        return 0, json.loads(dump_germ(g))

    if command == "mld":
        value, e = mld_fiber(g) if scope == "fiber" else mld_total(g)
        return 0, {"scope": scope, "mld": str(value), "minimizer": vec_out(e)}

    if command == "check-ct":
        res = check_Ct(g, t)
        report = CtOut.from_domain(res).model_dump(mode="json")
        if res.holds:
            report["report"] = "N ∩ int(tU) = ∅"
        return (0 if res.holds else EXIT_NEGATIVE), report

    if command == "reduce":
        return 0, ReductionCertificateIO.from_domain(germ_reduce(g, t)).model_dump(mode="json")

    if command == "complement":
        cert = local_complement(g, t, r) if scope == "fiber" else global_complement(g, t, r)
        return 0, ComplementCertificateIO.from_domain(cert).model_dump(mode="json")

    if command == "hyperplane":
        sections = hyperplane_sections(g, t, germ_reduce(g, t))
        return 0, [HyperplaneCertificateIO.from_domain(s).model_dump(mode="json") for s in sections]

    if command == "series":
        report = series_dictionary(g, [t] if t is not None else DEFAULT_SERIES_T)
        group = report.reduction_group
        out = QFactorialOut.from_domain(
            report.context,
            checks=[SeriesCheck(t=str(x), series=s, ct=c) for x, s, c in report.checks],
            reduction_group=GroupRepIO.from_domain(group) if group else None,
        )
        agree = all(s == c for _, s, c in report.checks)
        return (0 if agree else EXIT_INTERNAL), out.model_dump(mode="json")

    raise InputError("commande inconnue", command=command)


def oracle_crosscheck(g: FibrationGerm) -> tuple[int, dict]:
    """mld_fiber contre le balayage de référence."""
    value, e = mld_fiber(g)
    reference = oracle_mld(g, max(value, Fraction(1)))
    agree = reference == value
    report = {"mld": str(value), "minimizer": vec_out(e), "oracle_mld": str(reference), "agree": agree}
    return (0 if agree else EXIT_NEGATIVE), report


# ============================================================
# FICHIERS GOLDEN
# ============================================================

def golden_entry(spec: dict) -> dict:
    """Recalcule une entrée golden {command, fixture, t, r, scope} à partir du germe fixture."""
    path = settings.FIXTURES / "germs" / f"{spec['fixture']}.json"
    g = load_germ(path.read_text(encoding="utf-8"))
    t = Fraction(spec["t"]) if spec.get("t") is not None else None
    try:
        code, report = build_report(spec["command"], g, t, spec.get("r", 1), spec.get("scope", "fiber"))
    except ToricLabError as err:
        code, report = err.exit_code, {"error": err.to_detail()}
    keys = ("command", "fixture", "t", "r", "scope")
    return {**{k: spec.get(k) for k in keys if k in spec}, "exit_code": code, "report": report}


def golden_diff(golden_dir: Path | None = None) -> list[str]:
    """Noms des fichiers golden dont la régénération diffère."""
    golden_dir = golden_dir or settings.golden_dir
    diffs = []
    for path in sorted(golden_dir.glob("*.json")):
        stored = json.loads(path.read_text(encoding="utf-8"))
        fresh = golden_entry(stored)
        if fresh != stored:
            logger.warning("[ORACLE] golden différent : %s", path.name)
            diffs.append(path.name)
    return diffs


def run_oracle(args: argparse.Namespace) -> tuple[int, Any]:
    if args.certificate is not None:
        if args.input is None:
            raise InputError("germe requis avec --certificate")
        g = load_germ(_read(args.input))
        kind, cert = certificate_from_json(_read(str(args.certificate)))
        ok, clause = verify_certificate(g, kind, cert, args.t)
        return (0 if ok else EXIT_NEGATIVE), {"kind": kind, "ok": ok, "clause": clause}
    if args.input is not None:
        return oracle_crosscheck(load_germ(_read(args.input)))
    diffs = golden_diff()
    return (0 if not diffs else EXIT_NEGATIVE), {"golden_dir": str(settings.golden_dir), "diffs": diffs}


# ============================================================
# SORTIE TEXTE
# ============================================================

def render_text(command: str, report: Any) -> str:
    if isinstance(report, list):
        return "\n\n".join(render_text(command, item) for item in report)
    if command == "complement" and "n" in report:
        rows = [
            ("n", report["n"]),
            ("scope", report["scope"]),
            ("caractères", " ".join("(" + ", ".join(m) + ")" for m in report["characters"])),
            ("B⁺", " ".join(report["bplus_coeffs"])),
            ("mld vérifié", report["verified_mld"]),
        ]
    else:
        rows = [(k, json.dumps(v, ensure_ascii=False) if isinstance(v, (dict, list)) else v) for k, v in report.items()]
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)} : {v}" for k, v in rows)


# ============================================================
# MAIN
# ============================================================

def run(args: argparse.Namespace) -> tuple[int, Any]:
    with use_caps(cap_cells=args.cap_cells, cap_index=args.cap_index):
        if args.command == "oracle":
            return run_oracle(args)
        if args.input is None:
            raise InputError("germe requis", command=args.command)
        g = load_germ(_read(args.input))
        return build_report(args.command, g, args.t, args.r, args.scope)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL.upper(),
        format="%(levelname)s %(name)s %(message)s",
    )
    try:
        code, report = run(args)
    except ToricLabError as err:
        code, report = err.exit_code, {"error": err.to_detail()}
        print(f"❌ {err.code} : {err.message}", file=sys.stderr)
    except Exception:
        logger.exception("[CLI] erreur inattendue")
        return EXIT_INTERNAL

    if args.output == "text":
        print(render_text(args.command, report))
    else:
        print(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
