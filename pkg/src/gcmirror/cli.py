"""Command-line front end: ``gcmirror <command> FILE [options]``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage, parse and dimension errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import fileformat
from .courant import ChartMismatchError, frame_labels, integrability_by_nijenhuis
from .exterior import format_form, parse_form
from .fileformat import FormatError, StructureFile
from .gcs import EIGEN_SIGN, Failure, InvalidStructureError, pure_spinor, validate_gcs
from .grammar import ParseError
from .kahler import (GKPair, buscher_check, extract_metric_data, g_blocks_semiflat, k_inverse_check,
                     mirror_g, reconstruct, validate_gk)
from .scalar import Context
from .semiflat import (InvalidBlocksError, brane_check, brane_conditions, brane_mirror,
                       dirac_structures, integrability_semiflat, lift_to_total_space, mirror, transverse,
                       validate_adapted)

COMMANDS = ("validate", "mirror", "integrability", "spinor", "fourier", "kahler", "brane", "dirac")


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    ok: bool
    details: list[str] = field(default_factory=list)


@dataclass
class Report:
    command: str
    subject: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool, details: Iterable[str] = ()) -> bool:
        self.checks.append(Check(name, bool(ok), list(details)))
        return ok

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> str:
        obj = {
            "command": self.command,
            "subject": self.subject,
            "checks": [{"name": c.name, "ok": c.ok, "details": c.details} for c in self.checks],
            "data": self.data,
            "ok": self.ok,
        }
        return json.dumps(obj, indent=2, sort_keys=False)

    def lines(self, prefix: str = "") -> list[str]:
        out = [f"{prefix}command: {self.command}", f"{prefix}structure: {self.subject}"]
        for c in self.checks:
            out.append(f"{prefix}{c.name}: {'PASS' if c.ok else 'FAIL'}")
            out.extend(f"{prefix}  {d}" for d in c.details)
        for k, v in self.data.items():
            if isinstance(v, list):
                out.append(f"{prefix}{k}:")
                out.extend(f"{prefix}  {x}" for x in v)
            elif k != "file":
                out.append(f"{prefix}{k}: {v}")
        out.append(f"{prefix}result: {'PASS' if self.ok else 'FAIL'}")
        return out


def _failure_checks(report: Report, labels: Sequence[str], failures: Sequence[Failure], prefix: str = ""):
    by = {}
    for f in failures:
        by.setdefault(f.label, []).append(str(f))
    for label in labels:
        report.add(prefix + label, label not in by, by.pop(label, []))
    for label, items in by.items():
        report.add(prefix + label, False, items)


def _subject(sf: StructureFile) -> str:
    return f"{sf.kind} n={sf.ctx.n}" + (" periodic" if sf.ctx.periodic else "")


GCS_LABELS = tuple(f"e:{k}" for k in range(1, 8))
ADAPTED_LABELS = tuple(f"K{k}" for k in range(1, 7))


def _require(sf: StructureFile, kinds: Sequence[str], command: str):
    if sf.kind not in kinds:
        raise UsageError(f"{command} needs a " + " or ".join(f"[{k}]" for k in kinds) + " section")


def _pair(sf: StructureFile) -> GKPair:
    return GKPair.from_adapted(sf.blocks, sf.partner)


# -- commands ----------------------------------------------------------------

def cmd_validate(sf: StructureFile, args) -> Report:
    r = Report("validate", _subject(sf))
    if sf.kind == "gcs":
        _failure_checks(r, GCS_LABELS, validate_gcs(sf.gcs))
    elif sf.kind == "semiflat":
        _failure_checks(r, ADAPTED_LABELS, validate_adapted(sf.blocks))
    else:
        _failure_checks(r, ADAPTED_LABELS, validate_adapted(sf.blocks), "J ")
        _failure_checks(r, ADAPTED_LABELS, validate_adapted(sf.partner), "J' ")
        if r.ok:
            _failure_checks(r, ("commute", "G^2=1", "positive"), validate_gk(_pair(sf), _samples(sf, args)))
    return r


def _mirrored(sf: StructureFile) -> StructureFile:
    out = StructureFile(sf.ctx, sf.kind, samples=sf.samples)
    out.blocks = mirror(sf.blocks)
    if sf.partner is not None:
        out.partner = mirror(sf.partner)
    if sf.brane is not None:
        out.brane = brane_mirror(sf.brane, sf.ctx.n)
    return out


def cmd_mirror(sf: StructureFile, args) -> Report:
    _require(sf, ("semiflat", "kahler"), "mirror")
    r = Report("mirror", _subject(sf))
    members = [("", sf.blocks)] if sf.partner is None else [("J ", sf.blocks), ("J' ", sf.partner)]
    for prefix, b in members:
        _failure_checks(r, ADAPTED_LABELS, validate_adapted(b), prefix + "input ")
    if not r.ok:
        return r
    out = _mirrored(sf)
    for prefix, b in ([("", out.blocks)] if out.partner is None else [("J ", out.blocks), ("J' ", out.partner)]):
        _failure_checks(r, ADAPTED_LABELS, validate_adapted(b), prefix + "mirror ")
    text = fileformat.dumps(out)
    r.add("mirror file re-parses", _reparses(text, out))
    if args.roundtrip:
        back = _mirrored(out)
        same = back.blocks == sf.blocks and back.partner == sf.partner
        r.add("mirror of mirror is the input", same)
    r.data["file"] = text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return r


def _reparses(text: str, expected: StructureFile) -> bool:
    again = fileformat.loads(text)
    return again.blocks == expected.blocks and again.partner == expected.partner and again.brane == expected.brane


def cmd_integrability(sf: StructureFile, args) -> Report:
    r = Report("integrability", _subject(sf))
    if sf.kind == "gcs":
        J = sf.gcs
        coords = sf.ctx.base_names if J.m == sf.ctx.n else sf.ctx.names if J.m == 2 * sf.ctx.n else None
        if coords is None:
            raise UsageError(f"rank {J.m} matches neither the base chart nor the full chart")
        _failure_checks(r, GCS_LABELS, validate_gcs(J), "valid ")
        if not r.ok:
            return r
        ok, ws = integrability_by_nijenhuis(J, coords)
        labels = frame_labels(coords)
        r.add("Courant-Nijenhuis tensor vanishes", ok, [w.describe(labels) for w in ws])
        return r
    members = [("", sf.blocks)] if sf.partner is None else [("J ", sf.blocks), ("J' ", sf.partner)]
    for prefix, b in members:
        fails = validate_adapted(b)
        _failure_checks(r, ADAPTED_LABELS, fails, prefix + "valid ")
        if fails:
            continue
        res = integrability_semiflat(b, first_only=False)
        r.add(prefix + "brackets of M(frame) vanish", res.integrable, res.describe())
        ok, _ = integrability_by_nijenhuis(lift_to_total_space(b), first_only=True)
        r.add(prefix + "Courant-Nijenhuis on the lift agrees", ok == res.integrable,
              [f"lift verdict: {'integrable' if ok else 'not integrable'}"])
        mres = integrability_semiflat(mirror(b))
        r.add(prefix + "mirror verdict agrees", mres.integrable == res.integrable,
              [f"mirror verdict: {'integrable' if mres.integrable else 'not integrable'}"])
    return r


def cmd_spinor(sf: StructureFile, args) -> Report:
    _require(sf, ("gcs", "semiflat"), "spinor")
    from .courant import spinor_integrability
    from .fourier import ft_vector_bundle, mirror_spinor, spinor_mirror_check, structure_spinor

    r = Report("spinor", _subject(sf))
    r.data["convention"] = f"line annihilated by the {'-' if EIGEN_SIGN < 0 else '+'}i eigenbundle"
    if sf.kind == "gcs":
        J = sf.gcs
        if not J.is_constant():
            raise UsageError("spinor extraction needs constant entries")
        _failure_checks(r, GCS_LABELS, validate_gcs(J), "valid ")
        if not r.ok:
            return r
        from .gcs import form_generators
        phi = pure_spinor(J, form_generators(J.m))
        r.data["spinor"] = format_form(phi)
        r.add("d(phi) = iota_v phi + alpha ^ phi solvable", spinor_integrability(phi))
        return r
    b = sf.blocks
    if not b.is_constant():
        raise UsageError("the fiberwise spinor statement needs constant blocks")
    _failure_checks(r, ADAPTED_LABELS, validate_adapted(b), "valid ")
    if not r.ok:
        return r
    phi = structure_spinor(b)
    r.data["spinor"] = format_form(phi)
    r.data["transform"] = format_form(ft_vector_bundle(phi))
    r.data["mirror spinor"] = format_form(mirror_spinor(b))
    r.add("transform spans the mirror line", spinor_mirror_check(b))
    return r


def cmd_fourier(args) -> Report:
    from .fourier import ft_torus, ft_vector_bundle, mixed_generators, torus_generators

    text = args.target
    kind = args.kind
    if kind == "auto":
        kind = "torus" if ("dxi" in text or "E[" in text) else "bundle"
    n = args.n
    if n is None or n < 1:
        raise UsageError("fourier needs --n with a positive rank")
    if kind == "torus":
        ctx = Context(n, True)
        mu = parse_form(text, torus_generators(n), ctx)
        out = ft_torus(mu)
    else:
        ctx = Context(n, False)
        phi = parse_form(text, mixed_generators(n), ctx)
        t = Fraction(args.trivialization)
        if t == 0:
            raise UsageError("the trivialization must be nonzero")
        out = ft_vector_bundle(phi, t)
    r = Report("fourier", f"{kind} n={n}")
    r.data["input"] = format_form(mu if kind == "torus" else phi)
    r.data["output"] = format_form(out)
    return r


def _samples(sf: StructureFile, args):
    if getattr(args, "samples", None):
        pts = []
        for chunk in args.samples.split(";"):
            vals = [v.strip() for v in chunk.split(",")]
            if len(vals) != sf.ctx.n:
                raise UsageError(f"each sample point needs {sf.ctx.n} coordinates")
            try:
                pts.append({f"x{k + 1}": Fraction(v) for k, v in enumerate(vals)})
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"bad sample point {chunk!r}") from None
        return pts
    return sf.samples


def cmd_kahler(sf: StructureFile, args) -> Report:
    _require(sf, ("kahler",), "kahler")
    r = Report("kahler", _subject(sf))
    _failure_checks(r, ADAPTED_LABELS, validate_adapted(sf.blocks), "J ")
    _failure_checks(r, ADAPTED_LABELS, validate_adapted(sf.partner), "J' ")
    if not r.ok:
        return r
    p = _pair(sf)
    _failure_checks(r, ("commute", "G^2=1", "positive"), validate_gk(p, _samples(sf, args)))
    if not r.ok:
        return r
    try:
        md = extract_metric_data(p)
    except ValueError as exc:
        r.add("metric data", False, [str(exc)])
        return r
    r.data["g"] = [fileformat.format_matrix(md.g)]
    r.data["b"] = [fileformat.format_matrix(md.b)]
    back = reconstruct(md)
    r.add("reconstruct(extract) is the pair", back == p)
    gb = g_blocks_semiflat(sf.blocks, sf.partner)
    r.add("G blocks symmetric", gb.symmetric_blocks())
    r.add("mirror of G blocks matches the mirror pair", mirror_g(gb) == g_blocks_semiflat(mirror(sf.blocks),
                                                                                        mirror(sf.partner)))
    for name, ok in buscher_check(gb).items():
        r.add(f"Buscher {name}", ok)
    for name, ok in k_inverse_check(p, md).items():
        r.add(name, ok)
    return r


def cmd_brane(sf: StructureFile, args) -> Report:
    _require(sf, ("semiflat",), "brane")
    if sf.brane is None:
        raise UsageError("brane needs a [brane] section")
    r = Report("brane", _subject(sf))
    b, d = sf.blocks, sf.brane
    _failure_checks(r, ADAPTED_LABELS, validate_adapted(b), "valid ")
    if not r.ok:
        return r
    conds = brane_conditions(b, d)
    for k, ok in conds.items():
        r.add(k, ok)
    md = brane_mirror(d, b.n)
    r.data["mirror datum"] = f"S = {sorted(i + 1 for i in md.S)}, W = {sorted(i + 1 for i in md.W)}"
    r.add("mirror datum verdict agrees", brane_check(mirror(b), md) == all(conds.values()))
    return r


def cmd_dirac(sf: StructureFile, args) -> Report:
    _require(sf, ("semiflat",), "dirac")
    r = Report("dirac", _subject(sf))
    b = sf.blocks
    _failure_checks(r, ADAPTED_LABELS, validate_adapted(b), "valid ")
    if not r.ok:
        return r
    delta, delta_hat = dirac_structures(b)
    r.add("Delta isotropic", delta.is_isotropic())
    r.add("Delta-hat isotropic", delta_hat.is_isotropic())
    r.add("transverse (rank 2n)", transverse(delta, delta_hat))
    md, mdh = dirac_structures(mirror(b))
    r.add("mirror exchanges Delta and Delta-hat", md == delta_hat and mdh == delta)
    integrable = integrability_semiflat(b).integrable
    inv = delta.is_involutive() and delta_hat.is_involutive()
    r.data["integrable"] = "yes" if integrable else "no"
    r.data["involutive"] = "yes" if inv else "no"
    r.add("involutive when integrable", inv or not integrable)
    return r


HANDLERS = {
    "validate": cmd_validate, "mirror": cmd_mirror, "integrability": cmd_integrability,
    "spinor": cmd_spinor, "kahler": cmd_kahler, "brane": cmd_brane, "dirac": cmd_dirac,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcmirror", description="Exact checks for semi-flat generalized "
                                     "complex structures and their mirrors.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("target", help="structure file (a form string for 'fourier')")
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    parser.add_argument("--out", help="write the mirrored structure file here")
    parser.add_argument("--samples", help="positivity sample points, e.g. '0,0;1,1/2'")
    parser.add_argument("--roundtrip", action="store_true", help="also check that mirroring twice is the identity")
    parser.add_argument("--n", type=int, help="rank for 'fourier'")
    parser.add_argument("--kind", choices=("auto", "bundle", "torus"), default="auto",
                        help="'fourier': fiberwise transform or torus-bundle transform")
    parser.add_argument("--trivialization", default="1", help="'fourier': scalar trivializing the top power")
    return parser


def _emit(report: Report, args, out) -> None:
    if args.json:
        out.write(report.to_json() + "\n")
    elif report.command == "fourier":
        out.write(report.data["output"] + "\n")
    elif report.command == "mirror" and not args.out and "file" in report.data:
        out.write("\n".join(report.lines("# ")) + "\n")
        out.write(report.data["file"])
    else:
        out.write("\n".join(report.lines()) + "\n")


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fourier":
            report = cmd_fourier(args)
        else:
            sf = fileformat.load(args.target)
            report = HANDLERS[args.command](sf, args)
    except (FormatError, ParseError) as exc:
        err.write(f"gcmirror: {args.target}: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"gcmirror: {exc}\n")
        return 2
    except (UsageError, ChartMismatchError, InvalidStructureError, InvalidBlocksError) as exc:
        err.write(f"gcmirror: {exc}\n")
        return 2
    except ValueError as exc:
        err.write(f"gcmirror: {exc}\n")
        return 2
    _emit(report, args, out)
    return 0 if report.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
