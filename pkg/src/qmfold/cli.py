"""Command-line front end.

Exit codes: 0 pass, 1 certification failure, 2 usage error, 3 inconclusive
or work cap reached.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import cahen, cf, deriv, folding, minkowski, setm
from .serialize import decay_records, dumps, image_plain, to_csv

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class RunConfig:
    kappa_width: str = "1e-12"
    bigint_bits: int = folding.DEFAULT_BIGINT_BITS
    work_cap: int = minkowski.DEFAULT_WORK_CAP
    format: str = "json"
    output: str | None = None
    jobs: int = 1

    def validate(self) -> None:
        if Fraction(self.kappa_width) <= 0:
            raise ValueError("kappa width must be positive")
        for name in ("bigint_bits", "work_cap", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")

    @property
    def kappa(self):
        return setm.kappa2(Fraction(self.kappa_width))


def build_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the config file, which overrides the defaults."""
    values: dict[str, Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(data)
    for name in ("kappa_width", "bigint_bits", "work_cap", "format", "output", "jobs"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    cfg.kappa_width = str(cfg.kappa_width)
    for name in ("bigint_bits", "work_cap", "jobs"):
        setattr(cfg, name, int(getattr(cfg, name)))
    cfg.validate()
    return cfg


# -- argument parsing helpers ----------------------------------------------------


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


_DYADIC = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


def parse_dyadic(text: str) -> minkowski.Dyadic:
    """Accepts m/2^e or any rational with a power-of-two denominator."""
    m = _DYADIC.match(text)
    try:
        if m:
            return minkowski.Dyadic(int(m.group(1)), int(m.group(2)))
        return minkowski.Dyadic.from_fraction(parse_rational(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_cf(text: str) -> tuple[int, ...]:
    """[a1,a2,...] or a1,a2,... (brackets optional, [] is empty)."""
    body = text.strip().removeprefix("[").removesuffix("]").strip()
    if not body:
        return ()
    try:
        return cf.check_quotients(tuple(int(t) for t in body.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad quotient list {text!r}: {exc}") from exc


def parse_blocks(text: str) -> list[tuple[int, ...]]:
    """JSON list of lists, e.g. [[2],[1],[]]."""
    try:
        data = json.loads(text)
        return [cf.check_quotients(tuple(int(a) for a in b)) for b in data]
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad block list {text!r}: {exc}") from exc


def _status_code(status: str) -> int:
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "refused": EXIT_FAIL}.get(status, EXIT_INCONCLUSIVE)


# -- subcommands -------------------------------------------------------------------


def cmd_qm_eval(args, cfg):
    return {"value": minkowski.qm_of_rational(args.x)}, EXIT_PASS


def cmd_qm_invert(args, cfg):
    a = minkowski.qm_inverse(args.d)
    return {"cf": a, "value": cf.cf_to_rational(a)}, EXIT_PASS


def cmd_qm_iterate(args, cfg):
    its = [args.x]
    try:
        for _ in range(args.n):
            its.append(minkowski.iterate_qm(its[-1], 1, cfg.work_cap))
    except cf.CapExceeded as exc:
        return {"iterates": its, "capped": True, "error": str(exc)}, EXIT_INCONCLUSIVE
    return {"iterates": its, "capped": False}, EXIT_PASS


def cmd_cf_of(args, cfg):
    return {"cf": cf.cf_from_rational(args.x)}, EXIT_PASS


def cmd_cf_to(args, cfg):
    return {"value": cf.cf_to_rational(args.a)}, EXIT_PASS


def cmd_cf_canon(args, cfg):
    return {"cf": cf.canonicalize(args.a)}, EXIT_PASS


def _fold_input(args) -> folding.FoldInput:
    return folding.FoldInput(args.image, 0 if args.parity == "even" else 1, args.s)


def cmd_fold_step(args, cfg):
    raw = folding.fold_step(_fold_input(args), cfg.bigint_bits)
    return {"raw": raw, "canonical": cf.canonicalize(raw)}, EXIT_PASS


def cmd_fold_bounds(args, cfg):
    b = folding.fold_range_bounds(_fold_input(args), cfg.bigint_bits)
    return {"lower": b.lower, "upper": b.upper, "z": [b.z_lo, b.z_hi]}, EXIT_PASS


def cmd_setm_gen(args, cfg):
    spec = setm.minimal_spec(args.blocks, cfg.kappa, [args.extra] * (len(args.blocks) - 1))
    return spec.to_json(), EXIT_PASS


def _membership_plain(rep: setm.MembershipReport) -> dict:
    return {
        "status": rep.status,
        "kappa": rep.kappa,
        "verdicts": [{"k": v.k, "slack": v.slack, "sigma": v.sigma, "next_sum": v.next_sum,
                      "threshold": v.threshold, "verdict": v.verdict} for v in rep.verdicts],
        "notes": rep.explain(),
    }


def cmd_setm_certify(args, cfg):
    spec = setm.MSpec.load(args.spec)
    rep = setm.certify_membership(spec, cfg.kappa)
    return _membership_plain(rep), _status_code(rep.status)


def _image_check_plain(c: setm.ImageCheck) -> dict:
    out = {"k": c.k, "empty_next": c.empty_next, "verdict": c.verdict, "steps": c.steps,
           "bounds": {"z_lower": str(c.z_lower), "sigma_b_upper": str(c.sigma_b_upper),
                      "s_b_next_upper": str(c.s_b_next_upper),
                      "g_lower": [str(t) for t in c.g_lower],
                      "rhs_upper": [str(t) for t in c.rhs_upper]}}
    if c.exact is not None:
        out["exact"] = c.exact
    return out


def cmd_setm_image(args, cfg):
    spec = setm.MSpec.load(args.spec)
    depth = args.depth or len(spec.blocks)
    img = folding.image_prefix(spec, depth, args.mode, cfg.bigint_bits)
    img.check_structure()
    rep = setm.certify_image_membership(spec, depth - 1, cfg.kappa, cfg.bigint_bits)
    report = {
        "image": image_plain(img),
        "certificate": {"status": rep.status, "exact_depth": rep.exact_depth,
                        "membership": _membership_plain(rep.membership),
                        "checks": [_image_check_plain(c) for c in rep.checks]},
    }
    return report, _status_code(rep.status)


def cmd_setm_avg(args, cfg):
    spec = setm.MSpec.load(args.spec)
    rows = setm.boundary_averages(spec, cfg.kappa)
    return {"rows": rows}, EXIT_PASS


def cmd_cahen_verify(args, cfg):
    cs = cahen.cahen_spec(args.depth)
    rep = setm.certify_membership(cs.spec, cfg.kappa)
    expected, stable, cf_ok = cahen.verify_cf(args.depth, args.digits)
    ok = cs.ok and cf_ok and rep.status == "pass"
    report = {
        "cf_prefix": expected,
        "stable_quotients": stable,
        "cf_match": cf_ok,
        "taus": cs.taus,
        "sigmas": cs.sigmas,
        "tau_margin": cs.tau_margin_ok,
        "growth": {str(n): v for n, v in cs.growth_ok.items()},
        "membership": rep.status,
        "status": "pass" if ok else "fail",
    }
    if rep.status == "inconclusive":
        return report, EXIT_INCONCLUSIVE
    return report, EXIT_PASS if ok else EXIT_FAIL


def cmd_deriv_table(args, cfg):
    spec = setm.MSpec.load(args.spec)
    rows = deriv.chain_factor_table(spec, args.n, args.depth, cfg.bigint_bits)
    return {"rows": decay_records(rows)}, EXIT_PASS


def _orbit_row(job: tuple[Fraction, int, int]) -> dict:
    x, max_n, cap = job
    o = minkowski.fixed_point_orbit(x, max_n, cap)
    return {"x": str(x), "classification": o.classification, "steps": len(o.iterates) - 1,
            "capped": o.capped}


def cmd_orbit_scan(args, cfg):
    xs = sorted({Fraction(p, q) for q in range(1, args.max_q + 1) for p in range(q + 1)})
    jobs = [(x, args.max_n, cfg.work_cap) for x in xs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_orbit_row, jobs, chunksize=64))
    else:
        rows = [_orbit_row(j) for j in jobs]
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["classification"]] = counts.get(r["classification"], 0) + 1
    return {"rows": rows, "counts": counts}, EXIT_PASS


# -- parser --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--kappa-width", dest="kappa_width", help="width of the kappa_2 enclosure")
    p.add_argument("--bigint-bits", dest="bigint_bits", type=int,
                   help="largest 2^e exponent materialized in exact mode")
    p.add_argument("--work-cap", dest="work_cap", type=int,
                   help="cap on partial-quotient sums while iterating")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--jobs", type=int, help="worker processes for scans")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmfold", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        p.set_defaults(func=func)
        return p

    qm = top.add_parser("qm", help="question-mark function").add_subparsers(dest="cmd", required=True)
    leaf(qm, "eval", cmd_qm_eval, "?(p/q) as num/2^exp").add_argument("x", type=parse_rational)
    leaf(qm, "invert", cmd_qm_invert, "continued fraction of ?^-1(m/2^e)").add_argument("d", type=parse_dyadic)
    p = leaf(qm, "iterate", cmd_qm_iterate, "f_1(x), ..., f_n(x)")
    p.add_argument("x", type=parse_rational)
    p.add_argument("--n", type=int, default=1)

    cfp = top.add_parser("cf", help="continued fractions").add_subparsers(dest="cmd", required=True)
    leaf(cfp, "of", cmd_cf_of, "expansion of p/q").add_argument("x", type=parse_rational)
    leaf(cfp, "to", cmd_cf_to, "value of [a1,...]").add_argument("a", type=parse_cf)
    leaf(cfp, "canon", cmd_cf_canon, "canonical form of [a1,...]").add_argument("a", type=parse_cf)

    fold = top.add_parser("fold", help="folding steps").add_subparsers(dest="cmd", required=True)
    for name, func, text in (("step", cmd_fold_step, "one fold of an image expansion"),
                             ("bounds", cmd_fold_bounds, "expansions bracketing the cylinder image")):
        p = leaf(fold, name, func, text)
        p.add_argument("--image", type=parse_cf, required=True)
        p.add_argument("--parity", choices=("even", "odd"), required=True,
                       help="parity of the index of the folded quotient")
        p.add_argument("--s", type=int, required=True)

    sm = top.add_parser("setm", help="set M specs").add_subparsers(dest="cmd", required=True)
    p = leaf(sm, "gen", cmd_setm_gen, "spec with minimal slacks")
    p.add_argument("--blocks", type=parse_blocks, required=True, help='e.g. "[[2],[1],[]]"')
    p.add_argument("--extra", type=int, default=0, help="added to every minimal slack")
    leaf(sm, "certify", cmd_setm_certify, "slack certificate").add_argument("spec")
    p = leaf(sm, "image", cmd_setm_image, "image expansion and its certificate")
    p.add_argument("spec")
    p.add_argument("--depth", type=int)
    p.add_argument("--mode", choices=("exact", "symbolic"), default="exact")
    leaf(sm, "avg", cmd_setm_avg, "running averages at block boundaries").add_argument("spec")

    ch = top.add_parser("cahen", help="Cahen's constant").add_subparsers(dest="cmd", required=True)
    p = leaf(ch, "verify", cmd_cahen_verify, "membership and expansion checks")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--digits", type=int, default=200)

    dv = top.add_parser("deriv", help="difference quotients").add_subparsers(dest="cmd", required=True)
    p = leaf(dv, "table", cmd_deriv_table, "cylinder quotient table per iteration level")
    p.add_argument("spec")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--depth", type=int)

    ob = top.add_parser("orbit", help="orbits of ?").add_subparsers(dest="cmd", required=True)
    p = leaf(ob, "scan", cmd_orbit_scan, "classify orbits of all p/q with q <= max-q")
    p.add_argument("--max-q", dest="max_q", type=int, default=50)
    p.add_argument("--max-n", dest="max_n", type=int, default=64)
    return parser


def _render(report: Any, cfg: RunConfig) -> str:
    if cfg.format == "json":
        return dumps(report)
    rows = report.get("rows") if isinstance(report, dict) else None
    if rows is None:
        raise ValueError("csv output needs a tabular report")
    return to_csv(rows)


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        report, code = args.func(args, cfg)
        text = _render(report, cfg)
    except (deriv.EndpointCapped, cf.CapExceeded, folding.SymbolicOnly) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code
