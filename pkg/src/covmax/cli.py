"""covmax command line: analyze, certify, series, tables, catalog.

Exit codes: 0 ran to completion, 1 input error, 2 internal check failure,
3 table mismatch.  Verdicts are reported as data and never change the code.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import catalog, certify, delone, io, series
from .forms import QForm

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_MISMATCH = 0, 1, 2, 3


class InputError(Exception):
    pass


class CheckFailure(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    catalog: str | None = None
    form_path: str | None = None
    fmt: str = "text"
    strength_cap: int = certify.DEFAULT_STRENGTH_CAP
    max_dim: int = delone.MAX_DIM
    seed: int = 0
    perturb: int = 0
    jobs: int = 1
    out: str | None = None
    n: int | None = None
    verify: bool = False
    rows: tuple[str, ...] = ()

    def __post_init__(self):
        if self.command in ("analyze", "certify") and (self.catalog is None) == (self.form_path is None):
            raise InputError(f"{self.command} needs exactly one of --catalog or --form")
        if self.command == "series" and self.n is None:
            raise InputError("series needs --n")
        if self.strength_cap < 1:
            raise InputError("--strength-cap must be positive")
        if self.jobs < 1:
            raise InputError("--jobs must be positive")


def _load(cfg: RunConfig) -> tuple[str | None, QForm, list | None]:
    if cfg.catalog is not None:
        try:
            e = catalog.get(cfg.catalog)
        except catalog.UnknownLattice as err:
            raise InputError(err.args[0]) from None
        return e.name, e.gram, e.aut_generators
    try:
        data = json.loads(Path(cfg.form_path).read_text())
    except OSError as err:
        raise InputError(f"cannot read {cfg.form_path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{cfg.form_path}: invalid JSON ({err})") from None
    try:
        q, gens = io.form_from_json(data)
    except io.FormParseError as err:
        raise InputError(f"{cfg.form_path}: {err}") from None
    return data.get("name"), q, gens


def _subdivide(cfg: RunConfig, q: QForm, gens) -> delone.DeloneSubdivision:
    try:
        return delone.enumerate_delone(q, gens, max_dim=cfg.max_dim)
    except delone.DimensionRefused as err:
        raise InputError(str(err)) from None
    except ValueError as err:  # generator does not preserve the form
        raise InputError(str(err)) from None
    except delone.DeloneError as err:
        raise CheckFailure(str(err)) from None


def cmd_analyze(cfg: RunConfig) -> tuple[dict, str]:
    name, q, gens = _load(cfg)
    sub = _subdivide(cfg, q, gens)
    mu, idx = certify.attaining_cells(sub)
    for i in idx:
        c = sub.cells[i]
        if not delone.verify_empty_sphere(q, c.center, c.sq_radius, c.vertices):
            raise CheckFailure(f"empty-sphere certification failed at {list(map(str, c.center))}")
    doc = {
        "name": name,
        "form": io.form_to_json(q),
        "mu": io.rat(mu),
        "subdivision": io.subdivision_to_json(sub),
        "holes": [io.cell_to_json(sub.cells[i]) | {"n_closest": len(sub.cells[i].vertices)} for i in idx],
    }
    lines = [
        f"lattice      {name or cfg.form_path}",
        f"dimension    {q.n}",
        f"mu           {io.rat(mu)}",
        f"classes      {len(sub.cells)}",
        f"orbits       {sub.n_orbits if sub.n_orbits is not None else 'n/a (no generators)'}",
        "deep holes:",
    ]
    for i in idx:
        c = sub.cells[i]
        lines.append(f"  center ({', '.join(io.rats(c.center))})  |Min_c| = {len(c.vertices)}")
    return doc, "\n".join(lines) + "\n"


def cmd_certify(cfg: RunConfig) -> tuple[dict, str]:
    name, q, gens = _load(cfg)
    sub = _subdivide(cfg, q, gens)
    cert = certify.classify(q, gens, cap=cfg.strength_cap, sub=sub, name=name, jobs=cfg.jobs)
    doc = io.certificate_to_json(cert)
    lines = [
        f"lattice            {name or cfg.form_path}",
        f"mu                 {io.rat(cert.mu)}",
        f"classes / orbits   {cert.n_classes} / {cert.n_orbits}",
        f"|Min_c|            {', '.join(map(str, cert.closest_counts))}",
        f"design strength    {', '.join(map(str, cert.strengths))}",
        f"perfect            {cert.perfect}",
        f"eutaxy             {cert.eutaxy_tier}",
        f"morse nondegen.    {cert.morse_nondegenerate}",
        f"barnes-dickson     {cert.barnes_dickson}",
        f"verdict            {cert.verdict}",
        f"flags              {', '.join(cert.flags) or '-'}",
    ]
    if cfg.perturb > 0:
        cells = [h.cell for h in cert.holes]
        deltas = certify.perturbation_deltas(q, cells, count=cfg.perturb, seed=cfg.seed)
        doc["perturbation"] = {
            "seed": cfg.seed,
            "count": cfg.perturb,
            "decreasing": int(sum(d < 0 for d in deltas)),
            "max_delta": float(max(deltas)),
        }
        lines.append(f"perturbations      {doc['perturbation']['decreasing']}/{cfg.perturb} decrease gamma")
    return doc, "\n".join(lines) + "\n"


def cmd_series(cfg: RunConfig) -> tuple[dict, str]:
    try:
        inst = series.build(cfg.n)
    except series.SeriesRefused as err:
        raise InputError(str(err)) from None
    if cfg.verify:
        rep = series.verify(inst)
        doc = io.series_report_to_json(rep, inst.form)
        lines = [
            f"{'n':>3} {'mu_P':>8} {'V_n':>12} {'residue':>8}  verdict",
            f"{rep.n:>3} {io.rat(rep.mu):>8} {io.rat(rep.V):>12} {io.rat(rep.identity_residue):>8}  {rep.verdict}",
        ]
        lines += [f"  failed: {f}" for f in rep.failures]
        if rep.failures:
            sys.stdout.write("\n".join(lines) + "\n")
            raise CheckFailure(f"series n={cfg.n}: {len(rep.failures)} identity checks failed")
        return doc, "\n".join(lines) + "\n"
    eut = inst.eutaxy_coefficients()
    doc = {
        "n": inst.n,
        "form": io.form_to_json(inst.form),
        "mu": io.rat(inst.mu_P),
        "center": io.rats(inst.c_P),
        "V": io.rat(inst.V),
        "n_vertices": len(inst.P_vertices()),
        "eutaxy_coefficients": {k: io.rat(v) for k, v in sorted(eut.items())},
        "aut_order": inst.aut_order,
    }
    lines = [
        f"n = {inst.n}: mu_P = {io.rat(inst.mu_P)}, V_n = {io.rat(inst.V)}, |P_n| = {doc['n_vertices']}",
        "eutaxy coefficients: " + ", ".join(f"{k} = {v}" for k, v in doc["eutaxy_coefficients"].items()),
        "(closed forms only; pass --verify for the exact identity suite)",
    ]
    return doc, "\n".join(lines) + "\n"


def cmd_tables(cfg: RunConfig) -> tuple[dict, str, bool]:
    rows, ok = [], True
    names = list(cfg.rows) or catalog.TABLE_ROWS
    stream = cfg.fmt == "text" and cfg.out is None
    lines = [f"{'name':<6} {'orbits':>11} {'|Min_c|':>13} {'strength':>9}  {'time':>6}  status"]
    if stream:
        print(lines[0], flush=True)
    for name in names:
        try:
            e = catalog.get(name)
        except catalog.UnknownLattice as err:
            raise InputError(err.args[0]) from None
        if e.expected is None:
            raise InputError(f"{name} has no tabulated row")
        t0 = time.perf_counter()
        sub = _subdivide(cfg, e.gram, e.aut_generators)
        cert = certify.classify(e.gram, e.aut_generators, cap=cfg.strength_cap, sub=sub, name=name, jobs=cfg.jobs)
        dt = time.perf_counter() - t0
        got = (sub.n_orbits, cert.closest_counts, cert.strengths)
        exp = e.expected
        match = got == (exp.orbits, [exp.closest], [exp.strength])
        ok &= match
        rows.append(
            {
                "name": name,
                "source": exp.source,
                "computed": {"orbits": got[0], "closest": got[1], "strength": got[2]},
                "expected": {"orbits": exp.orbits, "closest": exp.closest, "strength": exp.strength},
                "match": match,
            }
        )
        c = f"{got[0]}/{exp.orbits}"
        m = f"{'/'.join(map(str, got[1]))}/{exp.closest}"
        s = f"{'/'.join(map(str, got[2]))}/{exp.strength}"
        lines.append(f"{name:<6} {c:>11} {m:>13} {s:>9}  {dt:5.1f}s  {'ok' if match else 'MISMATCH'}")
        if stream:
            print(lines[-1], flush=True)
    lines.append("(computed/expected)")
    if stream:
        print(lines[-1])
    return {"rows": rows, "all_match": ok}, "\n".join(lines) + "\n", ok


def cmd_catalog(cfg: RunConfig) -> tuple[dict, str]:
    entries = [catalog.get(nm) for nm in catalog.names()]
    doc = {"lattices": [e.to_json() for e in entries]}
    lines = []
    for e in entries:
        row = f"  tabulated {e.expected.orbits}, {e.expected.closest}, {e.expected.strength}" if e.expected else ""
        lines.append(f"{e.name:<7} n = {e.gram.n}{row}")
    return doc, "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covmax", description="Exact covering-radius extremality toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text", dest="fmt")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--strength-cap", type=int, default=certify.DEFAULT_STRENGTH_CAP, help="largest design strength tested")
    common.add_argument("--max-dim", type=int, default=delone.MAX_DIM, help="dimension limit for enumeration")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-cell work")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled perturbations")
    for cmd in ("analyze", "certify"):
        sp = sub.add_parser(cmd, parents=[common])
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--catalog", metavar="NAME", help="built-in or JSON-supplied lattice")
        src.add_argument("--form", metavar="FILE", dest="form_path", help="JSON file with a rational Gram matrix")
        if cmd == "certify":
            sp.add_argument("--perturb", type=int, default=0, help="float perturbation samples (0 = off)")
    sp = sub.add_parser("series", parents=[common])
    sp.add_argument("--n", type=int, required=True, help="dimension, at least 6")
    sp.add_argument("--verify", action="store_true", help="run the exact verification instead of printing closed forms")
    sp = sub.add_parser("tables", parents=[common])
    sp.add_argument("rows", nargs="*", metavar="NAME", help="restrict to these rows")
    sub.add_parser("catalog", parents=[common])
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        catalog=getattr(ns, "catalog", None),
        form_path=getattr(ns, "form_path", None),
        fmt=ns.fmt,
        strength_cap=ns.strength_cap,
        max_dim=ns.max_dim,
        seed=ns.seed,
        perturb=getattr(ns, "perturb", 0),
        jobs=ns.jobs,
        out=ns.out,
        n=getattr(ns, "n", None),
        verify=getattr(ns, "verify", False),
        rows=tuple(getattr(ns, "rows", ())),
    )


def _emit(cfg: RunConfig, doc: dict, text: str, already_printed: bool = False) -> None:
    body = io.dumps(doc) if cfg.fmt == "json" else text
    if cfg.out:
        Path(cfg.out).write_text(body)
    elif not already_printed:
        sys.stdout.write(body)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        cfg = _config(ns)
        if cfg.command == "tables":
            doc, text, ok = cmd_tables(cfg)
            _emit(cfg, doc, text, already_printed=cfg.fmt == "text" and cfg.out is None)
            return EXIT_OK if ok else EXIT_MISMATCH
        handler = {"analyze": cmd_analyze, "certify": cmd_certify, "series": cmd_series, "catalog": cmd_catalog}
        doc, text = handler[cfg.command](cfg)
        _emit(cfg, doc, text)
        return EXIT_OK
    except InputError as err:
        print(f"covmax: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except CheckFailure as err:
        print(f"covmax: check failed: {err}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
