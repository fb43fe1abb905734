"""Command line front end: ``knightmove <command> [input] [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import BudgetExceeded, KnightMoveError, PDParseError, ValidationError
from .grading import DimTable

THREADS_ENV = "KNIGHTMOVE_THREADS"
FORMATS = ("grid", "json", "csv")


@dataclass(frozen=True)
class RunConfig:
    command: str
    catalog: str | None = None
    pd: str | None = None
    braid: str | None = None
    strands: int | None = None
    table: str | None = None
    fmt: str = "grid"
    s: int | None = None
    max_direct: int = 14
    threads: int = 1
    checkpoint: str | None = None
    budget_mem: float | None = None
    budget_time: float | None = None

    def __post_init__(self):
        for name in ("max_direct", "threads", "budget_mem", "budget_time"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValidationError(f"--{name.replace('_', '-')} must be positive")
        if self.fmt not in FORMATS:
            raise ValidationError(f"unknown format {self.fmt!r}")

    def sources(self) -> list[str]:
        return [n for n, v in (("--catalog", self.catalog), ("--pd", self.pd),
                               ("--braid", self.braid), ("--table", self.table)) if v is not None]

    def budget(self):
        from .scan import Budget

        return Budget(seconds=self.budget_time, memory_mb=self.budget_mem)


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV}={env!r} is not an integer") from None
        if n <= 0:
            raise ValidationError(f"{THREADS_ENV} must be positive")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------- inputs


def load_diagram(cfg: RunConfig):
    from .knotio import catalog_get, from_braid, parse_pd

    if cfg.catalog is not None:
        return catalog_get(cfg.catalog)
    if cfg.pd is not None:
        path = Path(cfg.pd)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
        if not text.strip() or not any(l.strip() and not l.lstrip().startswith("#") for l in text.splitlines()):
            raise PDParseError(f"{path} contains no PD code")
        return parse_pd(text, name=path.stem)
    if cfg.braid is not None:
        if cfg.strands is None:
            raise ValidationError("--braid needs --strands")
        try:
            word = [int(tok) for tok in cfg.braid.replace(",", " ").split()]
        except ValueError:
            raise PDParseError(f"braid word {cfg.braid!r} is not a list of signed integers") from None
        return from_braid(word, cfg.strands)
    raise ValidationError("no diagram input given (use --catalog, --pd or --braid)")


def load_table(path: str) -> DimTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.endswith(".csv"):
            return DimTable.from_csv(text)
        return DimTable.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise PDParseError(f"{path} is not a table in the i,j,dim schema: {exc}") from None


def require_one_source(cfg: RunConfig, allow_table: bool = False) -> None:
    src = cfg.sources()
    if not allow_table and cfg.table is not None:
        raise ValidationError(f"{cfg.command} does not take --table")
    if len(src) != 1:
        raise ValidationError(f"exactly one input source is required, got {src or 'none'}")


# ---------------------------------------------------------------- computations


def compute_kh(d, cfg: RunConfig) -> DimTable:
    """Direct cube within the crossing cap, otherwise the scan."""
    if d.n <= cfg.max_direct:
        from .khcomplex import khovanov_homology

        return khovanov_homology(d, cfg.max_direct)
    from .scan import reduced_kh

    return reduced_kh(d, cfg.budget(), checkpoint=cfg.checkpoint)


def render_table(tbl: DimTable, fmt: str, extra: dict | None = None) -> str:
    if fmt == "grid":
        return tbl.render_grid()
    if fmt == "csv":
        return tbl.to_csv()
    payload = {"table": json.loads(tbl.to_json())}
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------- commands


def cmd_kh(cfg: RunConfig) -> str:
    require_one_source(cfg)
    d = load_diagram(cfg)
    tbl = compute_kh(d, cfg)
    method = "direct" if d.n <= cfg.max_direct else "scan"
    return render_table(tbl, cfg.fmt, {"crossings": d.n, "method": method, "total_rank": tbl.total()})


def cmd_lee(cfg: RunConfig) -> str:
    from .lee import lee

    require_one_source(cfg)
    d = load_diagram(cfg)
    try:
        res = lee(d, cfg.max_direct)
    except BudgetExceeded as exc:
        raise BudgetExceeded(
            f"{exc}. Lee pages need the filtered complex; for large knots compute the table "
            "with `kh` and run `audit --table <file> --s <s>` for the table-level analysis"
        ) from None
    if cfg.fmt == "json":
        out = {"s": res.s, "pages": res.pages.to_dict(), "decomposition": res.decomposition.to_dict(),
               "nonzero_differentials": res.pages.nonzero_differentials()}
        return json.dumps(out, indent=2) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["page", "i", "j", "dim", "rank_out"])
        for p in res.pages.pages:
            for (i, j), v in p.dims.items():
                w.writerow([p.index, i, j, v, p.diff_ranks.get((i, j), 0)])
        return buf.getvalue()
    lines = [f"s = {res.s}",
             f"nonzero differentials: {', '.join(f'd_{n}' for n in res.pages.nonzero_differentials()) or 'none'}",
             res.pages.render()]
    for l, poly in sorted(res.decomposition.f.items()):
        lines.append(f"f_{2 * l} = {poly}")
    return "\n".join(lines) + "\n"


def _s_for_diagram(d, cfg: RunConfig, meta: dict | None = None) -> int:
    if cfg.s is not None:
        return cfg.s
    if d.n <= cfg.max_direct:
        from .lee import lee

        return lee(d, cfg.max_direct).s
    if meta and "s" in meta:
        return int(meta["s"])
    raise ValidationError(f"{d.n} crossings exceed the direct budget; supply s with --s")


def cmd_audit(cfg: RunConfig) -> str:
    from .audit import alexander, audit_report, report_json

    require_one_source(cfg, allow_table=True)
    pages = None
    alex = None
    if cfg.table is not None:
        if cfg.s is None:
            raise ValidationError("auditing an imported table needs --s")
        tbl = load_table(cfg.table)
        name = Path(cfg.table).stem
        s = cfg.s
    else:
        d = load_diagram(cfg)
        name = d.name
        if d.n <= cfg.max_direct:
            from .lee import lee

            res = lee(d, cfg.max_direct)
            tbl = res.pages.pages[0].dims
            pages = res.pages
            s = res.s if cfg.s is None else cfg.s
        else:
            tbl = compute_kh(d, cfg)
            s = _s_for_diagram(d, cfg, _meta_for(cfg))
        alex = alexander(d)
    rep = audit_report(tbl, s, alex, pages=pages, name=name)
    if cfg.fmt == "json":
        return report_json(rep) + "\n"
    if cfg.fmt == "csv":
        return _batch_csv([_row_from_report(rep, tbl)])
    return rep["summary"] + "\n"


def _meta_for(cfg: RunConfig) -> dict:
    if cfg.catalog is not None:
        from .knotio import catalog_meta

        return catalog_meta(cfg.catalog)
    if cfg.pd is not None:
        return _meta_from_text(Path(cfg.pd).read_text(encoding="utf-8"))
    return {}


def _meta_from_text(text: str) -> dict:
    import re

    meta = {}
    for line in text.splitlines():
        m = re.match(r"#\s*([\w-]+)\s*:\s*(.*)$", line)
        if m:
            meta[m.group(1)] = m.group(2).strip()
    return meta


def cmd_alexander(cfg: RunConfig) -> str:
    from .audit import alexander

    require_one_source(cfg)
    res = alexander(load_diagram(cfg))
    if cfg.fmt == "json":
        return json.dumps(res.to_dict(), indent=2) + "\n"
    fm = res.fox_milnor
    tail = f" (f = {fm.to_dict()['factor']})" if fm.factor is not None else f" ({fm.detail})"
    return f"Alexander polynomial: {res.to_dict()['alexander']}\nFox-Milnor: {fm.status}{tail}\n"


def cmd_jones(cfg: RunConfig) -> str:
    from .jones import kauffman_jones

    require_one_source(cfg)
    j = kauffman_jones(load_diagram(cfg))
    if cfg.fmt == "json":
        return json.dumps({"jones": str(j), "coefficients": {str(k): v for k, v in j.items()}}, indent=2) + "\n"
    return f"{j}\n"


def cmd_catalog(cfg: RunConfig, name: str | None) -> str:
    from .knotio import catalog_get, catalog_meta, catalog_names, catalog_text

    if name:
        return catalog_text(name)
    rows = []
    for n in catalog_names():
        meta = catalog_meta(n)
        d = catalog_get(n)
        rows.append({"name": n, "crossings": d.n, "writhe": d.writhe, "description": meta.get("description", "")})
    if cfg.fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["name", "crossings", "writhe", "description"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    return "".join(f"{r['name']:<16} {r['crossings']:>3}  {r['description']}\n" for r in rows)


BATCH_FIELDS = ["knot", "crossings", "s", "total_rank", "verdict", "witness", "forced", "flag", "error"]


def _row_from_report(rep: dict, tbl: DimTable, crossings: int | None = None) -> dict:
    km = rep["knight_move"]
    forced = ";".join(f"d_{c['n']}:{tuple(c['source'])}->{tuple(c['target'])}" for c in km["certificates"])
    return {
        "knot": rep.get("knot") or "",
        "crossings": "" if crossings is None else crossings,
        "s": rep["s"],
        "total_rank": tbl.total(),
        "verdict": km["verdict"],
        "witness": "" if km["verdict"] == "holds" else str(tuple(km["witness"])),
        "forced": forced,
        "flag": "HIGHER-DIFFERENTIAL" if km["certificates"] else "",
        "error": "",
    }


def _batch_one(args) -> dict:
    path, cfg = args
    from .audit import audit_report
    from .knotio import parse_pd

    name = Path(path).stem
    try:
        text = Path(path).read_text(encoding="utf-8")
        d = parse_pd(text, name=name)
        if cfg.checkpoint is not None:
            # one checkpoint file per knot inside the --checkpoint directory
            Path(cfg.checkpoint).mkdir(parents=True, exist_ok=True)
            cfg = replace(cfg, checkpoint=str(Path(cfg.checkpoint) / f"{name}.scan.gz"))
        tbl = compute_kh(d, cfg)
        s = _s_for_diagram(d, cfg, _meta_from_text(text))
        rep = audit_report(tbl, s, name=name)
        return _row_from_report(rep, tbl, d.n)
    except KnightMoveError as exc:
        row = dict.fromkeys(BATCH_FIELDS, "")
        row.update(knot=name, error=f"{type(exc).__name__}: {exc}")
        logging.getLogger("knightmove.cli").warning("%s: %s", path, exc)
        return row


def _batch_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BATCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_batch(cfg: RunConfig, corpus: str) -> str:
    root = Path(corpus)
    if not root.is_dir():
        raise ValidationError(f"{corpus} is not a directory")
    files = sorted(str(p) for p in root.glob("*.pd"))
    jobs = [(f, cfg) for f in files]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            rows = list(ex.map(_batch_one, jobs))
    else:
        rows = [_batch_one(j) for j in jobs]
    if cfg.fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    return _batch_csv(rows)


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input (exactly one)")
    src.add_argument("--catalog", metavar="NAME", help="bundled knot, see the catalog command")
    src.add_argument("--pd", metavar="FILE", help="PD code file")
    src.add_argument("--braid", metavar="WORD", help="signed generator indices, e.g. '1,1,-2'")
    src.add_argument("--strands", type=int, metavar="N", help="strand count for --braid")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="grid")
    common.add_argument("--max-direct", type=int, default=14, metavar="N",
                        help="largest crossing count for the direct cube (default 14)")
    common.add_argument("--threads", type=int, default=None, metavar="N",
                        help=f"worker processes (default ${THREADS_ENV} or the CPU count)")
    common.add_argument("--checkpoint", metavar="PATH",
                        help="scan checkpoint file, resumed if present (a directory for batch)")
    common.add_argument("--budget-mem", type=float, metavar="MB")
    common.add_argument("--budget-time", type=float, metavar="SECONDS")
    common.add_argument("-v", "--verbose", action="store_true", help="log scan progress to stderr")

    p = argparse.ArgumentParser(prog="knightmove", description="Khovanov homology, Lee spectral sequence and knight-move audits.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("kh", parents=[common], help="Khovanov homology table")
    sub.add_parser("lee", parents=[common], help="Lee spectral sequence pages and s")
    a = sub.add_parser("audit", parents=[common], help="knight-move audit of a diagram or table")
    a.add_argument("--table", metavar="FILE", help="table in the i,j,dim JSON (or CSV) schema")
    a.add_argument("--s", type=int, metavar="S", help="s-invariant (even)")
    sub.add_parser("alexander", parents=[common], help="Alexander polynomial and Fox-Milnor test")
    sub.add_parser("jones", parents=[common], help="Jones polynomial from the Kauffman bracket")
    b = sub.add_parser("batch", parents=[common], help="audit every .pd file in a directory (CSV)")
    b.add_argument("corpus", metavar="DIR")
    b.add_argument("--s", type=int, help=argparse.SUPPRESS)
    c = sub.add_parser("catalog", parents=[common], help="list bundled knots or print one")
    c.add_argument("name", nargs="?")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.command == "batch" and ns.fmt == "grid":
        ns.fmt = "csv"
    return RunConfig(
        command=ns.command,
        catalog=ns.catalog,
        pd=ns.pd,
        braid=ns.braid,
        strands=ns.strands,
        table=getattr(ns, "table", None),
        fmt=ns.fmt,
        s=getattr(ns, "s", None),
        max_direct=ns.max_direct,
        threads=ns.threads if ns.threads is not None else default_threads(),
        checkpoint=ns.checkpoint,
        budget_mem=ns.budget_mem,
        budget_time=ns.budget_time,
    )


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; returns ``(exit code, stdout text, stderr text)``."""
    parser = build_parser()
    err = io.StringIO()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(ns)
        if cfg.s is not None and cfg.s % 2:
            raise ValidationError(f"--s must be even, got {cfg.s}")
        if cfg.command == "kh":
            out = cmd_kh(cfg)
        elif cfg.command == "lee":
            out = cmd_lee(cfg)
        elif cfg.command == "audit":
            out = cmd_audit(cfg)
        elif cfg.command == "alexander":
            out = cmd_alexander(cfg)
        elif cfg.command == "jones":
            out = cmd_jones(cfg)
        elif cfg.command == "batch":
            out = cmd_batch(cfg, ns.corpus)
        else:
            out = cmd_catalog(cfg, ns.name)
    except KnightMoveError as exc:
        err.write(f"knightmove {ns.command}: {type(exc).__name__}: {exc}\n")
        return exc.exit_code, "", err.getvalue()
    return 0, out, err.getvalue()


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
