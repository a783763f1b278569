"""Command-line front end: enumeration, structure-constant tables, verification.

    petersonmap enumerate --type A2 --max-length 3
    petersonmap gr constants --type A1 --max-length 2
    petersonmap qh product --type A2 --parabolic 2 --u s1 --v s1
    petersonmap verify --type A2 --parabolic 2 --max-length 4 --report out.json

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from filelock import FileLock

from . import grring, qhring
from .affweyl import AffineWeylError, AffineWeylElement, affine_weyl_group
from .exactalg import ExactAlgebraError, Poly, format_poly, parse_poly
from .grring import GrRingError, gr_ring
from .peterson import PetersonError, PetersonMap, verify_homomorphism
from .qhring import QHRingError, qh_ring
from .rootdata import ParabolicType, RootDataError, RootSystem, build_root_system, default_rank

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def convention_fingerprint() -> str:
    return f"{grring.CONVENTION};{qhring.convention()}"


# -- run configuration ------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    type_label: str
    rank: int
    parabolic: tuple[int, ...] = ()
    max_length: int | None = None
    threads: int = 1
    non_equivariant: bool = False
    cache_dir: Path | None = None

    @property
    def root_system(self) -> RootSystem:
        return build_root_system(self.type_label, self.rank)

    @property
    def P(self) -> ParabolicType:
        return ParabolicType.of(self.parabolic)

    def cache_key(self, kind: str) -> str:
        digest = hashlib.sha256(convention_fingerprint().encode()).hexdigest()[:12]
        par = "-".join(map(str, self.parabolic)) or "B"
        eq = "neq" if self.non_equivariant else "eq"
        return f"{kind}_{self.type_label}{self.rank}_P{par}_L{self.max_length}_{eq}_{digest}.json"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        text = args.type.strip()
        if not text or text[0] not in "ABCDEFG":
            raise UsageError(f"bad --type {text!r}")
        letter, suffix = text[0], text[1:]
        if suffix and not suffix.isdigit():
            raise UsageError(f"bad --type {text!r}")
        rank = int(suffix) if suffix else None
        if args.rank is not None:
            if rank is not None and rank != args.rank:
                raise UsageError(f"--type {text} conflicts with --rank {args.rank}")
            rank = args.rank
        if rank is None:
            rank = default_rank(letter)
        if rank is None:
            raise UsageError(f"--rank is required for type {letter}")
        try:
            build_root_system(letter, rank)
        except RootDataError as exc:
            raise UsageError(str(exc)) from None
        parabolic = parse_parabolic(getattr(args, "parabolic", ""), rank)
        max_length = getattr(args, "max_length", None)
        if max_length is not None and max_length < 0:
            raise UsageError("--max-length must be non-negative")
        threads = getattr(args, "threads", 1)
        if threads < 0:
            raise UsageError("--threads must be >= 0")
        cache = getattr(args, "cache_dir", None)
        return cls(
            letter, rank, parabolic, max_length, threads,
            bool(getattr(args, "non_equivariant", False)),
            Path(cache) if cache else None,
        )


def parse_parabolic(text: str | None, rank: int) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        idx = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise UsageError(f"bad --parabolic {text!r}") from None
    if any(not 1 <= i <= rank for i in idx):
        raise UsageError(f"--parabolic indices must lie in 1..{rank}")
    return tuple(idx)


# -- tables -----------------------------------------------------------------


@dataclass
class TableFile:
    group_type: str
    rank: int
    parabolic: list[int]
    basis: str  # "xi" or "qh"
    max_length: int | None
    rows: list[dict] = field(default_factory=list)
    convention: str = field(default_factory=convention_fingerprint)
    schema_version: int = SCHEMA_VERSION

    def header(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "group_type": self.group_type,
            "rank": self.rank,
            "parabolic": list(self.parabolic),
            "basis": self.basis,
            "max_length": self.max_length,
            "convention": self.convention,
        }

    def to_json(self) -> str:
        return json.dumps({"header": self.header(), "rows": self.rows}, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        cols = ["u", "v", "z", "coeff"] if self.basis == "xi" else ["u", "v", "beta", "w", "coeff"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([",".join(map(str, row[c])) if c == "beta" else row[c] for c in cols])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "TableFile":
        data = json.loads(text)
        h = data["header"]
        if "schema_version" not in h:
            raise ValueError("table header has no schema_version")
        if h["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {h['schema_version']}")
        return cls(
            h["group_type"], h["rank"], list(h["parabolic"]), h["basis"], h["max_length"],
            list(data["rows"]), h["convention"], h["schema_version"],
        )


def _poly_text(p: Poly, non_equivariant: bool) -> str | None:
    if non_equivariant:
        p = Poly.const(p.nvars, p.constant_term())
    return format_poly(p) if p else None


def gr_table_file(cfg: RunConfig, table: dict) -> TableFile:
    """Serialize {(u, v): {z: Poly}} in the affine text syntax."""
    rs = cfg.root_system
    W = affine_weyl_group(rs)
    keyed = []
    for (u, v), prod in table.items():
        for z, c in prod.items():
            text = _poly_text(c, cfg.non_equivariant)
            if text is None:
                continue
            keyed.append(((W.sort_key(u), W.sort_key(v), W.sort_key(z)),
                          {"u": W.format(u), "v": W.format(v), "z": W.format(z), "coeff": text}))
    keyed.sort(key=lambda kv: kv[0])
    return TableFile(rs.type_label, rs.rank, [], "xi", cfg.max_length, [r for _, r in keyed])


def qh_table_file(cfg: RunConfig, table: dict) -> TableFile:
    """Serialize {(u, v): QuantumClass}; beta is listed over the indices outside P."""
    rs = cfg.root_system
    qh = qh_ring(rs, cfg.P)

    def wkey(w):
        return (w.length, rs.reduced_word(w))

    keyed = []
    for (u, v), prod in table.items():
        for (beta, w), c in prod.items():
            text = _poly_text(c, cfg.non_equivariant)
            if text is None:
                continue
            keyed.append(((wkey(u), wkey(v), beta, wkey(w)), {
                "u": qh.format_weyl(u), "v": qh.format_weyl(v),
                "beta": list(beta), "w": qh.format_weyl(w), "coeff": text,
            }))
    keyed.sort(key=lambda kv: kv[0])
    return TableFile(rs.type_label, rs.rank, list(cfg.parabolic), "qh", cfg.max_length, [r for _, r in keyed])


def read_table(tf: TableFile | str) -> dict:
    """Rebuild the in-memory table; coefficients are parsed back exactly."""
    if isinstance(tf, str):
        tf = TableFile.from_json(tf)
    rs = build_root_system(tf.group_type, tf.rank)
    out: dict = {}
    if tf.basis == "xi":
        W = affine_weyl_group(rs)
        for row in tf.rows:
            key = (W.parse(row["u"]), W.parse(row["v"]))
            out.setdefault(key, {})[W.parse(row["z"])] = parse_poly(row["coeff"], rs.rank)
    elif tf.basis == "qh":
        qh = qh_ring(rs, ParabolicType.of(tf.parabolic))
        for row in tf.rows:
            key = (qh.parse_weyl(row["u"]), qh.parse_weyl(row["v"]))
            out.setdefault(key, {})[(tuple(row["beta"]), qh.parse_weyl(row["w"]))] = parse_poly(
                row["coeff"], rs.rank
            )
    else:
        raise ValueError(f"unknown basis {tf.basis!r}")
    return out


def _gr_worker(args):
    type_label, rank, u_text, v_text = args
    rs = build_root_system(type_label, rank)
    W = affine_weyl_group(rs)
    u, v = W.parse(u_text), W.parse(v_text)
    prod = gr_ring(rs).product(u, v)
    return u_text, v_text, [(W.format(z), format_poly(c)) for z, c in prod.items()]


def compute_gr_table(cfg: RunConfig, pairs: Sequence[tuple[AffineWeylElement, AffineWeylElement]]) -> dict:
    rs = cfg.root_system
    W = affine_weyl_group(rs)
    if cfg.threads == 1 or len(pairs) < 2:
        ring = gr_ring(rs)
        return {(u, v): ring.product(u, v) for u, v in pairs}
    jobs = [(rs.type_label, rs.rank, W.format(u), W.format(v)) for u, v in pairs]
    out = {}
    with ProcessPoolExecutor(max_workers=cfg.threads or None) as pool:
        for ut, vt, terms in pool.map(_gr_worker, jobs, chunksize=4):
            out[(W.parse(ut), W.parse(vt))] = {W.parse(z): parse_poly(c, rs.rank) for z, c in terms}
    return out


def gr_pairs(cfg: RunConfig):
    W = affine_weyl_group(cfg.root_system)
    elems = W.enumerate_waf_minus(cfg.max_length)
    return [(u, v) for u in elems for v in elems]


# -- cache ------------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class TableCache:
    """Keyed table files under one directory, owned by one process at a time."""

    def __init__(self, root: Path, timeout: float = 60.0):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.lock = FileLock(str(self.root / ".lock"), timeout=timeout)

    def load(self, key: str) -> TableFile | None:
        path = self.root / key
        if not path.exists():
            return None
        tf = TableFile.from_json(path.read_text())
        return tf if tf.convention == convention_fingerprint() else None

    def store(self, key: str, tf: TableFile) -> None:
        atomic_write(self.root / key, tf.to_json())


# -- subcommands ------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    cfg = RunConfig.from_args(args)
    rs = cfg.root_system
    rows = []
    if args.finite:
        qh = qh_ring(rs, cfg.P)
        for w in qh.WP:
            if cfg.max_length is not None and w.length > cfg.max_length:
                continue
            rows.append({"element": qh.format_weyl(w), "length": w.length,
                         "word": list(rs.reduced_word(w))})
    else:
        if cfg.max_length is None:
            raise UsageError("--max-length is required unless --finite is given")
        pm = PetersonMap(rs, cfg.P)
        W = pm.W
        for x in W.enumerate_waf_minus(cfg.max_length):
            rows.append({
                "element": W.format(x), "length": W.length(x), "word": list(W.reduced_word(x)),
                "in_WP_af": pm.in_WP_af(x), "condition_C": pm.condition_C(x),
            })
    if args.json:
        _emit(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    cols = list(rows[0]) if rows else ["element", "length", "word"]
    lines = ["\t".join(cols)]
    for r in rows:
        lines.append("\t".join(
            "".join(f"s{i}" for i in r[c]) or "e" if c == "word" else str(r[c]) for c in cols
        ))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _render(tf: TableFile, fmt: str) -> str:
    return tf.to_csv() if fmt == "csv" else tf.to_json()


def cmd_gr_constants(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.parabolic:
        raise UsageError("gr constants does not take --parabolic")
    W = affine_weyl_group(cfg.root_system)
    if args.u or args.v:
        if not (args.u and args.v):
            raise UsageError("--u and --v go together")
        u, v = _parse_affine(W, args.u), _parse_affine(W, args.v)
        pairs = [(u, v)]
        cfg = RunConfig(cfg.type_label, cfg.rank, (), None, cfg.threads, cfg.non_equivariant)
    else:
        if cfg.max_length is None:
            raise UsageError("--max-length is required without --u/--v")
        pairs = gr_pairs(cfg)
    try:
        table = compute_gr_table(cfg, pairs)
    except (ExactAlgebraError, GrRingError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(_render(gr_table_file(cfg, table), args.format), args.out)
    return EXIT_OK


def _parse_affine(W, text: str) -> AffineWeylElement:
    x = W.parse(text) if "lam=" in text else W.parse_word(text)
    if not W.is_coset_min(x):
        raise UsageError(f"{text} is not a minimal coset representative")
    return x


def cmd_qh_product(args) -> int:
    cfg = RunConfig.from_args(args)
    rs = cfg.root_system
    qh = qh_ring(rs, cfg.P)
    try:
        if args.u or args.v:
            if not (args.u and args.v):
                raise UsageError("--u and --v go together")
            try:
                u, v = qh.parse_weyl(args.u), qh.parse_weyl(args.v)
            except QHRingError as exc:
                raise UsageError(str(exc)) from None
            for name, w in (("--u", u), ("--v", v)):
                if w not in qh._wp_set:
                    raise UsageError(f"{name} is not a minimal coset representative for W/W_P")
            table = {(u, v): qh.quantum_product(u, v)}
        else:
            table = {
                k: c for k, c in qh.product_table().items()
                if cfg.max_length is None or max(k[0].length, k[1].length) <= cfg.max_length
            }
    except (ExactAlgebraError, QHRingError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(_render(qh_table_file(cfg, table), args.format), args.out)
    return EXIT_OK


def _inject_qh_table(cfg: RunConfig, tf: TableFile) -> None:
    qh = qh_ring(cfg.root_system, cfg.P)
    loaded = read_table(tf)
    full = {(u, v): loaded.get((u, v), {}) for u in qh.WP for v in qh.WP}
    with qh._lock:
        if qh._table is None:
            qh._table = full


def cmd_verify(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.max_length is None:
        raise UsageError("--max-length is required")
    rs = cfg.root_system
    gr_table = None
    cache = TableCache(cfg.cache_dir) if cfg.cache_dir else None
    try:
        if cache is not None:
            with cache.lock:
                eq_cfg = RunConfig(cfg.type_label, cfg.rank, (), cfg.max_length)
                key = eq_cfg.cache_key("gr")
                tf = cache.load(key)
                if tf is None:
                    table = compute_gr_table(cfg, gr_pairs(cfg))
                    cache.store(key, gr_table_file(eq_cfg, table))
                    gr_table = table
                else:
                    gr_table = read_table(tf)
                qcfg = RunConfig(cfg.type_label, cfg.rank, cfg.parabolic, None)
                qkey = qcfg.cache_key("qh")
                qtf = cache.load(qkey)
                if qtf is None:
                    qh = qh_ring(rs, cfg.P)
                    cache.store(qkey, qh_table_file(qcfg, qh.product_table()))
                else:
                    _inject_qh_table(qcfg, qtf)
        report = verify_homomorphism(
            rs, cfg.P, cfg.max_length, threads=cfg.threads,
            gr_table=gr_table, non_equivariant=cfg.non_equivariant,
        )
    except (ExactAlgebraError, GrRingError, QHRingError, PetersonError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    data = report.to_dict(with_timing=not args.omit_timing)
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if args.report:
        atomic_write(Path(args.report), text)
    else:
        sys.stdout.write(text)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: {rs.label} P={list(cfg.parabolic)} max_length={cfg.max_length} "
        f"pairs={report.pairs_checked} failures={len(report.failures)}",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_FAIL


# -- argument parsing -------------------------------------------------------


def _common(p: argparse.ArgumentParser, parabolic: bool = True) -> None:
    p.add_argument("--type", required=True, help="type letter A-G, optionally with rank (A2)")
    p.add_argument("--rank", type=int, default=None)
    if parabolic:
        p.add_argument("--parabolic", default="", help="comma-separated indices in I_P; empty = Borel")
    p.add_argument("--max-length", dest="max_length", type=int, default=None)
    p.add_argument("--non-equivariant", dest="non_equivariant", action="store_true")
    p.add_argument("--threads", type=int, default=1, help="worker processes (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="petersonmap", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list W_af^- (or W^P with --finite)")
    _common(p)
    p.add_argument("--finite", action="store_true", help="list W^P instead of W_af^-")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    gr = sub.add_parser("gr", help="affine Grassmannian tables").add_subparsers(dest="gr_command", required=True)
    p = gr.add_parser("constants", help="structure constants of xi_u . xi_v")
    _common(p)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gr_constants)

    qh = sub.add_parser("qh", help="quantum cohomology tables").add_subparsers(dest="qh_command", required=True)
    p = qh.add_parser("product", help="sigma_u * sigma_v, or the full table")
    _common(p)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_qh_product)

    p = sub.add_parser("verify", help="check that the Peterson map is a ring homomorphism")
    _common(p)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--omit-timing", dest="omit_timing", action="store_true",
                   help="leave the timing block out of the report")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, RootDataError, AffineWeylError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ExactAlgebraError, GrRingError, QHRingError, PetersonError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
