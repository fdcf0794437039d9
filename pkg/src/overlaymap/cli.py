"""Command-line entry point: ``overlaymap <subcommand> ...``.

Exit codes: 0 success, 1 data or processing error, 2 usage error.
Every flag may also be given in a ``--config`` file of ``key=value`` lines
(``#`` comments allowed); flags on the command line win. The basemap path
defaults to ``$OVERLAYMAP_BASEMAP``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analytics import DiversityReport, diversity, growth_rates, min_sample_size, normalize_overlay
from .basemap import DEFAULT_FACTORS, Basemap, build_basemap, load_basemap
from .ingest import (
    OverlayVector,
    ParseError,
    overlay_from_records,
    overlay_from_rows,
    parse_analyze_text,
    parse_tagged_text,
    read_text,
    sniff_format,
)
from .layout import LayoutConfig
from .matrix import load_citation_matrix
from .network import DEFAULT_THRESHOLD
from .registry import load_registry, parse_color
from .render import RenderOptions, read_pajek_vec, render_svg, write_pajek_net, write_pajek_vec

BASEMAP_ENV = "OVERLAYMAP_BASEMAP"
log = logging.getLogger("overlaymap")


class UsageError(Exception):
    pass


def write_atomic(outputs: dict[Path, str]) -> None:
    """Write every file via a temporary sibling and ``os.replace``.

    All contents are already rendered when this is called, so a failing
    subcommand never leaves partial files behind.
    """
    for path, text in outputs.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# -- input loading -------------------------------------------------------------


def load_overlay(
    path: str,
    basemap: Basemap,
    fmt: str = "auto",
    counting: str = "whole",
    label: str | None = None,
    year: int | None = None,
) -> OverlayVector:
    text = read_text(Path(path))
    kind = sniff_format(text) if fmt == "auto" else fmt
    label = label if label is not None else Path(path).stem
    registry = basemap.registry
    if kind == "vec":
        vec = read_pajek_vec(text, label=label)
        if vec.size != basemap.size:
            raise ParseError(f"{path}: .vec has {vec.size} vertices, basemap has {basemap.size}")
        vec.year = year
        return vec
    if kind == "tagged":
        records = parse_tagged_text(text)
        return overlay_from_records(records, registry, counting=counting, label=label, year=year)
    try:
        rows = parse_analyze_text(text)
    except ParseError as exc:
        if fmt == "auto":
            raise ParseError(
                f"{path}: could not detect the input format. Expected a tagged-field export "
                "(lines like 'SC Physics, Applied'), an Analyze.txt tally "
                "('name<TAB>count' lines) or a Pajek .vec; use --format to force one"
            ) from exc
        raise ParseError(f"{path}: {exc}") from exc
    return overlay_from_rows(rows, registry, label=label, year=year)


def _render_options(args: argparse.Namespace) -> RenderOptions:
    labels: str | int = args.labels
    if labels not in ("on", "off"):
        labels = int(labels)
    return RenderOptions(
        scale=args.scale,
        size_mapping=args.size_mapping,
        labels=labels,
        font_size=args.font_size,
        edge_threshold=args.edge_threshold,
        width=args.width,
        height=args.height,
        color_by=args.color_by,
    )


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, [], "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _load_factor_labels(path: str) -> tuple[list[str], list[tuple[int, int, int]]]:
    labels, palette = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        label, _, colour = line.partition("\t")
        labels.append(label.strip())
        palette.append(parse_color(colour))
    return labels, palette


# -- subcommands -------------------------------------------------------------


def cmd_basemap(args: argparse.Namespace) -> int:
    _require(args, "matrix", "registry", "out")
    if not 0.0 <= args.tau < 1.0:
        raise UsageError(f"--tau must lie in [0, 1), got {args.tau}")
    if args.factors < 1:
        raise UsageError("--factors must be >= 1")
    registry = load_registry(args.registry)
    matrix = load_citation_matrix(args.matrix, registry)
    labels = palette = None
    if args.factor_labels:
        labels, palette = _load_factor_labels(args.factor_labels)
        if len(labels) != args.factors:
            raise ValueError(f"{args.factor_labels} has {len(labels)} labels; --factors is {args.factors}")
    config = LayoutConfig(seed=args.seed, max_steps=args.max_steps, tol=args.tol)
    bm, layout, _, fa = build_basemap(
        matrix,
        registry,
        threshold=args.tau,
        n_factors=args.factors,
        config=config,
        include_diagonal=not args.exclude_diagonal,
        labels=labels,
        palette=palette,
    )
    outputs = {Path(args.out): bm.serialize()}
    if args.net:
        outputs[Path(args.net)] = write_pajek_net(bm)
    if args.svg:
        outputs[Path(args.svg)] = render_svg(bm, None, _render_options(args))
    write_atomic(outputs)
    print(f"{bm.size} nodes, {bm.network.n_edges} edges, {bm.n_factors} factors")
    print(f"citations: {matrix.total}")
    print("factor sizes: " + " ".join(str(n) for n in bm.factor_sizes()))
    print(f"stress: {layout.initial_stress:.6g} -> {layout.final_stress:.6g} after {layout.steps} steps ({layout.reason})")
    if fa.ties:
        print(f"factor ties broken by lowest index for categories: {list(fa.ties)}")
    print(f"basemap hash: {bm.content_hash()}")
    return 0


def cmd_overlay(args: argparse.Namespace) -> int:
    _require(args, "basemap", "input", "out_prefix")
    bm = load_basemap(args.basemap)
    vec = load_overlay(args.input, bm, args.format, args.counting, args.label, args.year)
    shown = normalize_overlay(vec, args.normalize)
    prefix = args.out_prefix
    unmatched = "raw_name\tcount\n" + "".join(f"{name}\t{count:g}\n" for name, count in vec.unmatched)
    opts = _render_options(args)
    outputs = {
        Path(prefix + ".vec"): write_pajek_vec(shown),
        Path(prefix + ".svg"): render_svg(bm, shown, opts),
        Path(prefix + ".unmatched.tsv"): unmatched,
    }
    write_atomic(outputs)
    print(f"total documents: {vec.total_documents}")
    if vec.unmatched:
        print(f"unmatched categories: {len(vec.unmatched)} (see {prefix}.unmatched.tsv)", file=sys.stderr)
    print("top categories:")
    for cid, count in vec.top(5):
        print(f"  {bm.registry.categories[cid].name}\t{count:g}")
    return 0


def cmd_reliability(args: argparse.Namespace) -> int:
    _require(args, "p", "m")
    p, m, sigma = args.p, args.m, args.sigma
    if not 0 < p < 1:
        raise UsageError(f"--p must lie in (0, 1), got {p}")
    if not 0 < m < p:
        raise UsageError(f"--m must lie in (0, p), got m={m}, p={p}")
    if not 0 < sigma < 0.5:
        raise UsageError(f"--sigma must lie in (0, 0.5), got {sigma}")
    res = min_sample_size(p, m, sigma, conservative=args.conservative)
    npq = res.n * p * (1 - p)
    print(f"minimum sample size: {res.n}")
    print(f"unrounded: {res.unrounded:.6f}")
    print(f"z (one-sided, sigma={sigma:g}): {res.z:.6f}")
    verdict = "valid" if res.normal_approx_ok else "NOT valid"
    print(f"normal approximation {verdict}: N={res.n} (>=50 required), Np(1-p)={npq:.4g} (>=9 required)")
    return 0


def _parse_year_input(item: str) -> tuple[int, str]:
    year, sep, path = item.partition("=")
    if not sep:
        raise UsageError(f"--input expects YEAR=PATH, got {item!r}")
    try:
        return int(year), path
    except ValueError:
        raise UsageError(f"--input year {year!r} is not an integer") from None


def cmd_growth(args: argparse.Namespace) -> int:
    _require(args, "basemap", "out_prefix")
    inputs = [_parse_year_input(s) for s in (args.input or [])]
    if len(inputs) < 2:
        raise UsageError("growth needs at least two --input YEAR=PATH options")
    years = [y for y, _ in inputs]
    if len(set(years)) != len(years):
        raise UsageError(f"duplicate years among inputs: {sorted(years)}")
    bm = load_basemap(args.basemap)
    series = [
        load_overlay(path, bm, args.format, args.counting, label=str(year), year=year)
        for year, path in sorted(inputs)
    ]
    growth = growth_rates(series)
    lines = ["id\tname\tgrowth"]
    for c in bm.registry.categories:
        g = growth.values[c.id]
        lines.append(f"{c.id}\t{c.name}\t{'undefined' if np.isnan(g) else repr(float(g))}")
    table = "\n".join(lines) + "\n"
    sizes = np.abs(growth.values)
    opts = _render_options(args)
    outputs = {
        Path(args.out_prefix + ".tsv"): table,
        Path(args.out_prefix + ".svg"): render_svg(bm, sizes, opts),
    }
    write_atomic(outputs)
    defined = int(growth.defined.sum())
    print(f"average annual growth {growth.first_year}-{growth.last_year}: {defined} of {bm.size} categories defined")
    sys.stdout.write(table)
    return 0


def cmd_diversity(args: argparse.Namespace) -> int:
    _require(args, "basemap", "input")
    bm = load_basemap(args.basemap)
    vec = load_overlay(args.input, bm, args.format, args.counting)
    if vec.counts.sum() <= 0:
        raise ValueError("overlay has no matched documents")
    rep = diversity(vec, bm.similarity)
    print(f"variety: {rep.variety}")
    print(f"balance: {rep.balance:.6f}")
    print(f"disparity: {rep.disparity:.6f}")
    print(f"rao_stirling: {rep.rao_stirling:.6f}")
    print(f"note: {DiversityReport.CONVENTION}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    _require(args, "basemap", "what", "out")
    bm = load_basemap(args.basemap)
    if args.what == "net":
        text = write_pajek_net(bm)
    elif args.what == "svg":
        text = render_svg(bm, None, _render_options(args))
    elif args.what == "factors":
        rows = ["id\tname\tfactor\tlabel"]
        for c in bm.registry.categories:
            rows.append(f"{c.id}\t{c.name}\t{c.macro_id}\t{bm.registry.macros[c.macro_id].label}")
        text = "\n".join(rows) + "\n"
    elif args.what == "similarity":
        rows = ["\t".join(bm.registry.names)]
        rows += ["\t".join(repr(float(v)) for v in row) for row in bm.similarity.values]
        text = "\n".join(rows) + "\n"
    else:
        raise UsageError(f"unknown export kind {args.what!r}")
    write_atomic({Path(args.out): text})
    print(f"wrote {args.what} to {args.out}")
    return 0


# -- parser --------------------------------------------------------------------


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("rendering")
    g.add_argument("--scale", type=float, default=1.0, help="node size multiplier")
    g.add_argument("--size-mapping", choices=["sqrt", "linear"], default="sqrt")
    g.add_argument("--labels", default="off", help="'on', 'off' or top-k count")
    g.add_argument("--font-size", type=float, default=9.0)
    g.add_argument("--edge-threshold", type=float, default=None, help="render-only edge cut (>= basemap tau)")
    g.add_argument("--width", type=int, default=900)
    g.add_argument("--height", type=int, default=900)
    g.add_argument("--color-by", choices=["factor", "uniform"], default="factor")


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["auto", "analyze", "tagged", "vec"], default="auto")
    p.add_argument("--counting", choices=["whole", "fractional"], default="whole")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="overlaymap", description="Science overlay maps on a category basemap.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value file supplying defaults for any flag")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    env_basemap = os.environ.get(BASEMAP_ENV)

    p = sub.add_parser("basemap", help="build a basemap from a citation matrix")
    p.add_argument("--matrix")
    p.add_argument("--registry")
    p.add_argument("--tau", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--factors", type=int, default=DEFAULT_FACTORS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclude-diagonal", action="store_true", help="drop self-citation columns per pair")
    p.add_argument("--factor-labels", help="file of 'label<TAB>#rrggbb' lines, one per factor")
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out")
    p.add_argument("--net", help="also write a Pajek .net file")
    p.add_argument("--svg", help="also write the bare basemap as SVG")
    _add_render_flags(p)
    p.set_defaults(func=cmd_basemap)

    p = sub.add_parser("overlay", help="project a document set onto a basemap")
    p.add_argument("--basemap", default=env_basemap)
    p.add_argument("--input")
    _add_input_flags(p)
    p.add_argument("--label")
    p.add_argument("--year", type=int)
    p.add_argument("--normalize", choices=["raw", "by_total"], default="raw")
    p.add_argument("--out-prefix")
    _add_render_flags(p)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("reliability", help="minimum papers for a reliable category")
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--conservative", action="store_true", help="round up instead of to nearest")
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("growth", help="average annual growth overlay")
    p.add_argument("--basemap", default=env_basemap)
    p.add_argument("--input", action="append", help="YEAR=PATH, repeatable")
    _add_input_flags(p)
    p.add_argument("--out-prefix")
    _add_render_flags(p)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("diversity", help="variety, balance, disparity and Rao-Stirling")
    p.add_argument("--basemap", default=env_basemap)
    p.add_argument("--input")
    _add_input_flags(p)
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("export", help="export basemap contents")
    p.add_argument("--basemap", default=env_basemap)
    p.add_argument("--what", choices=["net", "svg", "factors", "similarity"], default="net")
    p.add_argument("--out")
    _add_render_flags(p)
    p.set_defaults(func=cmd_export)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args: argparse.Namespace) -> argparse.Namespace:
    values = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in known or key in ("help", "func"):
            raise UsageError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in raw.split(",") if v.strip()]
        else:
            defaults[key] = action.type(raw) if action.type else raw
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"overlaymap: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"overlaymap: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
