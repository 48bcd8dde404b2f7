"""Command line front end: run any prefix of the pipeline from a config file.

Stages: nbr -> overlap -> gifs -> reduce -> dim -> render.  Every artifact is
written under a content-addressed name (``<stage>-<hash>.<ext>``) and copied
to ``<stage>.latest.<ext>``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .config import PipelineConfig, default_out_dir, parse_config
from .dimension import (WeightedGifs, char_poly, dimension_report, hausdorff_dim,
                        incidence_matrix)
from .errors import BudgetError, ConfigError, GifsError, NonConvergence, ValidationError
from .gifsbuild import build_gifs, validate_gifs
from .nbrgraph import BuildOptions, build_neighbor_graph, extract_overlap_graph, quotient_vertices
from .reduce import flag_degenerate, reduce_system, verify_identifications
from . import render

logger = logging.getLogger("overlapgifs")

STAGES = ("nbr", "overlap", "gifs", "reduce", "dim", "render")
EXIT_CONFIG, EXIT_BUDGET, EXIT_NONCONV = 2, 3, 4


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage
        self.cause = exc


@dataclass
class PipelineResult:
    config: PipelineConfig
    stages: tuple
    nbr: object = None
    overlap: object = None
    raw: object = None
    reduced: object = None
    reduction: object = None
    dimension: dict | None = None
    summary: dict = dc_field(default_factory=dict)
    files: dict = dc_field(default_factory=dict)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


class ArtifactWriter:
    def __init__(self, out_dir: Path | None):
        self.out_dir = out_dir
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        self.files: dict = {}

    def write(self, stem: str, ext: str, text: str) -> str | None:
        if self.out_dir is None:
            return None
        name = f"{stem}-{_digest(text)}.{ext}"
        (self.out_dir / name).write_text(text)
        (self.out_dir / f"{stem}.latest.{ext}").write_text(text)
        self.files[f"{stem}.{ext}"] = name
        return name


def _poly_str(poly) -> str:
    terms = []
    for k in range(len(poly) - 1, -1, -1):
        c = poly[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if mono and abs(c) == 1:
            coef = "-" if c < 0 else "+"
            terms.append(f"{coef} {mono}")
        else:
            terms.append(f"{'-' if c < 0 else '+'} {abs(c)}{'*' + mono if mono else ''}")
    s = " ".join(terms).lstrip("+ ").strip()
    return s if not s.startswith("- ") else "-" + s[2:]


def run_pipeline(cfg: PipelineConfig, stages=STAGES, out_dir: Path | None = None,
                 max_vertices: int | None = None, depth: int | None = None) -> PipelineResult:
    """Run the requested stages (plus the stages they depend on) and write artifacts."""
    wanted = set(stages)
    unknown = wanted - set(STAGES)
    if unknown:
        raise ConfigError(f"unknown stage(s): {', '.join(sorted(unknown))}")
    last = max(STAGES.index(s) for s in wanted)
    todo = STAGES[:last + 1]
    opts = cfg.options
    res = PipelineResult(cfg, tuple(todo))
    out = ArtifactWriter(out_dir)
    summary = {"name": cfg.name, "stages": list(todo)}

    if cfg.weighted is not None and cfg.ifs is None and cfg.overlap_graph is None:
        stage = "dim"
        try:
            w = WeightedGifs.from_json(cfg.weighted, cfg.constants)
            beta = hausdorff_dim(w)
        except NonConvergence as exc:
            raise StageError(stage, exc) from exc
        except ValueError as exc:
            raise StageError(stage, ConfigError(str(exc))) from exc
        res.dimension = {"weighted": True, "beta": beta}
        summary.update(attractors=w.n, beta=beta)
        out.write("dim", "json", json.dumps(res.dimension, indent=1, sort_keys=True))
        return _finish(res, summary, out)

    stage = "nbr"
    try:
        if cfg.ifs is not None:
            bopts = BuildOptions(max_vertices or opts["max_vertices"], opts["prune_slack"])
            res.nbr = build_neighbor_graph(cfg.ifs, bopts)
            summary["neighbor_vertices"] = res.nbr.n
            summary["proper_neighbor_maps"] = res.nbr.n - 1
            out.write("nbr", "json", res.nbr.dumps())
            out.write("nbr", "dot", res.nbr.to_dot("neighbor graph"))
        if "overlap" not in todo:
            return _finish(res, summary, out)

        stage = "overlap"
        og = extract_overlap_graph(res.nbr) if res.nbr is not None else cfg.overlap_graph
        if cfg.symmetry_identifications:
            if opts["identify_mode"] == "force":
                accepted = [(og.index_of(u), og.index_of(v)) for u, v in cfg.symmetry_identifications]
                rejected = []
            else:
                accepted, rejected = verify_identifications(og, cfg.symmetry_identifications,
                                                            opts["state_budget"])
            summary["identifications"] = {
                "mode": opts["identify_mode"],
                "accepted": [[og.names[u], og.names[v]] for u, v in accepted],
                "rejected": [[str(_name(og, u)), str(_name(og, v)), why] for u, v, why in rejected],
            }
            og = quotient_vertices(og, accepted)
        res.overlap = og
        summary["overlap_vertices"] = og.n
        out.write("overlap", "json", og.dumps())
        out.write("overlap", "dot", og.to_dot("overlap graph"))
        if "gifs" not in todo:
            return _finish(res, summary, out)

        stage = "gifs"
        ratio = cfg.ifs.ratio if cfg.ifs is not None else None
        res.raw = build_gifs(og, cfg.m, opts["gifs_budget"], ratio)
        problems = validate_gifs(res.raw)
        summary["raw_attractors"] = res.raw.n
        summary["validation"] = problems
        out.write("gifs", "json", res.raw.dumps())
        if "reduce" not in todo:
            summary["attractors"] = res.raw.n
            return _finish(res, summary, out)

        stage = "reduce"
        flags = flag_degenerate(res.raw)
        res.reduced, res.reduction = reduce_system(
            res.raw, og, drop_degenerate=bool(opts["drop_degenerate"]),
            budget=opts["state_budget"], irreducible=opts["irreducible"])
        summary["raw_degenerate"] = [d["attractor"] for d in flags.degenerate]
        summary["attractors"] = res.reduced.n
        summary["reduction_steps"] = res.reduction.steps
        out.write("reduce", "json", res.reduced.dumps())
        out.write("reduction_report", "json", res.reduction.dumps())
        if "dim" not in todo:
            return _finish(res, summary, out)

        stage = "dim"
        M = incidence_matrix(res.reduced)
        res.dimension = dimension_report(M, ratio)
        summary["spectral_radius"] = res.dimension["spectral_radius"]
        summary["char_poly"] = _poly_str(char_poly(M))
        if "perron_factor" in res.dimension:
            from fractions import Fraction
            summary["perron_factor"] = _poly_str([Fraction(c) for c in res.dimension["perron_factor"]])
        if "beta" in res.dimension:
            summary["beta"] = res.dimension["beta"]
        out.write("dim", "json", json.dumps(res.dimension, indent=1, sort_keys=True))
        if "render" not in todo:
            return _finish(res, summary, out)

        stage = "render"
        if cfg.ifs is None:
            summary["render"] = "skipped: no maps for a graph-only config"
            return _finish(res, summary, out)
        d = depth if depth is not None else opts["depth"]
        maps = cfg.ifs.maps
        pieces = render.expand_pieces(res.reduced, maps, 0, d)
        out.write("render", "svg", render.emit_svg(pieces, None, res.reduced, maps))
        cloud = render.point_cloud(res.reduced, maps, 0, opts["cloud_depth"])
        out.write("cloud", "csv", render.cloud_csv(cloud))
        out.write("cloud", "json", render.cloud_json(cloud))
        summary["pieces"] = len(pieces)
        summary["cloud_points"] = len(cloud)
    except (BudgetError, NonConvergence, ConfigError) as exc:
        raise StageError(stage, exc) from exc
    return _finish(res, summary, out)


def _name(og, ref):
    if isinstance(ref, int) and 0 <= ref < og.n:
        return og.names[ref]
    return ref


def _finish(res: PipelineResult, summary: dict, out: ArtifactWriter) -> PipelineResult:
    res.summary = summary
    out.write("summary", "json", json.dumps(summary, indent=1, sort_keys=True, default=str))
    res.files = dict(out.files)
    return res


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="overlapgifs",
                                description="Build non-overlapping GIFS for self-similar sets of finite type.")
    p.add_argument("verb", choices=STAGES + ("pipeline",),
                   help="stage to run (with its prerequisites), or 'pipeline' for --stages")
    p.add_argument("--config", required=True, help="JSON or TOML config file")
    p.add_argument("--out-dir", help="output directory (default: $OVERLAPGIFS_OUT_DIR or ./out)")
    p.add_argument("--stages", help="comma separated stages for 'pipeline' (default: all)")
    p.add_argument("--max-vertices", type=int, help="neighbor graph candidate budget")
    p.add_argument("--depth", type=int, help="render depth")
    p.add_argument("--reverse-order", action="store_true", help="enumerate the maps in reverse order")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args.config)
        if args.reverse_order:
            cfg = _reversed(cfg)
    except ValidationError as exc:
        print(f"error [config]: {'; '.join(f'{k}: {m}' for k, m in exc.violations)}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.verb == "pipeline":
        stages = tuple(s.strip() for s in args.stages.split(",")) if args.stages else STAGES
    else:
        stages = (args.verb,)
    out_dir = Path(args.out_dir or cfg.options.get("out_dir") or default_out_dir()) / cfg.name
    t0 = time.perf_counter()
    try:
        res = run_pipeline(cfg, stages, out_dir, args.max_vertices, args.depth)
    except StageError as exc:
        code = EXIT_NONCONV if isinstance(exc.cause, NonConvergence) else (
            EXIT_BUDGET if isinstance(exc.cause, BudgetError) else EXIT_CONFIG)
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        return code
    except ConfigError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GifsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logger.info("finished in %.2fs", time.perf_counter() - t0)
    print(json.dumps(res.summary, indent=1, sort_keys=True, default=str))
    return 0


def _reversed(cfg: PipelineConfig) -> PipelineConfig:
    from .config import config_from_dict
    data = dict(cfg.source)
    m = cfg.m
    base = data.get("ordering") or list(range(1, m + 1))
    data["ordering"] = list(reversed(base))
    return config_from_dict(data)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
