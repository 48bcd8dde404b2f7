"""Pipeline configuration: parsing, validation and field-element expressions.

Field elements in a config may be written either as coefficient lists (of
``1, x, ..., x^(d-1)``, entries int or "p/q" strings) or as arithmetic
expressions in the generator ``x`` and previously defined constants, e.g.
``"(x**3 + 4*x)/16"``.
"""
from __future__ import annotations

import ast
import json
import operator
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import FieldElement, NumberField
from .errors import ConfigError, RootRefinementFailed, ValidationError
from .nbrgraph import LabeledDigraph
from .similitude import IfsSpec, Similitude

__all__ = ["PipelineConfig", "parse_config", "config_from_dict", "eval_element"]

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv}

DEFAULT_OPTIONS = {
    "max_vertices": 10_000,
    "prune_slack": None,
    "gifs_budget": 1 << 20,
    "state_budget": 1 << 18,
    "ratio_tol": 1e-12,
    "depth": 4,
    "cloud_depth": 8,
    "drop_degenerate": False,
    "irreducible": None,
    "identify_mode": "verify",
    "out_dir": None,
}


def eval_element(field: NumberField, spec, constants: dict | None = None) -> FieldElement:
    """Turn a coefficient list, number or expression string into a field element."""
    constants = constants or {}
    if isinstance(spec, FieldElement):
        return spec
    if isinstance(spec, bool):
        raise ConfigError(f"cannot interpret {spec!r} as a field element")
    if isinstance(spec, int):
        return field.from_rational(spec)
    if isinstance(spec, (list, tuple)):
        try:
            return field.element([Fraction(str(c)) for c in spec])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad coefficient list {spec!r}: {exc}") from None
    if not isinstance(spec, str):
        raise ConfigError(f"cannot interpret {spec!r} as a field element")
    try:
        tree = ast.parse(spec, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {spec!r}: {exc.msg}") from None
    names = dict(constants)
    names.setdefault("x", field.gen)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return field.from_rational(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError(f"unknown name {node.id!r} in {spec!r}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            exp = node.right
            sign = 1
            if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                sign, exp = -1, exp.operand
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                raise ConfigError(f"only integer exponents are allowed in {spec!r}")
            return ev(node.left) ** (sign * exp.value)
        raise ConfigError(f"unsupported syntax in {spec!r}")

    return ev(tree)


@dataclass
class PipelineConfig:
    name: str
    field: NumberField | None
    constants: dict
    ifs: IfsSpec | None
    overlap_graph: LabeledDigraph | None
    ordering: list | None
    symmetry_identifications: list
    options: dict = dc_field(default_factory=dict)
    weighted: dict | None = None
    source: dict = dc_field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        if self.ifs is not None:
            return self.ifs.m
        if self.overlap_graph is not None:
            return self.overlap_graph.m
        return 0


def parse_config(path) -> PipelineConfig:
    """Load a JSON (or TOML) config file and validate it."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:  # python < 3.11
            try:
                import tomli as tomllib
            except ImportError:
                raise ConfigError("TOML configs need Python >= 3.11 or the tomli package") from None
        try:
            data = tomllib.loads(text)
        except Exception as exc:
            raise ConfigError(f"{path}: {exc}") from None
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    data.setdefault("name", path.stem)
    base = path.parent
    og = data.get("overlap_graph")
    if isinstance(og, str):
        try:
            data["overlap_graph"] = json.loads((base / og).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"overlap_graph: cannot load {og}: {exc}") from None
    return config_from_dict(data)


def config_from_dict(data: dict) -> PipelineConfig:
    violations: list = []
    known = {"name", "description", "field", "constants", "maps", "overlap_graph", "ordering",
             "symmetry_identifications", "options", "weighted_gifs", "notes"}
    for key in data:
        if key not in known:
            violations.append((key, "unknown key"))

    field = None
    if "field" in data:
        f = data["field"]
        try:
            mp = f["min_poly"]
            if not isinstance(mp, list) or not all(isinstance(c, int) for c in mp):
                raise ConfigError("min_poly must be a list of integers")
            hint = f.get("root_hint", [0.0, 0.0])
            if not (isinstance(hint, list) and len(hint) == 2):
                raise ConfigError("root_hint must be [re, im]")
            field = NumberField(mp, complex(hint[0], hint[1]), f.get("embed_precision", 1e-12))
        except (KeyError, TypeError) as exc:
            violations.append(("field", f"malformed field descriptor ({exc})"))
        except (ValueError, ConfigError, RootRefinementFailed) as exc:
            violations.append(("field", str(exc)))

    constants: dict = {}
    if field is not None:
        for name, expr in (data.get("constants") or {}).items():
            try:
                constants[name] = eval_element(field, expr, constants)
            except (ConfigError, ZeroDivisionError, ArithmeticError) as exc:
                violations.append((f"constants.{name}", str(exc)))

    options = dict(DEFAULT_OPTIONS)
    for key, val in (data.get("options") or {}).items():
        if key not in DEFAULT_OPTIONS:
            violations.append((f"options.{key}", "unknown option"))
        else:
            options[key] = val
    if not isinstance(options["max_vertices"], int) or options["max_vertices"] < 1:
        violations.append(("options.max_vertices", "must be a positive integer"))
    if options["identify_mode"] not in ("verify", "force"):
        violations.append(("options.identify_mode", "must be 'verify' or 'force'"))

    has_maps = "maps" in data
    has_graph = "overlap_graph" in data
    has_weighted = "weighted_gifs" in data
    if has_maps and has_graph:
        violations.append(("maps", "exactly one of maps / overlap_graph may be given, not both"))
    elif not (has_maps or has_graph or has_weighted):
        violations.append(("maps", "one of maps / overlap_graph is required"))
    if has_maps and field is None and "field" not in data:
        violations.append(("field", "required when maps are given"))

    ifs = None
    if has_maps and field is not None and not (has_maps and has_graph):
        maps = []
        for k, mdef in enumerate(data["maps"]):
            try:
                a = eval_element(field, mdef["a"], constants)
                b = eval_element(field, mdef.get("b", 0), constants)
                maps.append(Similitude(a, b))
            except (KeyError, TypeError):
                violations.append((f"maps[{k}]", "needs keys 'a' and 'b'"))
            except (ConfigError, ValueError, ArithmeticError) as exc:
                violations.append((f"maps[{k}]", str(exc)))
        if maps and len(maps) == len(data["maps"]):
            try:
                ifs = IfsSpec(field, maps, options["ratio_tol"])
            except ConfigError as exc:
                violations.append(("maps", str(exc)))

    graph = None
    if has_graph and not has_maps:
        try:
            graph = LabeledDigraph.from_json(data["overlap_graph"], field)
        except (ConfigError, KeyError, TypeError, ValueError) as exc:
            violations.append(("overlap_graph", str(exc)))

    m = ifs.m if ifs else (graph.m if graph else None)
    ordering = data.get("ordering")
    if ordering is not None:
        if m is not None and sorted(ordering) != list(range(1, m + 1)):
            violations.append(("ordering", f"must be a permutation of 1..{m}"))
        elif ifs is not None:
            ifs = ifs.permuted(ordering)
        elif graph is not None:
            graph = _relabel_graph(graph, ordering)

    idents = []
    for k, pair in enumerate(data.get("symmetry_identifications") or []):
        if not (isinstance(pair, list) and len(pair) == 2):
            violations.append((f"symmetry_identifications[{k}]", "must be a pair"))
            continue
        try:
            idents.append(tuple(_vertex_ref(field, p, constants) for p in pair))
        except ConfigError as exc:
            violations.append((f"symmetry_identifications[{k}]", str(exc)))

    weighted = None
    if has_weighted:
        weighted = data["weighted_gifs"]
        if not isinstance(weighted, dict) or "equations" not in weighted:
            violations.append(("weighted_gifs", "needs an 'equations' list"))

    if violations:
        raise ValidationError(violations)
    return PipelineConfig(
        name=str(data.get("name", "run")), field=field, constants=constants, ifs=ifs,
        overlap_graph=graph, ordering=ordering, symmetry_identifications=idents,
        options=options, weighted=weighted, source=data)


def _vertex_ref(field, ref, constants):
    """Vertex reference: int index, vertex name, translation expression or {a, b}."""
    if isinstance(ref, int):
        return ref
    if isinstance(ref, dict):
        if field is None:
            raise ConfigError("similitude vertex references need a field")
        return Similitude(eval_element(field, ref["a"], constants),
                          eval_element(field, ref.get("b", 0), constants))
    if isinstance(ref, str):
        if field is not None and ref.startswith("="):
            return Similitude.translation(eval_element(field, ref[1:], constants))
        return ref
    raise ConfigError(f"cannot interpret vertex reference {ref!r}")


def _relabel_graph(graph: LabeledDigraph, ordering) -> LabeledDigraph:
    # new label k corresponds to old label ordering[k-1]
    new_of_old = {old: new for new, old in enumerate(ordering, start=1)}
    edges = [(s, t, new_of_old[i], new_of_old[j]) for s, t, i, j in graph.edges]
    return LabeledDigraph(graph.m, list(graph.vertices), edges, graph.field, list(graph.names))


def default_out_dir() -> Path:
    return Path(os.environ.get("OVERLAPGIFS_OUT_DIR", "out"))
