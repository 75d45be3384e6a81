"""Experiment configuration: named data profiles, JSON loading, validation.

Validation collects every problem before reporting (no fail-fast); see
schema/experiment.schema.json for the documented field layout.
"""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .graph import (SIERPINSKI_LEVEL_CAP, build_circle, build_interval,
                    build_sierpinski, load_edge_list, shortest_dists)

SCHEMA_VERSION = 1

PROFILE_NAMES = ("zero", "constant", "sin", "cos", "dist-to", "csv")
SPACE_KINDS = ("interval", "circle", "sierpinski", "edgelist")
HAMILTONIAN_FAMILIES = ("affine", "power", "tabulated")

_TOLERANCE_KEYS = ("aubry", "compare", "convergence")
_TOP_KEYS = ("schema_version", "space", "hamiltonian", "initial_data",
             "t_end", "store_every", "cfl_factor", "tolerances",
             "output_dir", "seed")


def resolve_profile(graph, desc, base_dir=None):
    """Per-vertex values for a named profile descriptor.

    Profiles: zero; constant(value); sin/cos(amplitude, frequency) as
    amplitude * trig(pi * frequency * coordinate); dist-to(vertex); csv(path).
    """
    if isinstance(desc, (int, float)):
        return np.full(graph.n_vertices, float(desc))
    if not isinstance(desc, dict):
        raise ValueError("profile descriptor must be an object or a number")
    name = desc.get("profile")
    if name not in PROFILE_NAMES:
        raise ValueError(f"unknown profile {name!r}; supported: "
                         f"{list(PROFILE_NAMES)}")
    if name == "zero":
        return np.zeros(graph.n_vertices)
    if name == "constant":
        return np.full(graph.n_vertices, float(desc.get("value", 0.0)))
    if name in ("sin", "cos"):
        amplitude = float(desc.get("amplitude", 1.0))
        frequency = float(desc.get("frequency", 1.0))
        coord = graph.profile_coordinate()
        trig = np.sin if name == "sin" else np.cos
        return amplitude * trig(math.pi * frequency * coord)
    if name == "dist-to":
        vertex = graph.check_vertex(desc.get("vertex", 0))
        return shortest_dists(graph, vertex)
    path = desc.get("path")
    if path is None:
        raise ValueError("csv profile needs a 'path'")
    if base_dir is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    values = np.full(graph.n_vertices, np.nan)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "vertex_id,value":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if line:
                idx, val = line.split(",")
                values[int(idx)] = float(val)
    if np.any(np.isnan(values)):
        raise ValueError(f"{path}: missing vertices")
    return values


def build_space(desc, base_dir=None):
    kind = desc["kind"]
    if kind == "interval":
        return build_interval(desc["segments"], desc.get("length", 1.0))
    if kind == "circle":
        return build_circle(desc["segments"], desc.get("length", 1.0))
    if kind == "sierpinski":
        return build_sierpinski(desc["level"])
    path = desc["path"]
    coords = desc.get("coords")
    if base_dir is not None:
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        if coords is not None and not os.path.isabs(coords):
            coords = os.path.join(base_dir, coords)
    return load_edge_list(path, coords)


@dataclass
class ExperimentConfig:
    space: dict
    hamiltonian: dict
    initial_data: dict
    t_end: float
    store_every: int = 1
    cfl_factor: float = 0.9
    tol_aubry: float = 1.0e-9
    tol_compare: float | None = None
    tol_convergence: float | None = None  # None -> 10 * (h + dt)
    output_dir: str = "out"
    seed: int = 0
    base_dir: str = "."
    source_path: str | None = None
    raw: dict = field(default_factory=dict)


def apply_overrides(raw, overrides):
    """Apply dotted-path overrides like 'space.segments=400' to a raw dict."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError([f"override {item!r} is not of the form "
                               "key.path=value"])
        key, _, text = item.partition("=")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError([f"override {key!r} descends into a "
                                   "non-object"])
        node[parts[-1]] = value
    return raw


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) \
        and math.isfinite(x)


def _check_file(path, base_dir, errors, where):
    if not isinstance(path, str):
        errors.append(f"{where}: expected a file path string")
        return
    full = path if os.path.isabs(path) else os.path.join(base_dir, path)
    if not os.path.isfile(full):
        errors.append(f"{where}: file not found: {path}")


def _validate_space(desc, base_dir, errors):
    if not isinstance(desc, dict):
        errors.append("space: expected an object")
        return
    kind = desc.get("kind")
    if kind not in SPACE_KINDS:
        errors.append(f"space.kind: unknown kind {kind!r}; supported: "
                      f"{list(SPACE_KINDS)}")
        return
    if kind in ("interval", "circle"):
        segs = desc.get("segments")
        low = 1 if kind == "interval" else 3
        if not isinstance(segs, int) or segs < low:
            errors.append(f"space.segments: expected an integer >= {low}")
        length = desc.get("length", 1.0)
        if not _is_number(length) or length <= 0:
            errors.append("space.length: expected a positive number")
    elif kind == "sierpinski":
        level = desc.get("level")
        if not isinstance(level, int) or level < 0:
            errors.append("space.level: expected a nonnegative integer")
        elif level > SIERPINSKI_LEVEL_CAP:
            errors.append(f"space.level: exceeds the cap "
                          f"{SIERPINSKI_LEVEL_CAP}")
    else:
        _check_file(desc.get("path"), base_dir, errors, "space.path")
        if desc.get("coords") is not None:
            _check_file(desc.get("coords"), base_dir, errors, "space.coords")


def _validate_profile(desc, base_dir, errors, where):
    if _is_number(desc):
        return
    if not isinstance(desc, dict):
        errors.append(f"{where}: expected a profile object or a number")
        return
    name = desc.get("profile")
    if name not in PROFILE_NAMES:
        errors.append(f"{where}.profile: unknown profile {name!r}; "
                      f"supported: {list(PROFILE_NAMES)}")
        return
    if name in ("sin", "cos"):
        for key in ("amplitude", "frequency"):
            if key in desc and not _is_number(desc[key]):
                errors.append(f"{where}.{key}: expected a number")
    elif name == "constant":
        if "value" in desc and not _is_number(desc["value"]):
            errors.append(f"{where}.value: expected a number")
    elif name == "dist-to":
        if not isinstance(desc.get("vertex", 0), int):
            errors.append(f"{where}.vertex: expected a vertex id")
    elif name == "csv":
        _check_file(desc.get("path"), base_dir, errors, f"{where}.path")


def _validate_hamiltonian(desc, base_dir, errors):
    if not isinstance(desc, dict):
        errors.append("hamiltonian: expected an object")
        return
    if "file" in desc:
        _check_file(desc["file"], base_dir, errors, "hamiltonian.file")
        return
    family = desc.get("family")
    if family not in HAMILTONIAN_FAMILIES:
        errors.append(f"hamiltonian.family: unknown family {family!r}; "
                      f"supported: {list(HAMILTONIAN_FAMILIES)}")
        return
    if "p_cap" in desc and (not _is_number(desc["p_cap"])
                            or desc["p_cap"] <= 0):
        errors.append("hamiltonian.p_cap: expected a positive number")
    if family == "affine":
        if "a" in desc:
            _validate_profile(desc["a"], base_dir, errors, "hamiltonian.a")
        _validate_profile(desc.get("potential", {"profile": "zero"}),
                          base_dir, errors, "hamiltonian.potential")
    elif family == "power":
        k = desc.get("k", 2.0)
        if not _is_number(k) or k < 1.0:
            errors.append("hamiltonian.k: expected a number >= 1")
        _validate_profile(desc.get("potential", {"profile": "zero"}),
                          base_dir, errors, "hamiltonian.potential")
    else:
        grid = desc.get("p_grid")
        samples = desc.get("samples")
        if not isinstance(grid, list) or len(grid) < 2:
            errors.append("hamiltonian.p_grid: expected a list of >= 2 "
                          "numbers")
        elif grid[0] != 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            errors.append("hamiltonian.p_grid: must start at 0 and be "
                          "strictly increasing")
        if not isinstance(samples, list):
            errors.append("hamiltonian.samples: expected a list of "
                          "per-vertex rows")


def validate_config(path, overrides=None):
    """Load, override, and validate an experiment configuration.

    Raises ConfigError carrying every detected problem at once.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            [f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be an object"])
    raw = apply_overrides(raw, overrides)
    base_dir = os.path.dirname(os.path.abspath(path))

    errors = []
    for key in raw:
        if key not in _TOP_KEYS:
            errors.append(f"{key}: unknown field")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, "
                      f"got {version!r}")

    for name in ("space", "hamiltonian", "initial_data", "t_end"):
        if name not in raw:
            errors.append(f"{name}: required field is missing")

    if "space" in raw:
        _validate_space(raw["space"], base_dir, errors)
    if "hamiltonian" in raw:
        _validate_hamiltonian(raw["hamiltonian"], base_dir, errors)
    if "initial_data" in raw:
        _validate_profile(raw["initial_data"], base_dir, errors,
                          "initial_data")

    t_end = raw.get("t_end")
    if "t_end" in raw and (not _is_number(t_end) or t_end <= 0):
        errors.append("t_end: expected a positive number")

    store_every = raw.get("store_every", 1)
    if not isinstance(store_every, int) or store_every < 1:
        errors.append("store_every: expected a positive integer")

    cfl_factor = raw.get("cfl_factor", 0.9)
    if not _is_number(cfl_factor) or not 0 < cfl_factor <= 1:
        errors.append("cfl_factor: expected a number in (0, 1]")

    tols = raw.get("tolerances", {})
    if not isinstance(tols, dict):
        errors.append("tolerances: expected an object")
        tols = {}
    else:
        for key, val in tols.items():
            if key not in _TOLERANCE_KEYS:
                errors.append(f"tolerances.{key}: unknown tolerance; "
                              f"supported: {list(_TOLERANCE_KEYS)}")
            elif val is not None and (not _is_number(val) or val <= 0):
                errors.append(f"tolerances.{key}: expected a positive number")

    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        errors.append("output_dir: expected a nonempty string")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        errors.append("seed: expected an integer")

    if errors:
        raise ConfigError(errors)

    return ExperimentConfig(
        space=raw["space"],
        hamiltonian=raw["hamiltonian"],
        initial_data=raw["initial_data"],
        t_end=float(t_end),
        store_every=store_every,
        cfl_factor=float(cfl_factor),
        tol_aubry=float(tols.get("aubry", 1.0e-9)),
        tol_compare=tols.get("compare"),
        tol_convergence=tols.get("convergence"),
        output_dir=output_dir,
        seed=seed,
        base_dir=base_dir,
        source_path=str(path),
        raw=raw,
    )
