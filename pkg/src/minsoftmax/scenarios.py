"""Scenario files and the bundled example systems.

A scenario is a single self-describing JSON document (schema_version 1)
holding either a finite-space system or a linear-quadratic one, plus
optional affine index-to-physical unit maps, a penalty grid, and rollout
defaults. Dense probability tables may be stored inline (full, shared
across states, or per input) or in a referenced columnar side file.

The bundled builders reconstruct three study systems:

  irrigation            8-stage moisture control of an irrigated field,
                        100 states x 75 inputs x 40 disturbance bins, with
                        the empirical forecast mixed from three uniform
                        confidence intervals;
  noise_floor           one-stage pick between a sure 4000 and a spiky
                        alternative whose flat noise floor drags the
                        expectation to 4998 (lowering the temperature
                        relative to the likelihood factor helps);
  likely_worst_case     one-stage pick where the worst disturbance is also
                        the single most likely atom, hiding a 99.99% chance
                        of a tiny cost (raising the temperature helps).

Calibrated bin probabilities are frozen in the bundled JSON files written
by write_bundled_scenarios; the builders regenerate identical tables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr

from .core import FiniteSystem, LqSystem
from .errors import (
    BAD_VALUE,
    DegenerateGrid,
    ParseError,
    SchemaVersionUnsupported,
    ValidationError,
    Violation,
)

SCHEMA_VERSION = 1

BUNDLED_NAMES = ("irrigation", "noise_floor", "likely_worst_case", "lq_scalar")


@dataclass(frozen=True)
class UnitMap:
    """Affine map from a 0-based index to its physical value."""

    offset: float
    slope: float

    def __call__(self, idx):
        return self.offset + self.slope * np.asarray(idx)

    def values(self, n: int) -> np.ndarray:
        return self(np.arange(n))


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed scenario: validated system plus presentation metadata."""

    schema_version: int
    kind: str
    name: str
    system: Union[FiniteSystem, LqSystem]
    unit_maps: dict = field(default_factory=dict)
    penalty_grid: Optional[dict] = None
    rollout_defaults: Optional[dict] = None

    def state_values(self) -> Optional[np.ndarray]:
        um = self.unit_maps.get("state")
        if um is None or not isinstance(self.system, FiniteSystem):
            return None
        return um.values(self.system.n_states)


# ---------------------------------------------------------------------------
# Loading and saving


def load_scenario(path: str) -> ScenarioFile:
    """Parse and validate a scenario file.

    Raises ParseError for unreadable structure, SchemaVersionUnsupported for
    unknown versions, and ValidationError (with field paths) when the
    payload fails core validation.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(f"{path}: schema_version {version!r}, supported: {SCHEMA_VERSION}")
    kind = doc.get("kind")
    if kind not in ("finite", "lq"):
        raise ParseError(f"{path}: kind must be 'finite' or 'lq', got {kind!r}")

    name = doc.get("name", os.path.splitext(os.path.basename(path))[0])
    if kind == "finite":
        system = _parse_finite(doc, os.path.dirname(path))
    else:
        system = _parse_lq(doc)

    unit_maps = {}
    for key, payload in (doc.get("unit_maps") or {}).items():
        try:
            unit_maps[key] = UnitMap(float(payload["offset"]), float(payload["slope"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: unit_maps.{key} must have numeric offset/slope") from exc

    return ScenarioFile(
        schema_version=version,
        kind=kind,
        name=name,
        system=system,
        unit_maps=unit_maps,
        penalty_grid=doc.get("penalty_grid"),
        rollout_defaults=doc.get("rollout_defaults"),
    )


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ParseError(f"missing required field {path}.{key}")
    return doc[key]


def _parse_finite(doc: dict, base_dir: str) -> FiniteSystem:
    fin = _require(doc, "finite", "$")
    horizon = _require(fin, "horizon", "finite")
    stage_cost = np.asarray(_require(fin, "stage_cost", "finite"), dtype=np.float64)
    terminal = np.asarray(_require(fin, "terminal_cost", "finite"), dtype=np.float64)
    n_x = terminal.shape[0] if terminal.ndim == 1 else 0

    raw_tr = _require(fin, "transition", "finite")
    if isinstance(raw_tr, dict):
        if "by_input" not in raw_tr:
            raise ParseError("finite.transition object must carry 'by_input'")
        per_u = np.asarray(raw_tr["by_input"])
        if per_u.ndim != 2:
            raise ParseError("finite.transition.by_input must be a [input][disturbance] table")
        transition = np.broadcast_to(per_u[None, :, :], (n_x,) + per_u.shape).copy()
    else:
        transition = np.asarray(raw_tr)

    n_u = transition.shape[1] if transition.ndim == 3 else 0
    n_w = transition.shape[2] if transition.ndim == 3 else 0
    empirical = _parse_empirical(_require(fin, "empirical", "finite"), n_x, n_u, n_w, horizon, base_dir)

    return FiniteSystem(
        transition=transition,
        stage_cost=stage_cost,
        terminal_cost=terminal,
        empirical=empirical,
        horizon=horizon,
    )


def _parse_empirical(spec, n_x, n_u, n_w, horizon, base_dir) -> np.ndarray:
    if not isinstance(spec, dict) or "mode" not in spec:
        raise ParseError("finite.empirical must be an object with a 'mode'")
    mode = spec["mode"]
    if mode == "full":
        return np.asarray(_require(spec, "table", "finite.empirical"), dtype=np.float64)
    if mode == "full_per_stage":
        return np.asarray(_require(spec, "table", "finite.empirical"), dtype=np.float64)
    if mode == "shared":
        row = np.asarray(_require(spec, "row", "finite.empirical"), dtype=np.float64)
        if row.ndim != 1:
            raise ParseError("finite.empirical.row must be a vector")
        return np.broadcast_to(row, (n_x, n_u, row.shape[0])).copy()
    if mode == "by_input":
        rows = np.asarray(_require(spec, "rows", "finite.empirical"), dtype=np.float64)
        if rows.ndim != 2:
            raise ParseError("finite.empirical.rows must be an [input][disturbance] table")
        return np.broadcast_to(rows[None, :, :], (n_x,) + rows.shape).copy()
    if mode == "sidecar":
        rel = _require(spec, "path", "finite.empirical")
        return read_empirical_sidecar(os.path.join(base_dir, rel), n_x, n_u, n_w)
    raise ParseError(f"finite.empirical.mode {mode!r} not recognized")


def _parse_lq(doc: dict) -> LqSystem:
    lq = _require(doc, "lq", "$")
    mats = {k: np.asarray(_require(lq, k, "lq"), dtype=np.float64) for k in ("a", "b", "d", "q", "r", "q_h")}
    horizon = lq.get("horizon", "infinite")
    if horizon == "infinite":
        horizon = None
    return LqSystem(horizon=horizon, **mats)


def read_empirical_sidecar(path: str, n_x: int, n_u: int, n_w: int) -> np.ndarray:
    """Columnar side file: header, then one record per (x, u) with n_w columns."""
    try:
        with open(path) as fh:
            lines = [ln.split() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read empirical side file {path}: {exc}") from exc
    if not lines or lines[0][:2] != ["x", "u"]:
        raise ParseError(f"{path}: side file must start with header 'x u p0 ...'")
    table = np.zeros((n_x, n_u, n_w))
    seen = np.zeros((n_x, n_u), dtype=bool)
    for ln in lines[1:]:
        if len(ln) != 2 + n_w:
            raise ParseError(f"{path}: record has {len(ln)} fields, expected {2 + n_w}")
        x, u = int(ln[0]), int(ln[1])
        table[x, u] = [float(v) for v in ln[2:]]
        seen[x, u] = True
    if not seen.all():
        missing = np.argwhere(~seen)[0]
        raise ParseError(f"{path}: no record for (x={missing[0]}, u={missing[1]})")
    return table


def write_empirical_sidecar(table: np.ndarray, path: str) -> None:
    table = np.asarray(table)
    n_x, n_u, n_w = table.shape
    lines = ["x u " + " ".join(f"p{w}" for w in range(n_w))]
    for x in range(n_x):
        for u in range(n_u):
            lines.append(f"{x} {u} " + " ".join(f"{v:.17g}" for v in table[x, u]))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def write_scenario(doc: dict, path: str) -> None:
    """Atomically write a scenario document as JSON."""
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh, indent=None, separators=(",", ":"))
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Bundled builders

IRRIGATION_STATES = 100
IRRIGATION_INPUTS = 75
IRRIGATION_BINS = 40
IRRIGATION_HORIZON = 8

# Default initial moisture for simulations: index 49 is 24.75%.
IRRIGATION_INITIAL_STATE = 49

_IRRIGATION_STATE_MAP = UnitMap(0.0, 50.0 / 99.0)
_IRRIGATION_INPUT_MAP = UnitMap(0.0, 150.0 / 74.0)
_IRRIGATION_DIST_MAP = UnitMap(-20.0, 40.0 / 39.0)


def _nearest_low(t: np.ndarray, n: int) -> np.ndarray:
    """Nearest integer in [0, n), ties broken toward the lower index."""
    return np.clip(np.ceil(t - 0.5).astype(np.int64), 0, n - 1)


def irrigation_evaporation_mixture(weights=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Forecast over 40 evaporation/rain bins on [-20, 20] mm.

    Mixture of a 100% interval over the full range and two 95% intervals
    over [-15, -5] and [-13, -2] (each spreading its remaining 5% uniformly
    over the full range), combined with the given weights (equal by
    default) and renormalized.
    """
    e = _IRRIGATION_DIST_MAP.values(IRRIGATION_BINS)
    comps = [np.full(IRRIGATION_BINS, 1.0 / IRRIGATION_BINS)]
    for lo, hi in ((-15.0, -5.0), (-13.0, -2.0)):
        inside = (e >= lo - 1e-9) & (e <= hi + 1e-9)
        c = np.full(IRRIGATION_BINS, 0.05 / IRRIGATION_BINS)
        c[inside] += 0.95 / inside.sum()
        comps.append(c)
    w = np.asarray(weights, dtype=np.float64)
    r = (w[:, None] * np.stack(comps)).sum(axis=0) / w.sum()
    return r / r.sum()


def build_irrigation(weights=(1.0, 1.0, 1.0), horizon: int = IRRIGATION_HORIZON) -> FiniteSystem:
    """Moisture-control system for an irrigated field.

    Moisture m in [0, 50]% over 100 states, irrigation decisions i in
    [0, 150] mm over 75 inputs (one third of the decision reaches the
    soil), evaporation/rain e in [-20, 20] mm over 40 bins. Dynamics
    clip m + i/3 + e into [0, 50] and round to the nearest represented
    moisture level (ties toward the drier state). Irrigation costs 20 per
    mm; moisture below 5% costs a flat 1200 per stage, above that the
    shortfall from 50% costs quadratically. The terminal cost reuses the
    moisture shortfall cost.
    """
    m = _IRRIGATION_STATE_MAP.values(IRRIGATION_STATES)
    i = _IRRIGATION_INPUT_MAP.values(IRRIGATION_INPUTS)
    e = _IRRIGATION_DIST_MAP.values(IRRIGATION_BINS)

    s_next = np.clip(m[:, None, None] + i[None, :, None] / 3.0 + e[None, None, :], 0.0, 50.0)
    transition = _nearest_low(s_next * 99.0 / 50.0, IRRIGATION_STATES)

    g_x = np.where(np.arange(IRRIGATION_STATES) < 10, 1200.0, (m - 50.0) ** 2 / 100.0)
    g_u = 20.0 * i
    stage_cost = g_x[:, None] + g_u[None, :]

    r = irrigation_evaporation_mixture(weights)
    empirical = np.broadcast_to(r, (IRRIGATION_STATES, IRRIGATION_INPUTS, IRRIGATION_BINS)).copy()

    return FiniteSystem(
        transition=transition,
        stage_cost=stage_cost,
        terminal_cost=g_x,
        empirical=empirical,
        horizon=horizon,
    )


def irrigation_unit_maps() -> dict:
    return {
        "state": _IRRIGATION_STATE_MAP,
        "input": _IRRIGATION_INPUT_MAP,
        "disturbance": _IRRIGATION_DIST_MAP,
    }


# One-stage design studies. Both share the layout: two inputs, the cost-to-go
# equals the landed value, input 0 lands deterministically on 4000.

NOISE_FLOOR_STEP = 250
NOISE_FLOOR_VALUES = np.arange(0, 10001, NOISE_FLOOR_STEP)  # 41 support points
NOISE_FLOOR_SPIKE_VALUE = 2000
# Spike mass at 2000 calibrated so the expectation is exactly
# 5000 - 3000 * mass = 4998; floor and central band are symmetric about 5000.
NOISE_FLOOR_SPIKE_MASS = 1.0 / 1500.0
NOISE_FLOOR_FLOOR_MASS = 0.04
NOISE_FLOOR_BAND = (3500, 6500)


def noise_floor_alternative_row() -> np.ndarray:
    """Calibrated distribution of the risky input in the noise-floor study.

    A thin uniform floor across [0, 10000], a broad central band around
    5000 carrying most of the mass, and a visible spike at 2000. Mean is
    exactly 4998; the variance is kept near 1.2e6 so the KL-diagonal value
    at very large penalties sits within 1 of the mean.
    """
    vals = NOISE_FLOOR_VALUES
    n = vals.shape[0]
    row = np.full(n, NOISE_FLOOR_FLOOR_MASS / n)
    band = (vals >= NOISE_FLOOR_BAND[0]) & (vals <= NOISE_FLOOR_BAND[1])
    band_mass = 1.0 - NOISE_FLOOR_FLOOR_MASS - NOISE_FLOOR_SPIKE_MASS
    row[band] += band_mass / band.sum()
    row[vals == NOISE_FLOOR_SPIKE_VALUE] += NOISE_FLOOR_SPIKE_MASS
    return row / row.sum()


def build_noise_floor_scenario() -> FiniteSystem:
    """One-stage study: sure 4000 versus a spike at 2000 under a noise floor.

    Input 0 lands on 4000 with certainty. Input 1 lands on the disturbance
    value itself: mostly a broad band around 5000 plus a floor reaching
    10000, so its worst case is 10000 while its expectation is 4998. The
    terminal cost of a state is its landed value.
    """
    vals = NOISE_FLOOR_VALUES
    n = vals.shape[0]
    idx_4000 = int(np.flatnonzero(vals == 4000)[0])

    transition_by_u = np.stack([np.full(n, idx_4000, dtype=np.int64), np.arange(n, dtype=np.int64)])
    transition = np.broadcast_to(transition_by_u[None, :, :], (n, 2, n)).copy()

    sure = np.zeros(n)
    sure[0] = 1.0
    empirical_by_u = np.stack([sure, noise_floor_alternative_row()])
    empirical = np.broadcast_to(empirical_by_u[None, :, :], (n, 2, n)).copy()

    return FiniteSystem(
        transition=transition,
        stage_cost=np.zeros((n, 2)),
        terminal_cost=vals.astype(np.float64),
        empirical=empirical,
        horizon=1,
    )


LIKELY_WORST_LOW_VALUES = 15        # landed values 0..14
LIKELY_WORST_LOW_ATOMS = 10500      # distinct low-value atoms (700 per value)
LIKELY_WORST_LOW_MASS = 0.9999
LIKELY_WORST_TOP_VALUE = 10000
LIKELY_WORST_TOP_MASS = 1.0 - LIKELY_WORST_LOW_MASS


def build_likely_worst_case_scenario() -> FiniteSystem:
    """One-stage study where the worst disturbance is also the most likely atom.

    Input 0 lands on 4000 with certainty. Input 1 spreads 99.99% of its
    mass over many atoms landing on tiny values 0..14, each individually
    less likely than the single 1e-4 atom landing on 10000, so 10000 is
    simultaneously the modal atom and the worst case. States are the landed
    values {0..14, 4000, 10000}; terminal cost equals the landed value.
    """
    n_low = LIKELY_WORST_LOW_ATOMS
    n_w = n_low + 1
    values = np.concatenate([np.arange(LIKELY_WORST_LOW_VALUES), [4000, LIKELY_WORST_TOP_VALUE]]).astype(np.float64)
    n_x = values.shape[0]
    idx_4000 = LIKELY_WORST_LOW_VALUES
    idx_top = LIKELY_WORST_LOW_VALUES + 1

    land = np.concatenate([np.arange(n_low) % LIKELY_WORST_LOW_VALUES, [idx_top]]).astype(np.int64)
    transition_by_u = np.stack([np.full(n_w, idx_4000, dtype=np.int64), land])
    transition = np.broadcast_to(transition_by_u[None, :, :], (n_x, 2, n_w)).copy()

    sure = np.zeros(n_w)
    sure[0] = 1.0
    risky = np.full(n_w, LIKELY_WORST_LOW_MASS / n_low)
    risky[-1] = LIKELY_WORST_TOP_MASS
    empirical = np.broadcast_to(np.stack([sure, risky])[None, :, :], (n_x, 2, n_w)).copy()

    return FiniteSystem(
        transition=transition,
        stage_cost=np.zeros((n_x, 2)),
        terminal_cost=values,
        empirical=empirical,
        horizon=1,
    )


def scalar_lq_benchmark(horizon: Optional[int] = 1) -> LqSystem:
    """Scalar system with every matrix equal to 1; the hand-checkable case."""
    one = np.array([[1.0]])
    return LqSystem(a=one, b=one, d=one, q=one, r=one, q_h=one, horizon=horizon)


def discretize_scalar_lq(
    lq: LqSystem,
    x_range: tuple[float, float],
    u_range: tuple[float, float],
    w_range: tuple[float, float],
    n_x: int,
    n_u: int,
    n_w: int,
) -> FiniteSystem:
    """Grid a scalar LQ system into a FiniteSystem for cross-validation.

    Uniform endpoint-inclusive grids; transitions round Ax + Bu + Dw to the
    nearest grid state with saturation at the range ends (ties toward the
    lower state). Disturbance bin masses are standard-normal CDF
    differences over midpoint bin edges, renormalized. Ranges should cover
    at least six standard deviations of the state excursions the caller
    expects; saturation silently absorbs the rest.
    """
    if lq.n_states != 1 or lq.n_inputs != 1 or lq.n_dist != 1:
        raise ValidationError([Violation(BAD_VALUE, (), "discretize_scalar_lq needs a scalar system")],
                              context="discretize_scalar_lq")
    if min(n_x, n_u, n_w) < 3:
        raise DegenerateGrid(f"need at least 3 points per axis, got {(n_x, n_u, n_w)}")
    if lq.horizon is None:
        raise ValidationError([Violation(BAD_VALUE, ("horizon",), "finite horizon required")],
                              context="discretize_scalar_lq")

    xs = np.linspace(x_range[0], x_range[1], n_x)
    us = np.linspace(u_range[0], u_range[1], n_u)
    ws = np.linspace(w_range[0], w_range[1], n_w)
    a, b, d = float(lq.a[0, 0]), float(lq.b[0, 0]), float(lq.d[0, 0])
    q, r, q_h = float(lq.q[0, 0]), float(lq.r[0, 0]), float(lq.q_h[0, 0])

    y = a * xs[:, None, None] + b * us[None, :, None] + d * ws[None, None, :]
    dx = xs[1] - xs[0]
    transition = _nearest_low((y - xs[0]) / dx, n_x)

    stage_cost = q * xs[:, None] ** 2 + r * us[None, :] ** 2
    terminal = q_h * xs**2

    edges = np.concatenate([[ws[0] - (ws[1] - ws[0]) / 2.0],
                            (ws[:-1] + ws[1:]) / 2.0,
                            [ws[-1] + (ws[-1] - ws[-2]) / 2.0]])
    masses = np.diff(ndtr(edges))
    masses = masses / masses.sum()
    empirical = np.broadcast_to(masses, (n_x, n_u, n_w)).copy()

    return FiniteSystem(
        transition=transition,
        stage_cost=stage_cost,
        terminal_cost=terminal,
        empirical=empirical,
        horizon=lq.horizon,
    )


# ---------------------------------------------------------------------------
# Bundled scenario files


def _finite_doc(name, fin: FiniteSystem, transition_by_u=None, empirical_enc=None,
                unit_maps=None, penalty_grid=None, rollout_defaults=None) -> dict:
    if transition_by_u is not None:
        tr = {"by_input": transition_by_u.tolist()}
    else:
        tr = fin.transition.tolist()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "finite",
        "name": name,
        "finite": {
            "horizon": fin.horizon,
            "transition": tr,
            "stage_cost": fin.stage_cost.tolist(),
            "terminal_cost": fin.terminal_cost.tolist(),
            "empirical": empirical_enc if empirical_enc is not None else {"mode": "full", "table": fin.empirical.tolist()},
        },
    }
    if unit_maps:
        doc["unit_maps"] = {k: {"offset": v.offset, "slope": v.slope} for k, v in unit_maps.items()}
    if penalty_grid:
        doc["penalty_grid"] = penalty_grid
    if rollout_defaults:
        doc["rollout_defaults"] = rollout_defaults
    return doc


def write_bundled_scenarios(out_dir: str) -> list[str]:
    """Write the four bundled scenario files; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    irr = build_irrigation()
    doc = _finite_doc(
        "irrigation", irr,
        empirical_enc={"mode": "shared", "row": irr.empirical[0, 0].tolist()},
        unit_maps=irrigation_unit_maps(),
        penalty_grid={"gamma_h": [0.0, 30.0, 100.0], "gamma_e": [0.0, 100.0]},
        rollout_defaults={"n_rollouts": 5000, "seed": 20247,
                          "initial_state": IRRIGATION_INITIAL_STATE,
                          "disturbance_model": "empirical"},
    )
    paths.append(os.path.join(out_dir, "irrigation.json"))
    write_scenario(doc, paths[-1])

    nf = build_noise_floor_scenario()
    doc = _finite_doc(
        "noise_floor", nf,
        transition_by_u=nf.transition[0],
        empirical_enc={"mode": "by_input", "rows": nf.empirical[0].tolist()},
        penalty_grid={"gamma_h": [0.0, 1.0, 1e6], "gamma_e": [0.0, 1.0, 1e6]},
        rollout_defaults={"n_rollouts": 1000, "seed": 7, "initial_state": 0,
                          "disturbance_model": "empirical"},
    )
    paths.append(os.path.join(out_dir, "noise_floor.json"))
    write_scenario(doc, paths[-1])

    lw = build_likely_worst_case_scenario()
    doc = _finite_doc(
        "likely_worst_case", lw,
        transition_by_u=lw.transition[0],
        empirical_enc={"mode": "by_input", "rows": lw.empirical[0].tolist()},
        penalty_grid={"gamma_h": [0.0, 1.0, 100.0], "gamma_e": [0.0, 1000.0]},
        rollout_defaults={"n_rollouts": 1000, "seed": 7, "initial_state": 0,
                          "disturbance_model": "empirical"},
    )
    paths.append(os.path.join(out_dir, "likely_worst_case.json"))
    write_scenario(doc, paths[-1])

    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "lq",
        "name": "lq_scalar",
        "lq": {k: [[1.0]] for k in ("a", "b", "d", "q", "r", "q_h")},
        "penalty_grid": {"gamma_h": [4.0], "gamma_e": [0.0, 1.0, 10.0, 100.0]},
        "rollout_defaults": {"initial_state": [0.0]},
    }
    doc["lq"]["horizon"] = 1
    paths.append(os.path.join(out_dir, "lq_scalar.json"))
    write_scenario(doc, paths[-1])
    return paths
