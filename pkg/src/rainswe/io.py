"""Scenario configuration parsing, serialisation, and run-output writing.

The config format is a plain-text INI dialect with sections
[scenario] [grid] [topography] [initial] [boundary] [sources] [friction]
[run] [output]. A [scenario] name may reference a built-in, with any other
sections overriding individual fields on top of it. Numbers are written
with 17 significant digits so every float round-trips exactly.
"""

from __future__ import annotations

import os
from dataclasses import replace

import numpy as np

from . import scenarios as _scenarios
from .core import (
    FrictionParams,
    InitialSpec,
    Scenario,
    ScenarioError,
    SourceBox,
    SourceField,
    TopographySpec,
)
from .diagnostics import entropy, mass_audit, total_head


class ParseError(ValueError):
    """Config text rejected; message carries the offending line number."""


_SECTIONS = ("scenario", "grid", "topography", "initial", "boundary",
             "sources", "friction", "run", "output")

_KEYS = {
    "scenario": {"name"},
    "grid": {"length", "cells"},
    "topography": {"kind", "z0", "gradient", "breaks", "values"},
    "initial": {"kind", "h0", "q0", "surface"},
    "boundary": {"left", "right"},
    "sources": {"rain", "infiltration"},
    "friction": {"alpha", "k_lam", "k_tur", "variant"},
    "run": {"t_final", "cfl", "gravity", "h_dry"},
    "output": {"probes", "snapshots"},
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_float(text: str, lineno: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {lineno}: key {key!r} needs a number, got {text!r}") from None


def _parse_float_list(text: str, lineno: int, key: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(_parse_float(p.strip(), lineno, key) for p in text.split(","))


def _parse_boxes(text: str, lineno: int, key: str):
    boxes = []
    for record in text.split(";"):
        record = record.strip()
        if not record:
            continue
        parts = record.split()
        if len(parts) != 5:
            raise ParseError(
                f"line {lineno}: {key!r} records need 5 numbers (t0 t1 x0 x1 rate)")
        vals = [_parse_float(p, lineno, key) for p in parts]
        boxes.append(SourceBox(*vals))
    return tuple(boxes)


def _tokenise(text: str):
    """Yield (lineno, section, key, value) after syntax checks."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ParseError(f"line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ParseError(f"line {lineno}: key before any section")
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS[section]:
            raise ParseError(f"line {lineno}: unknown key {key!r} in [{section}]")
        yield lineno, section, key, value


def parse_scenario(text: str) -> Scenario:
    """Parse config text into a validated Scenario.

    Unknown sections or keys are rejected with their line number; scenario
    invariants (CFL range, box placement, ...) surface as ScenarioError.
    """
    data: dict = {s: {} for s in _SECTIONS}
    lines: dict = {}
    for lineno, section, key, value in _tokenise(text):
        if key in data[section]:
            raise ParseError(f"line {lineno}: duplicate key {key!r} in [{section}]")
        data[section][key] = value
        lines[(section, key)] = lineno

    name = data["scenario"].get("name", "").strip()
    if name and name in _scenarios.NAMES:
        base = _scenarios.build(name)
    else:
        required = (("grid", "length"), ("grid", "cells"), ("run", "t_final"))
        for sec, key in required:
            if key not in data[sec]:
                raise ParseError(f"missing required key {key!r} in [{sec}]")
        base = Scenario(length=1.0, n_cells=2, t_final=1.0, name=name)

    def num(sec, key, current):
        if key in data[sec]:
            return _parse_float(data[sec][key], lines[(sec, key)], key)
        return current

    def text_value(sec, key, current):
        return data[sec].get(key, current).strip() if key in data[sec] else current

    length = num("grid", "length", base.length)
    cells = data["grid"].get("cells")
    n_cells = int(_parse_float(cells, lines[("grid", "cells")], "cells")) if cells else base.n_cells

    topo = base.topography
    if data["topography"]:
        sec = data["topography"]
        kind = sec.get("kind", topo.kind).strip()
        topo = TopographySpec(
            kind=kind,
            z0=num("topography", "z0", topo.z0),
            gradient=num("topography", "gradient", topo.gradient),
            x_breaks=_parse_float_list(sec["breaks"], lines[("topography", "breaks")],
                                       "breaks") if "breaks" in sec else topo.x_breaks,
            z_values=_parse_float_list(sec["values"], lines[("topography", "values")],
                                       "values") if "values" in sec else topo.z_values,
        )

    init = base.initial
    if data["initial"]:
        init = InitialSpec(
            kind=text_value("initial", "kind", init.kind),
            h0=num("initial", "h0", init.h0),
            q0=num("initial", "q0", init.q0),
            surface=num("initial", "surface", init.surface),
        )

    sources = base.sources
    if data["sources"]:
        sec = data["sources"]
        rain = _parse_boxes(sec["rain"], lines[("sources", "rain")],
                            "rain") if "rain" in sec else sources.rain
        infil = _parse_boxes(sec["infiltration"], lines[("sources", "infiltration")],
                             "infiltration") if "infiltration" in sec else sources.infiltration
        sources = SourceField(rain=rain, infiltration=infil)

    friction = base.friction
    if data["friction"]:
        friction = FrictionParams(
            alpha=num("friction", "alpha", friction.alpha),
            k_lam=num("friction", "k_lam", friction.k_lam),
            k_tur=num("friction", "k_tur", friction.k_tur),
            model_variant=text_value("friction", "variant", friction.model_variant),
        )

    probes = base.probes
    snapshot_times = base.snapshot_times
    if "probes" in data["output"]:
        probes = _parse_float_list(data["output"]["probes"],
                                   lines[("output", "probes")], "probes")
    if "snapshots" in data["output"]:
        snapshot_times = _parse_float_list(data["output"]["snapshots"],
                                           lines[("output", "snapshots")], "snapshots")

    return replace(
        base,
        name=name or base.name,
        length=length,
        n_cells=n_cells,
        t_final=num("run", "t_final", base.t_final),
        cfl=num("run", "cfl", base.cfl),
        gravity=num("run", "gravity", base.gravity),
        h_dry=num("run", "h_dry", base.h_dry),
        topography=topo,
        initial=init,
        bc_left=text_value("boundary", "left", base.bc_left),
        bc_right=text_value("boundary", "right", base.bc_right),
        sources=sources,
        friction=friction,
        probes=probes,
        snapshot_times=snapshot_times,
    )


def serialize_scenario(scn: Scenario) -> str:
    """Config text that parses back to an equal Scenario."""
    out = []
    if scn.name:
        out += ["[scenario]", f"name = {scn.name}", ""]
    out += ["[grid]", f"length = {_fmt(scn.length)}", f"cells = {scn.n_cells}", ""]
    t = scn.topography
    out += ["[topography]", f"kind = {t.kind}"]
    if t.kind == "flat":
        out += [f"z0 = {_fmt(t.z0)}"]
    elif t.kind == "slope":
        out += [f"z0 = {_fmt(t.z0)}", f"gradient = {_fmt(t.gradient)}"]
    else:
        out += ["breaks = " + ", ".join(_fmt(v) for v in t.x_breaks),
                "values = " + ", ".join(_fmt(v) for v in t.z_values)]
    out += ["", "[initial]", f"kind = {scn.initial.kind}"]
    if scn.initial.kind == "uniform":
        out += [f"h0 = {_fmt(scn.initial.h0)}", f"q0 = {_fmt(scn.initial.q0)}"]
    elif scn.initial.kind == "lake":
        out += [f"surface = {_fmt(scn.initial.surface)}"]
    out += ["", "[boundary]", f"left = {scn.bc_left}", f"right = {scn.bc_right}", ""]
    if scn.sources.rain or scn.sources.infiltration:
        out += ["[sources]"]
        for key, boxes in (("rain", scn.sources.rain),
                           ("infiltration", scn.sources.infiltration)):
            if boxes:
                recs = "; ".join(
                    " ".join(_fmt(v) for v in (b.t0, b.t1, b.x0, b.x1, b.rate))
                    for b in boxes)
                out += [f"{key} = {recs}"]
        out += [""]
    f = scn.friction
    out += ["[friction]", f"alpha = {_fmt(f.alpha)}", f"k_lam = {_fmt(f.k_lam)}",
            f"k_tur = {_fmt(f.k_tur)}", f"variant = {f.model_variant}", ""]
    out += ["[run]", f"t_final = {_fmt(scn.t_final)}", f"cfl = {_fmt(scn.cfl)}",
            f"gravity = {_fmt(scn.gravity)}", f"h_dry = {_fmt(scn.h_dry)}", ""]
    if scn.probes or scn.snapshot_times:
        out += ["[output]"]
        if scn.probes:
            out += ["probes = " + ", ".join(_fmt(p) for p in scn.probes)]
        if scn.snapshot_times:
            out += ["snapshots = " + ", ".join(_fmt(s) for s in scn.snapshot_times)]
        out += [""]
    return "\n".join(out)


# --------------------------------------------------------------------------
# Run outputs
# --------------------------------------------------------------------------

def write_outputs(result, directory: str):
    """Write probes.csv, snapshot_<t>.csv, and diagnostics.csv for a run.

    Plain-text CSV, 17 significant digits, deterministic row order. Returns
    the list of file paths written.
    """
    os.makedirs(directory, exist_ok=True)
    written = []
    scn = result.scenario

    path = os.path.join(directory, "probes.csv")
    with open(path, "w") as fh:
        fh.write("t,probe_x,h,q,u\n")
        for i, t in enumerate(result.times):
            for j, x in enumerate(scn.probes):
                h, q, u = result.probe_series[i, j]
                fh.write(f"{_fmt(t)},{_fmt(x)},{_fmt(h)},{_fmt(q)},{_fmt(u)}\n")
    written.append(path)

    for t_snap, h, q in result.snapshots:
        path = os.path.join(directory, f"snapshot_{t_snap:.6f}.csv")
        u = np.zeros_like(h)
        wet = h > scn.h_dry
        u[wet] = q[wet] / h[wet]
        e = entropy(h, u, scn.gravity)
        psi = total_head(h, u, result.z, scn.gravity)
        with open(path, "w") as fh:
            fh.write("x,Z,h,q,u,E,psi\n")
            for k in range(h.size):
                fh.write(",".join(_fmt(v) for v in (
                    result.grid.centers[k], result.z[k], h[k], q[k], u[k],
                    e[k], psi[k])) + "\n")
        written.append(path)

    audit = mass_audit(result)
    entropy_drop = np.ones(result.times.size, dtype=int)
    if result.times.size > 1:
        rising = np.diff(result.entropy_series) > 1e-12 * np.abs(result.entropy_series[:-1])
        entropy_drop[1:] = (~rising).astype(int)
    path = os.path.join(directory, "diagnostics.csv")
    with open(path, "w") as fh:
        fh.write("t,dt,total_mass,total_entropy,mass_audit_error,"
                 "entropy_nonincreasing,clamped_cells\n")
        for i, t in enumerate(result.times):
            fh.write(",".join((
                _fmt(t), _fmt(result.dt_series[i]), _fmt(result.mass_series[i]),
                _fmt(result.entropy_series[i]), _fmt(audit[i]),
                str(entropy_drop[i]), str(result.clamp_events[i]))) + "\n")
    written.append(path)
    return written


def load_scenario(source: str) -> Scenario:
    """Build a scenario from a built-in name or a config file path."""
    if source in _scenarios.NAMES:
        return _scenarios.build(source)
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    raise ScenarioError(
        f"{source!r} is neither a built-in scenario nor a config file path")
