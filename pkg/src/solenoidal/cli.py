"""Batch driver: ``solenoidal <command> --config cfg.json --out results/``.

Exit codes: 0 pass, 1 check failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from .constructions import DenjoyConstruction, denjoy_construction
from .core_numbers import DEFAULT_DEPTH, ProfiniteInt, format_rational
from .diagnostics import (
    NotLevelFactoring,
    circle_oracle_rotation_number,
    minimality_classify,
    weyl_sum,
)
from .dynamics import (
    HaarNotInvariant,
    InvalidMap,
    SolenoidMap,
    bmv_deviations,
    conjugacy_defect,
    default_denominator_bound,
    iterate,
    rotation_element_birkhoff,
    rotation_element_exact_haar,
    rotation_interval,
    semiconjugacy_sup,
)
from .solenoid import SolenoidPoint, UnresolvableCharacter
from .suspension import cocycle_suite, isometry_suite

log = logging.getLogger("solenoidal")

ENV_PREFIX = "SOLENOIDAL_"

DEFAULT_TOLERANCES = {
    "character": 1e-9,
    "cocycle": 1e-9,
    "isometry": 1e-9,
    "semiconj": 1e-6,
    "pseudo_irrational": 1e-6,
    "bmv_bound": 1.0,
}


class ConfigError(Exception):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"config field '{field}': {message}")
        self.field = field


class CheckFailed(Exception):
    pass


@dataclass
class ExperimentConfig:
    raw: dict
    depth: int
    n: int
    rng_seed: int
    map: Optional[SolenoidMap]
    seeds: list[SolenoidPoint]
    params: dict
    tolerances: dict
    denjoy: Optional[DenjoyConstruction] = None

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def denominator_bound(self) -> int:
        return int(self.params.get("D", default_denominator_bound(self.depth)))

    def certification(self) -> dict[str, Any]:
        return {"config_hash": self.config_hash, "K": self.depth, "D": self.denominator_bound, "n": self.n}


def _int_field(data: dict, name: str, default: Any, minimum: int) -> int:
    value = data.get(name, default)
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected an integer, got {value!r}") from None
    if isinstance(value, float) and value != out:
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if out < minimum:
        raise ConfigError(name, f"must be >= {minimum}")
    return out


def _build_map(data: dict, depth: int) -> tuple[SolenoidMap, Optional[DenjoyConstruction]]:
    if not isinstance(data, dict) or "phi" not in data:
        raise ConfigError("map", "expected an object with 'phi'")
    phi = data["phi"]
    if isinstance(phi, dict) and phi.get("kind") == "denjoy":
        try:
            dc = denjoy_construction(
                rotation=float(phi.get("rotation", (5 ** 0.5 - 1) / 2)),
                gap_mass=float(phi.get("gap_mass", 0.5)),
                ratio=float(phi.get("ratio", 0.5)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError("map.phi", str(exc)) from None
        return dc.map(depth), dc
    try:
        return SolenoidMap.from_json(data, depth), None
    except UnresolvableCharacter as exc:
        raise ConfigError("map.phi", str(exc)) from None
    except InvalidMap as exc:
        raise ConfigError("map.phi", f"invalid map: {exc}") from None
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError("map", f"cannot parse map: {exc}") from None


def load_config(raw: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    raw = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    depth = _int_field(raw, "depth", DEFAULT_DEPTH, 1)
    n = _int_field(raw, "n", 10_000, 1)
    rng_seed = _int_field(raw, "rng_seed", 0, 0)
    raw.update(depth=depth, n=n, rng_seed=rng_seed)
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params", "expected an object")
    tol = dict(DEFAULT_TOLERANCES)
    user_tol = raw.get("tolerances", {})
    if not isinstance(user_tol, dict):
        raise ConfigError("tolerances", "expected an object")
    for key, value in user_tol.items():
        if key not in tol:
            raise ConfigError(f"tolerances.{key}", "unknown tolerance")
        try:
            tol[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"tolerances.{key}", f"expected a number, got {value!r}") from None
    fmap, dc = (None, None)
    if "map" in raw:
        fmap, dc = _build_map(raw["map"], depth)
    seeds_raw = raw.get("seeds", [{"x": 0.0, "t": 0}])
    if not isinstance(seeds_raw, list) or not seeds_raw:
        raise ConfigError("seeds", "expected a non-empty list of points")
    seeds = []
    for i, s in enumerate(seeds_raw):
        try:
            seeds.append(SolenoidPoint.from_json(s, depth))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"seeds[{i}]", str(exc)) from None
    return ExperimentConfig(raw, depth, n, rng_seed, fmap, seeds, params, tol, dc)


# ---------------------------------------------------------------------------
# output helpers


class Output:
    def __init__(self, root: Path, cfg: ExperimentConfig) -> None:
        self.root = root
        self.cfg = cfg
        root.mkdir(parents=True, exist_ok=True)

    def _banner(self) -> str:
        c = self.cfg.certification()
        return " ".join(f"{k}={v}" for k, v in c.items())

    def write_csv(self, name: str, header: list[str], rows) -> None:
        with open(self.root / name, "w", newline="") as fh:
            fh.write(f"# {self._banner()}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    def write_json(self, name: str, payload: dict) -> None:
        body = {**self.cfg.certification(), **payload}
        with open(self.root / name, "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _require_map(cfg: ExperimentConfig) -> SolenoidMap:
    if cfg.map is None:
        raise ConfigError("map", "this command needs a map")
    return cfg.map


def _fmt(v: float) -> str:
    return f"{v:.6f}" if v else "0"


# ---------------------------------------------------------------------------
# commands


def cmd_rho(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    ests = [rotation_element_birkhoff(f, z, cfg.n) for z in cfg.seeds]
    payload: dict[str, Any] = {"birkhoff": [e.to_json() for e in ests]}
    summary = f"r={_fmt(ests[0].r)}"
    try:
        haar = rotation_element_exact_haar(f)
        payload["exact_haar"] = haar.to_json()
        summary += f" exact={format_rational(haar.exact)}"
    except HaarNotInvariant:
        payload["exact_haar"] = None
    try:
        turns = circle_oracle_rotation_number(f, cfg.seeds[0].x, cfg.n)
        payload["circle_oracle_turns"] = turns
        summary += f" oracle_turns={turns:.6f}"
    except NotLevelFactoring:
        payload["circle_oracle_turns"] = None
    summary += f" ci={ests[0].ci_halfwidth:g}"
    out.write_json("rho.json", payload)
    rows_max = int(cfg.params.get("orbit_rows", 1000))
    orbit = iterate(f, cfg.seeds[0], min(cfg.n, rows_max))
    out.write_csv("orbit.csv", ["m", "x", "t_residue", "D_m"], orbit.to_csv_rows())
    return summary


def cmd_interval(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    iv = rotation_interval(f, cfg.seeds, cfg.n, cfg.denominator_bound, cfg.tolerances["pseudo_irrational"])
    out.write_json("interval.json", iv.to_json())
    return f"interval=[{iv.r_min:.6f}, {iv.r_max:.6f}] width={iv.width:g} pseudo_irrational={iv.is_pseudo_irrational}"


def _tau(cfg: ExperimentConfig, f: SolenoidMap) -> float:
    if "tau" in cfg.params:
        try:
            return float(cfg.params["tau"])
        except (TypeError, ValueError):
            raise ConfigError("params.tau", "expected a number") from None
    if cfg.denjoy is not None:
        return cfg.denjoy.rotation
    return rotation_element_birkhoff(f, cfg.seeds[0], cfg.n).r


def cmd_bmv(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    tau = _tau(cfg, f)
    results = []
    sup = 0.0
    for i, z in enumerate(cfg.seeds):
        rep = bmv_deviations(f, z, tau, cfg.n)
        slope = rep.growth_slope() if rep.n > 1 else 0.0
        results.append({"seed": i, "sup": rep.sup, "slope": slope})
        sup = max(sup, rep.sup)
        out.write_csv(
            f"bmv_seed{i}.csv", ["m", "e_m"], ((m + 1, repr(float(e))) for m, e in enumerate(rep.deviations))
        )
    bound = cfg.tolerances["bmv_bound"]
    out.write_json("bmv.json", {"tau": tau, "seeds": results, "bound": bound, "pass": sup <= bound})
    summary = f"sup|e|={_fmt(sup)} tau={tau!r}"
    if sup > bound:
        raise CheckFailed(summary + f" exceeds {bound:g}")
    return summary


def cmd_semiconj(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    tau = _tau(cfg, f)
    N = int(cfg.params.get("N", cfg.n))
    samples = int(cfg.params.get("samples", 100))
    rng = random.Random(cfg.rng_seed)
    points = list(cfg.seeds)
    modulus = cfg.seeds[0].t.modulus
    for _ in range(samples):
        t = rng.randrange(modulus)
        if cfg.denjoy is not None:
            points.append(cfg.denjoy.cantor_point(rng.random(), t, cfg.depth))
        else:
            points.append(SolenoidPoint(rng.random(), ProfiniteInt(cfg.depth, t)))
    rows = []
    worst = 0.0
    for i, z in enumerate(points):
        h = semiconjugacy_sup(f, tau, z, N)
        d = conjugacy_defect(f, tau, z, N)
        worst = max(worst, d)
        rows.append((i, repr(z.x), z.t.residue, repr(h.point.x), h.point.t.residue, repr(d), repr(h.stability)))
    out.write_csv("semiconj.csv", ["i", "x", "t_residue", "h_x", "h_t_residue", "defect", "stability"], rows)
    tol = cfg.tolerances["semiconj"]
    out.write_json("semiconj.json", {"tau": tau, "N": N, "max_defect": worst, "tolerance": tol, "pass": worst < tol})
    summary = f"max_defect={worst:g} tol={tol:g} {'PASS' if worst < tol else 'FAIL'}"
    if worst >= tol:
        raise CheckFailed(summary)
    return summary


def cmd_cocycle_check(cfg: ExperimentConfig, out: Output) -> str:
    rng = random.Random(cfg.rng_seed)
    samples = int(cfg.params.get("samples", 1000))
    reports = cocycle_suite(rng, cfg.depth, samples, cfg.tolerances["cocycle"], f=cfg.map)
    iso_map = cfg.map if cfg.map is not None and cfg.map.is_translation else None
    reports.append(
        isometry_suite(rng, cfg.depth, int(cfg.params.get("isometry_samples", 100)), cfg.tolerances["isometry"], iso_map)
    )
    out.write_json("cocycle_check.json", {"reports": [r.to_json() for r in reports]})
    worst = max(r.max_defect for r in reports)
    ok = all(r.passed for r in reports)
    summary = f"max_defect={worst:.3g} < {cfg.tolerances['cocycle']:g} {'PASS' if ok else 'FAIL'}"
    if not ok:
        raise CheckFailed(summary)
    return summary


def cmd_minimal(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    sched = cfg.params.get("n_schedule")
    if sched is None:
        sched = [max(1, cfg.n // 1000), max(2, cfg.n // 100), max(3, cfg.n // 10), cfg.n]
        sched = sorted(set(sched))
    B = int(cfg.params.get("B", 256))
    j = int(cfg.params.get("j", min(3, cfg.depth)))
    z0 = cfg.seeds[0]
    if cfg.denjoy is not None and "seeds" not in cfg.raw:
        z0 = cfg.denjoy.cantor_point(0.0, 0, cfg.depth)
    try:
        v = minimality_classify(f, z0, sched, B, j)
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from None
    out.write_json("minimal.json", v.to_json())
    out.write_csv(
        "fill_curve.csv",
        ["n", "fill_fraction", "diameter"],
        ((n, repr(fr), repr(d)) for (n, fr), (_, d) in zip(v.fill_curve, v.diameter_curve)),
    )
    summary = f"verdict={v.verdict} fill={v.fill_curve[-1][1]:.4f}"
    expect = cfg.params.get("expect")
    if expect is not None and expect != v.verdict:
        raise CheckFailed(summary + f" expected {expect}")
    return summary


def cmd_weyl(cfg: ExperimentConfig, out: Output) -> str:
    f = _require_map(cfg)
    qs = cfg.params.get("q", ["1"])
    if not isinstance(qs, list):
        qs = [qs]
    results = []
    ok = True
    parts = []
    for q in qs:
        try:
            w = weyl_sum(f, str(q), cfg.n, cfg.seeds[0])
        except UnresolvableCharacter as exc:
            raise ConfigError("params.q", str(exc)) from None
        within = w.bound is None or w.modulus <= w.bound
        ok &= within
        results.append(
            {"q": str(q), "re": w.average.real, "im": w.average.imag, "modulus": w.modulus, "bound": w.bound}
        )
        parts.append(f"q={q} |avg|={w.modulus:.3g}" + ("" if w.bound is None else f" bound={w.bound:.3g}"))
    out.write_json("weyl.json", {"results": results, "pass": ok})
    summary = " ".join(parts)
    if not ok:
        raise CheckFailed(summary)
    return summary


COMMANDS: dict[str, Callable[[ExperimentConfig, Output], str]] = {
    "rho": cmd_rho,
    "interval": cmd_interval,
    "bmv": cmd_bmv,
    "semiconj": cmd_semiconj,
    "cocycle-check": cmd_cocycle_check,
    "minimal": cmd_minimal,
    "weyl": cmd_weyl,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="solenoidal", description="Rotation theory on the universal solenoid")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="experiment config (JSON)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--depth", type=int, help="profinite truncation depth K")
    ap.add_argument("--n", type=int, help="number of iterates")
    ap.add_argument("--seed", type=int, help="rng seed")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name)


def run(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    config_path = args.config or _env("CONFIG")
    out_dir = args.out or _env("OUT") or "results"
    overrides: dict[str, Any] = {}
    try:
        for key, flag, env in (("depth", args.depth, "DEPTH"), ("n", args.n, "N"), ("rng_seed", args.seed, "SEED")):
            value = flag if flag is not None else _env(env)
            if value is not None:
                try:
                    overrides[key] = int(value)
                except ValueError:
                    raise ConfigError(key, f"expected an integer override, got {value!r}") from None
        raw: dict = {}
        if config_path:
            try:
                with open(config_path) as fh:
                    raw = json.load(fh)
            except OSError as exc:
                raise ConfigError("--config", f"cannot read {config_path}: {exc}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError("--config", f"invalid JSON: {exc}") from None
        cfg = load_config(raw, overrides)
        summary = COMMANDS[args.command](cfg, Output(Path(out_dir), cfg))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"{args.command}: FAIL {exc}")
        return 1
    print(f"{args.command}: {summary}")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
