"""Experiment orchestration: config parsing, runners, outputs, verify suites.

Configs are JSON documents; trajectories come out as CSV and summaries as
JSON.  A run is a pure function of (config bytes, seed): rerunning a config
byte-identically reproduces its outputs.

Subcommands: grow, committee, adversary, oracle, verify, sweep, replay.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import adversaries, oracles, stats
from .committee import Committee
from .engine import run as engine_run
from .group import GroupState
from .rng import Rng
from .rules import RuleSpec

_KINDS = ("grow", "committee", "adversary", "oracle", "verify", "sweep")


class ConfigError(ValueError):
    """Schema violation, tagged with the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _fmt(x) -> str:
    """17 significant digits: round-trips any 64-bit float."""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    rule: Optional[RuleSpec] = None
    initial: Optional[list] = None
    accepted: Optional[int] = None
    raw_budget: Optional[int] = None
    mode: str = "steps"
    log_admitted: bool = False
    extra_quantiles: tuple = ()
    assert_final_gap_below: Optional[float] = None
    # committee / adversary experiments
    n: Optional[int] = None
    ell: Optional[int] = None
    k: Optional[int] = None
    steps: Optional[int] = None
    construction: Optional[str] = None
    consensus_checks: bool = False
    target_displacement: Optional[float] = None
    d: Optional[str] = None
    D: Optional[str] = None
    # oracle evaluation
    oracle: Optional[str] = None
    grid: Optional[list] = None
    p: Optional[float] = None
    # verify
    suite: Optional[str] = None
    trials: Optional[int] = None
    raw: dict = field(default_factory=dict)


_SCHEMA = {
    "grow": {"kind", "seed", "rule", "initial", "accepted", "raw_budget",
             "mode", "log_admitted", "extra_quantiles",
             "assert_final_gap_below"},
    "committee": {"kind", "seed", "n", "ell", "steps", "consensus_checks"},
    "adversary": {"kind", "seed", "construction", "n", "k", "ell",
                  "target_displacement", "d", "D", "initial"},
    "oracle": {"kind", "oracle", "grid", "p", "seed"},
    "verify": {"kind", "seed", "suite", "trials"},
    "sweep": {"kind", "seed", "base", "axis", "seeds"},
}


def parse_config(text: str) -> ExperimentConfig:
    """Validate a JSON config document; unknown keys are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("$", f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be an object")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise ConfigError("kind", f"must be one of {_KINDS}, got {kind!r}")
    allowed = _SCHEMA[kind]
    for key in doc:
        if key not in allowed:
            raise ConfigError(key, "unknown key")
    if "seed" not in doc or not isinstance(doc["seed"], int):
        raise ConfigError("seed", "a mandatory integer")
    cfg = ExperimentConfig(kind=kind, seed=doc["seed"], raw=doc)

    if kind == "grow":
        cfg.rule = _parse_rule(doc.get("rule"))
        cfg.initial = _parse_initial(doc.get("initial"), cfg.rule)
        cfg.accepted = doc.get("accepted")
        cfg.raw_budget = doc.get("raw_budget")
        if cfg.accepted is None and cfg.raw_budget is None:
            raise ConfigError("accepted", "need accepted or raw_budget")
        if cfg.accepted is not None and (not isinstance(cfg.accepted, int)
                                         or cfg.accepted <= 0):
            raise ConfigError("accepted", "must be a positive integer")
        cfg.mode = doc.get("mode", "steps")
        if cfg.mode not in ("steps", "jump"):
            raise ConfigError("mode", f"must be steps or jump, got {cfg.mode!r}")
        if cfg.mode == "jump" and cfg.rule.kind != "veto":
            raise ConfigError("mode", "jump mode is veto-only")
        cfg.log_admitted = bool(doc.get("log_admitted", False))
        cfg.extra_quantiles = tuple(doc.get("extra_quantiles", ()))
        for q in cfg.extra_quantiles:
            if not 0.0 <= q <= 1.0:
                raise ConfigError("extra_quantiles", f"{q!r} outside [0, 1]")
        gap_bound = doc.get("assert_final_gap_below")
        if gap_bound is not None:
            if not isinstance(gap_bound, (int, float)) or gap_bound <= 0:
                raise ConfigError("assert_final_gap_below",
                                  "must be a positive number")
            if cfg.rule.kind == "consensus":
                raise ConfigError("assert_final_gap_below",
                                  "consensus has no fixed-point gap")
            cfg.assert_final_gap_below = float(gap_bound)
    elif kind == "committee":
        cfg.n = doc.get("n")
        cfg.ell = doc.get("ell")
        cfg.steps = doc.get("steps", 1000)
        cfg.consensus_checks = bool(doc.get("consensus_checks", False))
        if not isinstance(cfg.n, int) or cfg.n < 3:
            raise ConfigError("n", "committee size must be an integer >= 3")
        if not isinstance(cfg.ell, int) or cfg.ell < 0:
            raise ConfigError("ell", "must be a non-negative integer")
        if cfg.n % 2 == 0:
            # drift/potential monitors are stated for odd sizes only
            raise ConfigError("n", "monitored committee runs require odd n")
        if cfg.ell > (cfg.n - 1) // 2:
            raise ConfigError("ell", f"at most (n-1)/2 = {(cfg.n - 1) // 2}")
    elif kind == "adversary":
        cfg.construction = doc.get("construction")
        if cfg.construction not in ("drift", "tightness", "immunity", "removal"):
            raise ConfigError("construction",
                              "one of drift|tightness|immunity|removal")
        cfg.n = doc.get("n")
        cfg.k = doc.get("k")
        cfg.ell = doc.get("ell")
        cfg.target_displacement = doc.get("target_displacement")
        cfg.d = doc.get("d")
        cfg.D = doc.get("D")
        cfg.initial = doc.get("initial")
    elif kind == "oracle":
        cfg.oracle = doc.get("oracle")
        if cfg.oracle not in _ORACLES:
            raise ConfigError("oracle", f"unknown oracle {cfg.oracle!r}")
        cfg.grid = doc.get("grid")
        if not isinstance(cfg.grid, list) or not cfg.grid:
            raise ConfigError("grid", "non-empty list of evaluation points")
        cfg.p = doc.get("p")
    elif kind == "verify":
        cfg.suite = doc.get("suite", "quick")
        if cfg.suite not in VERIFY_SUITES:
            raise ConfigError("suite",
                              f"unknown suite; pick from {sorted(VERIFY_SUITES)}")
        cfg.trials = doc.get("trials")
    elif kind == "sweep":
        base = doc.get("base")
        if not isinstance(base, dict):
            raise ConfigError("base", "sweep needs a base config object")
        axis = doc.get("axis")
        if not isinstance(axis, dict) or len(axis) != 1:
            raise ConfigError("axis", "exactly one {key: [values]} pair")
        seeds = doc.get("seeds")
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError("seeds", "non-empty list of integer seeds")
    return cfg


def _parse_rule(node) -> RuleSpec:
    if not isinstance(node, (dict, str)):
        raise ConfigError("rule", "must be an object or rule name")
    if isinstance(node, str):
        node = {"kind": node}
    kind = node.get("kind")
    if kind == "veto":
        r = node.get("r")
        if not isinstance(r, (int, float)) or not 0.0 < r < 1.0:
            raise ConfigError("rule.r", f"must be in (0, 1), got {r!r}")
        return RuleSpec("veto", r=float(r))
    if kind in ("majority", "consensus"):
        return RuleSpec(kind)
    raise ConfigError("rule.kind", f"unknown rule kind {kind!r}")


def _parse_initial(node, rule: RuleSpec) -> list:
    if node is None:
        # rule-specific defaults: veto starts from the founder at 1
        if rule.kind == "veto":
            return [1.0]
        if rule.kind == "majority":
            return [0.5]
        raise ConfigError("initial", "consensus runs need an explicit group")
    if not isinstance(node, list) or not node:
        raise ConfigError("initial", "must be a non-empty list")
    for v in node:
        if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
            raise ConfigError("initial", f"opinion {v!r} outside [0, 1]")
    return [float(v) for v in node]


# ------------------------------------------------------------- run records

@dataclass
class RunRecord:
    config: dict
    seed: int
    config_hash: str
    kind: str
    wall_clock: float
    verdicts: dict
    summary: dict
    trajectory: Optional[object] = None
    schedule: Optional[object] = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def _config_hash(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def run_experiment(cfg: ExperimentConfig) -> RunRecord:
    t0 = time.perf_counter()
    if cfg.kind == "grow":
        record = _run_grow(cfg)
    elif cfg.kind == "committee":
        record = _run_committee(cfg)
    elif cfg.kind == "adversary":
        record = _run_adversary(cfg)
    elif cfg.kind == "oracle":
        record = _run_oracle(cfg)
    elif cfg.kind == "verify":
        record = _run_verify(cfg)
    else:
        raise ConfigError("kind", f"cannot run {cfg.kind!r} directly")
    record.wall_clock = time.perf_counter() - t0
    return record


def _run_grow(cfg: ExperimentConfig) -> RunRecord:
    group = GroupState(cfg.initial)
    rule = cfg.rule
    tau = None
    if rule.kind == "majority":
        tau = 0.5
    elif rule.kind == "veto" and rule.p > 0.5:
        tau = oracles.tau(rule.p)
    traj = engine_run(group, rule, Rng(cfg.seed),
                      accepted_target=cfg.accepted,
                      raw_budget=cfg.raw_budget,
                      log_admitted=cfg.log_admitted,
                      tau=tau, extra_quantiles=cfg.extra_quantiles,
                      mode=cfg.mode)
    verdicts = {"completed": not traj.exhausted}
    last = traj.checkpoints[-1]
    if cfg.assert_final_gap_below is not None:
        verdicts["final_gap_below"] = (last.gap is not None and
                                       last.gap <= cfg.assert_final_gap_below)
    summary = {
        "k": last.k,
        "raw_steps": traj.raw_steps,
        "accepted": traj.accepted,
        "final_q_p": last.q_p,
        "final_gap": last.gap,
        "x1": last.x1,
        "xk": last.xk,
        "tau": tau,
    }
    if cfg.log_admitted and traj.admitted:
        half = traj.admitted[len(traj.admitted) // 2:]
        if rule.kind == "majority":
            summary["ks_triangle_second_half"] = stats.ks_distance(
                half, oracles.triangle_cdf)
    return RunRecord(cfg.raw, cfg.seed, _config_hash(cfg.raw), "grow",
                     0.0, verdicts, summary, trajectory=traj)


def _run_committee(cfg: ExperimentConfig) -> RunRecord:
    rep = adversaries.committee_fuzz(cfg.n, cfg.ell, cfg.steps, Rng(cfg.seed),
                                     consensus_checks=cfg.consensus_checks)
    verdicts = {"invariants_clean": rep.clean}
    summary = {
        "accepted": rep.accepted,
        "epochs": rep.epochs,
        "median_moves": rep.median_moves,
        "drift_violations": rep.drift_violations,
        "shift_violations": rep.shift_violations,
        "monotone_violations": rep.monotone_violations,
        "range_violations": rep.range_violations,
    }
    return RunRecord(cfg.raw, cfg.seed, _config_hash(cfg.raw), "committee",
                     0.0, verdicts, summary)


def _run_adversary(cfg: ExperimentConfig) -> RunRecord:
    c = cfg.construction
    verdicts: dict = {}
    summary: dict = {}
    schedule = None
    if c == "drift":
        init_vals = cfg.initial if cfg.initial else list(range(1, (cfg.n or 7) + 1))
        committee = Committee([Fraction(v) if not isinstance(v, int) else v
                               for v in init_vals], ell=0)
        target = Fraction(cfg.target_displacement or 100) * committee.diameter
        schedule = adversaries.arithmetic_drift_schedule(committee, target)
        res = adversaries.replay(committee, schedule)
        moved = res.committee.median() - committee.median()
        verdicts["all_steps_legal"] = res.accepted_all
        verdicts["median_moved_past_target"] = moved >= target
        summary = {"steps": len(schedule.steps), "median_displacement": str(moved)}
    elif c == "tightness":
        tr = adversaries.geometric_tightness_run(cfg.k, cfg.ell)
        schedule = tr.schedule
        verdicts["all_steps_legal"] = True  # construction raises otherwise
        verdicts["within_drift_bound"] = 0 < tr.bound_ratio <= 1
        summary = {"delta": tr.delta, "bound_ratio": float(tr.bound_ratio),
                   "steps": len(tr.schedule.steps)}
    elif c == "immunity":
        com = adversaries.immunity_config(cfg.k, cfg.ell,
                                          Fraction(cfg.d or 1), Fraction(cfg.D or 1))
        ok, votes, _ = adversaries.one_step_irreplaceable(com, 2 * cfg.k + 2)
        verdicts["median_irreplaceable"] = ok
        summary = {"n": com.n, "threshold": com.threshold, "max_votes": votes}
    elif c == "removal":
        k = cfg.k
        n = 4 * k + 3
        committee = Committee(list(range(1, n + 1)), ell=k + 1)  # 3k+2 votes
        schedule = adversaries.removal_schedule(committee)
        res = adversaries.replay(committee, schedule, require_votes=3 * k + 2)
        survivors = set(committee.ids) & set(res.committee.ids)
        verdicts["all_steps_legal"] = res.accepted_all
        verdicts["all_original_ids_removed"] = not survivors
        summary = {"steps": len(schedule.steps),
                   "survivors": sorted(survivors)}
    return RunRecord(cfg.raw, cfg.seed, _config_hash(cfg.raw), "adversary",
                     0.0, verdicts, summary, schedule=schedule)


_ORACLES = {
    "f_majority": lambda x, p: oracles.f_majority(x),
    "accept_any_veto": lambda x, p: oracles.accept_any_veto(x),
    "f_veto": lambda x, p: oracles.f_veto(x),
    "tau": lambda x, p: oracles.tau(x),
    "triangle_cdf": lambda x, p: oracles.triangle_cdf(x),
    "triangle_pdf": lambda x, p: oracles.triangle_pdf(x),
    "truncated_triangle_cdf": lambda x, p: oracles.truncated_triangle_cdf(
        x, oracles.tau(p)),
    "phi1_bound": lambda x, p: oracles.phi1_bound(x),
    "g_r": lambda x, p: oracles.gap_functions(
        oracles.veto_context(p) if p else oracles.majority_context(), x).g_r,
    "g_l": lambda x, p: oracles.gap_functions(
        oracles.veto_context(p) if p else oracles.majority_context(), x).g_l,
}


def _run_oracle(cfg: ExperimentConfig) -> RunRecord:
    fn = _ORACLES[cfg.oracle]
    rows = [(x, fn(x, cfg.p)) for x in cfg.grid]
    summary = {"oracle": cfg.oracle, "rows": [[x, v] for x, v in rows]}
    return RunRecord(cfg.raw, cfg.seed, _config_hash(cfg.raw), "oracle",
                     0.0, {"evaluated": True}, summary)


# ------------------------------------------------------------ verify suites

def _suite_fixed_point(seed: int, trials=None) -> dict:
    worst = 0.0
    for i in range(1, 101):
        p = 0.5 + 0.5 * i / 100
        worst = max(worst, abs(oracles.f_veto(oracles.tau(p)) - p))
    return {"passed": worst <= 1e-12, "worst_residual": worst}


def _suite_majority_mc(seed: int, trials=None) -> dict:
    trials = trials or 10 ** 5
    rng = Rng(seed)
    worst_z = 0.0
    for q in (0.2, 0.35, 0.5, 0.65, 0.8):
        est, _ = stats.estimate_interval_accept_prob(
            RuleSpec("majority"), q, (0.0, q), trials, rng)
        f = oracles.f_majority(q)
        se = math.sqrt(f * (1 - f) / trials)
        worst_z = max(worst_z, abs(est - f) / se)
    return {"passed": worst_z < 3.0, "worst_z": worst_z}


def _suite_smoothness(seed: int, trials=None) -> dict:
    trials = trials or 10 ** 5
    rng = Rng(seed)
    rep_m = stats.smoothness_report(RuleSpec("majority"), [0.3, 0.5, 0.7],
                                    [0.05], trials, rng)
    rep_v = stats.smoothness_report(RuleSpec("veto", r=0.25),
                                    [0.65, 0.75, 0.85], [0.05], trials, rng)
    return {"passed": rep_m.passed and rep_v.passed,
            "majority": rep_m.passed, "veto": rep_v.passed}


def _suite_committee_drift(seed: int, trials=None) -> dict:
    trials = trials or 20000
    rep = adversaries.committee_fuzz(11, 2, trials, Rng(seed))
    return {"passed": rep.clean, "accepted": rep.accepted,
            "median_moves": rep.median_moves}


def _suite_consensus_fixed(seed: int, trials=None) -> dict:
    trials = trials or 20000
    rep = adversaries.committee_fuzz(5, 2, trials, Rng(seed),
                                     consensus_checks=True)
    return {"passed": rep.clean, "accepted": rep.accepted}


VERIFY_SUITES = {
    "fixed-point": _suite_fixed_point,
    "majority-mc": _suite_majority_mc,
    "smoothness": _suite_smoothness,
    "committee-drift": _suite_committee_drift,
    "consensus-fixed": _suite_consensus_fixed,
}
VERIFY_SUITES["quick"] = None  # runs fixed-point + majority-mc


def _run_verify(cfg: ExperimentConfig) -> RunRecord:
    names = (["fixed-point", "majority-mc"] if cfg.suite == "quick"
             else [cfg.suite])
    results = {}
    verdicts = {}
    for name in names:
        res = VERIFY_SUITES[name](cfg.seed, cfg.trials)
        results[name] = res
        verdicts[name] = res["passed"]
    return RunRecord(cfg.raw, cfg.seed, _config_hash(cfg.raw), "verify",
                     0.0, verdicts, results)


# ------------------------------------------------------------------- output

_CSV_HEADER_BASE = ["k", "steps", "q_p", "gap", "x1", "xk"]
_CSV_SCHEMA_VERSION = "admitlab-trajectory-v1"


def trajectory_csv(traj, extra_quantiles=()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(_CSV_HEADER_BASE) + [f"q_{_fmt(p)}" for p in extra_quantiles]
    w.writerow([f"# {_CSV_SCHEMA_VERSION}"])
    w.writerow(header)
    for c in traj.checkpoints:
        row = [c.k, c.steps, _fmt(c.q_p) if c.q_p is not None else "",
               _fmt(c.gap) if c.gap is not None else "",
               _fmt(c.x1), _fmt(c.xk)]
        row += [_fmt(c.extra[p]) for p in extra_quantiles]
        w.writerow(row)
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def emit_outputs(record: RunRecord, out_dir: str,
                 extra_quantiles=()) -> list[str]:
    """Write the trajectory CSV (when present) and the JSON summary.

    Files are written atomically (temp + rename); numbers carry 17
    significant digits, exact rationals appear as "num/den" strings.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if record.trajectory is not None:
        path = os.path.join(out_dir, "trajectory.csv")
        _atomic_write(path, trajectory_csv(record.trajectory, extra_quantiles))
        written.append(path)
    if record.kind == "oracle":
        path = os.path.join(out_dir, "oracle.csv")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", record.summary["oracle"]])
        for x, v in record.summary["rows"]:
            w.writerow([_fmt(x), _fmt(v)])
        _atomic_write(path, buf.getvalue())
        written.append(path)
    if record.schedule is not None:
        path = os.path.join(out_dir, "schedule.json")
        doc = {"provenance": record.schedule.provenance,
               "steps": [[i, _jsonable(Fraction(y))] for i, y in
                         record.schedule.steps]}
        _atomic_write(path, json.dumps(doc, indent=1))
        written.append(path)
    summary = {
        "seed": record.seed,
        "config_hash": record.config_hash,
        "kind": record.kind,
        "wall_clock_s": record.wall_clock,
        "verdicts": record.verdicts,
        "summary": _jsonable(record.summary),
    }
    path = os.path.join(out_dir, "summary.json")
    _atomic_write(path, json.dumps(summary, indent=1, default=_fmt))
    written.append(path)
    return written


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -------------------------------------------------------------------- sweep

def sweep(base_doc: dict, axis: dict, seeds: list,
          jobs: int = 1) -> dict:
    """Run the cross product of one parameter axis and a seed list.

    Per-cell failures are recorded and the sweep continues.  Each cell owns
    the seed written into its config, so cells are independent and may run
    in any order or in parallel.
    """
    (axis_key, axis_values), = axis.items()
    cells = []
    for value in (axis_values if axis_values else [None]):
        for seed in seeds:
            doc = json.loads(json.dumps(base_doc))
            if value is not None:
                _set_path(doc, axis_key, value)
            doc["seed"] = seed
            cells.append((axis_key, value, seed, doc))

    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell_entry,
                                    [(c,) for c in cells]))
    else:
        results = [_sweep_cell_entry((c,)) for c in cells]

    by_axis: dict = {}
    for r in results:
        by_axis.setdefault(r["axis"], []).append(r)
    aggregated = {
        "cells": results,
        "pass_fraction": (sum(r["passed"] for r in results) / len(results)
                          if results else 1.0),
        "per_axis_pass": {str(k): sum(r["passed"] for r in v) / len(v)
                          for k, v in by_axis.items()},
    }
    return aggregated


def _sweep_cell_entry(args):
    (cell,) = args
    axis_key, value, seed, doc = cell
    try:
        rec = run_experiment(parse_config(json.dumps(doc)))
        return {"axis": value, "seed": seed, "passed": rec.passed,
                "summary": _jsonable(rec.summary)}
    except Exception as e:
        return {"axis": value, "seed": seed, "passed": False,
                "error": f"{type(e).__name__}: {e}"}


def _set_path(doc: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = doc
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value


# ---------------------------------------------------------------------- CLI

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="admitlab",
        description="growing-group and fixed-size committee admission lab")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a JSON config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory")

    for name in ("grow", "committee", "adversary", "oracle", "sweep"):
        common(sub.add_parser(name))
    v = sub.add_parser("verify")
    common(v)
    v.add_argument("--suite", help="named verify suite",
                   choices=sorted(VERIFY_SUITES))
    rp = sub.add_parser("replay")
    rp.add_argument("--schedule", required=True, help="schedule.json to replay")
    rp.add_argument("--profile", required=True,
                    help="JSON file with {profile: [...], ell: int}")
    return ap


def _load_config(args, kind: str) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
        doc = json.loads(text)
    else:
        doc = {"kind": kind, "seed": 0}
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    if kind == "verify" and getattr(args, "suite", None):
        doc["suite"] = args.suite
    doc.setdefault("kind", kind)
    return parse_config(json.dumps(doc))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cmd = args.command

    if cmd == "replay":
        with open(args.profile) as fh:
            prof = json.load(fh)
        committee = Committee.from_json_profile(prof["profile"], prof["ell"])
        with open(args.schedule) as fh:
            doc = json.load(fh)
        steps = [(i, Fraction(y)) for i, y in doc["steps"]]
        sched = adversaries.ReplacementSchedule(steps, doc.get("provenance", "?"))
        res = adversaries.replay(committee, sched)
        print(json.dumps({"accepted_all": res.accepted_all,
                          "failed_at": res.failed_at,
                          "final_profile":
                          res.committee.to_json_profile()}, indent=1))
        return 0 if res.accepted_all else 1

    if cmd == "sweep":
        if not args.config:
            print("sweep requires --config", file=sys.stderr)
            return 2
        with open(args.config) as fh:
            doc = json.load(fh)
        parse_config(json.dumps(doc))  # validates shape
        report = sweep(doc["base"], doc["axis"], doc["seeds"])
        out = json.dumps(_jsonable(report), indent=1, default=_fmt)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            _atomic_write(os.path.join(args.out, "sweep.json"), out)
        else:
            print(out)
        return 0 if report["pass_fraction"] == 1.0 else 1

    cfg = _load_config(args, cmd)
    record = run_experiment(cfg)
    if args.out:
        emit_outputs(record, args.out, cfg.extra_quantiles)
    else:
        print(json.dumps({"verdicts": record.verdicts,
                          "summary": _jsonable(record.summary)},
                         indent=1, default=_fmt))
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
