"""Randomized cross-checks of every metric against the oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import flat as _flat
from . import wasserstein as _w
from .generators import equal_mass_pair, random_pair
from .measure import DiscreteMeasure, difference, radon_distance, write_measure
from .oracle import (
    CENTRALIZED_SPEC,
    FLAT_SPEC,
    W1_SPEC,
    dual_lp_oracle,
    oracle_tolerance,
    transport_oracle_w1,
)

__all__ = ["SelftestConfig", "SelftestReport", "Failure", "run_selftest", "CHECKS"]

CHECKS = (
    "flat-array~oracle",
    "flat-tree~oracle",
    "flat-array~tree",
    "centralized~oracle",
    "w1~oracle",
    "w1~transport",
    "flat<=upper",
    "flat<=radon",
    "flat<=w1",
)


@dataclass
class SelftestConfig:
    cap: int = 12
    cases: int = 500
    h: float = 1e-3
    seed: int = 0
    slack: float = 1e-6

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if self.cases < 0:
            raise ValueError("cases must be >= 0")
        if not self.h > 0:
            raise ValueError("h must be positive")


@dataclass
class Failure:
    check: str
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    detail: str

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        pa, pb = out / "counterexample_a.txt", out / "counterexample_b.txt"
        header = f"selftest counterexample: {self.check}\n{self.detail}"
        write_measure(self.mu, pa, header)
        write_measure(self.nu, pb, header)
        return pa, pb


@dataclass
class SelftestReport:
    counts: dict[str, int] = field(default_factory=lambda: {c: 0 for c in CHECKS})
    failure: Failure | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _close(a: float, b: float, rtol: float = 1e-9) -> bool:
    return abs(a - b) <= rtol * (1.0 + abs(b))


def run_selftest(cfg: SelftestConfig, progress: Callable[[int], None] | None = None) -> SelftestReport:
    """Run ``cfg.cases`` random instances, stopping at the first failure."""
    report = SelftestReport()
    rng = np.random.default_rng(cfg.seed)

    def check(name: str, ok: bool, mu, nu, detail: str) -> bool:
        if not ok:
            report.failure = Failure(name, mu, nu, detail)
            return False
        report.counts[name] += 1
        return True

    for case in range(cfg.cases):
        n = int(rng.integers(1, cfg.cap + 1))
        mu, nu = random_pair(n, "clustered", rng)
        delta = difference(mu, nu)
        tol = oracle_tolerance(delta, cfg.h) + cfg.slack

        f_arr = _flat.flat_distance(mu, nu, "array").value
        f_tree = _flat.flat_distance(mu, nu, "tree").value
        ref = dual_lp_oracle(delta, FLAT_SPEC, cfg.h, cap=cfg.cap)
        cen = _w.centralized_w1(mu, nu).value
        cen_ref = dual_lp_oracle(delta, CENTRALIZED_SPEC, cfg.h, cap=cfg.cap + 1)
        upper = _w.flat_upper_bound(mu, nu).value
        radon = radon_distance(mu, nu)
        steps = [
            ("flat-array~oracle", abs(f_arr - ref) <= tol, f"array={f_arr!r} oracle={ref!r} tol={tol!r}"),
            ("flat-tree~oracle", abs(f_tree - ref) <= tol, f"tree={f_tree!r} oracle={ref!r} tol={tol!r}"),
            ("flat-array~tree", _close(f_arr, f_tree), f"array={f_arr!r} tree={f_tree!r}"),
            ("centralized~oracle", abs(cen - cen_ref) <= tol, f"closed form={cen!r} oracle={cen_ref!r}"),
            ("flat<=upper", f_tree <= upper + 1e-9 * (1 + upper), f"flat={f_tree!r} upper={upper!r}"),
            ("flat<=radon", f_tree <= radon + 1e-9 * (1 + radon), f"flat={f_tree!r} radon={radon!r}"),
        ]
        for name, ok, detail in steps:
            if not check(name, ok, mu, nu, detail):
                return report

        emu, enu = equal_mass_pair(n, "clustered", rng)
        edelta = difference(emu, enu)
        w = _w.w1_distance(emu, enu).value
        plan = transport_oracle_w1(emu, enu)
        w_ref = dual_lp_oracle(edelta, W1_SPEC, cfg.h, cap=cfg.cap)
        ef = _flat.flat_distance(emu, enu).value
        etol = oracle_tolerance(edelta, cfg.h) + cfg.slack
        steps = [
            ("w1~oracle", math.isfinite(w) and abs(w - w_ref) <= etol, f"closed form={w!r} oracle={w_ref!r}"),
            ("w1~transport", _close(w, plan.cost), f"closed form={w!r} transport={plan.cost!r}"),
            ("flat<=w1", ef <= w + 1e-9 * (1 + w), f"flat={ef!r} w1={w!r}"),
        ]
        for name, ok, detail in steps:
            if not check(name, ok, emu, enu, detail):
                return report
        if progress is not None:
            progress(case + 1)
    return report
