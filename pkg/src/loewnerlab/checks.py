"""Invariant suite behind ``loewnerlab check``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import loewner_ode as lo
from . import trace as tr_mod
from .drivers import Driver
from .errors import InvariantViolation


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    worst: float
    bound: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: worst={self.worst:.3e} bound={self.bound:.3e} {self.detail}"


def check_envelope(d: Driver, tol, rng, n_s=5, eps_grid=(1e-3, 0.1, 1.0)):
    s_grid = np.linspace(d.horizon / n_s, d.horizon, n_s)
    violations = 0
    checked = 0
    for s in s_grid:
        for eps in eps_grid:
            try:
                path = lo.solve_tip(d, float(s), eps, tol)
            except InvariantViolation:
                violations += 1
                continue
            checked += path.envelope_checked
    detail = f"{checked} paths enforced" + ("" if checked else " (||lambda||_1/2 > 1)")
    return CheckResult("envelope", violations == 0, float(violations), 0.0, detail)


def check_eps_lipschitz(d: Driver, tol, rng, n=10):
    worst = -np.inf
    for _ in range(n):
        s = rng.uniform(0.05, 1.0) * d.horizon
        e1, e2 = rng.uniform(1e-3, 1.0, size=2)
        f1 = lo.solve_tip(d, s, e1, tol, check=False).tip
        f2 = lo.solve_tip(d, s, e2, tol, check=False).tip
        worst = max(worst, abs(f1 - f2) - abs(e1 - e2) - 20 * tol)
    return CheckResult("eps-lipschitz", worst <= 0, worst, 0.0, "excess over |e1-e2|+10(tol1+tol2)")


def check_concatenation(d: Driver, tol, rng, n=3):
    worst = 0.0
    for _ in range(n):
        s = rng.uniform(0.1, 0.5) * d.horizon
        u = rng.uniform(0.1, 0.5) * d.horizon
        worst = max(worst, tr_mod.verify_concatenation(d, s, u, tol))
    return CheckResult("concatenation", worst <= 10 * tol, worst, 10 * tol)


def check_symmetry(d: Driver, tol, rng, n=3):
    ts = np.sort(rng.uniform(0.05, 1.0, size=n)) * d.horizon
    a = tr_mod.trace_curve(d, ts, tol).points
    b = tr_mod.trace_curve(d.reflect(), ts, tol).points
    worst = float(np.max(np.abs(b + np.conj(a))))
    return CheckResult("reflection", worst <= 10 * tol, worst, 10 * tol)


def check_duality(d: Driver, tol, rng, n=3):
    T = d.horizon
    back = d.reverse(T)
    worst = 0.0
    for _ in range(n):
        z = complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))
        g = lo.flow(d, z, T, "forward", tol).value
        h = lo.flow(back, g, T, "backward", tol).value
        worst = max(worst, abs(h - z))
    return CheckResult("flow-duality", worst <= 10 * tol, worst, 10 * tol)


def check_capacity(d: Driver, tol, rng):
    T = d.horizon
    _, c1 = tr_mod.far_field_capacity(d, T, 1e3j, tol=min(tol, 1e-12))
    _, c2 = tr_mod.far_field_capacity(d, T, 1e4j, tol=min(tol, 1e-12))
    gap = abs(c1 - c2)
    bound = 0.05 * max(c1, c2, 1.0)
    return CheckResult("capacity", gap <= bound, gap, bound, f"C={c2:.4g}")


ALL = (check_envelope, check_eps_lipschitz, check_concatenation, check_symmetry,
       check_duality, check_capacity)


def run_checks(d: Driver, tol: float = 1e-10, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [fn(d, tol, rng) for fn in ALL]
