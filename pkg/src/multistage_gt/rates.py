"""Entropy and error-exponent calculus behind the stage-1 test counts.

Exponents of the column-union probabilities are obtained from a saddle point:
the number of ordered s-tuples of weight-pN columns lying under a weight-wN
vector and covering a fixed muN-subset of it is the coefficient of
prod x_i^{pN} in ((1+x)^s - 1)^{muN} (1+x)^{s(w-mu)N}; by convexity and
symmetry its growth rate is

    F = min_u  mu*log2((1+2^u)^s - 1) + (w - mu)*s*log2(1+2^u) - s*p*u.

A second route evaluates the exact rational formulas at large N and
extrapolates; the two are cross-checked in the tests.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError
from .probability import log2_fraction, pr1, pr2

INV_PHI = (math.sqrt(5) - 1) / 2
GRID_STEP = 1e-3
REFINE_TOL = 1e-8
P_TWO = 1 - math.sqrt(0.5)
P_THREE = 1 - 0.5 ** (1 / 3)


def entropy(x: float) -> float:
    """Binary entropy in bits, h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _entropy_array(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    out = np.where((x == 0) | (x == 1), 0.0, out)
    return np.where((x < 0) | (x > 1), np.nan, out)


def golden_section_max(f, a: float, b: float, tol: float = REFINE_TOL):
    """Maximise a unimodal f on [a, b]; returns (x, f(x))."""
    if b < a:
        raise ConvergenceError(f"empty bracket [{a}, {b}]")
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    candidates = [(f(a), a), (fc, c), (fd, d), (f(b), b)]
    fx, x = max(candidates)
    if not math.isfinite(fx):
        raise ConvergenceError(f"no finite value inside bracket [{a}, {b}]")
    return x, fx


def grid_then_golden(f, a: float, b: float, step: float = GRID_STEP, tol: float = REFINE_TOL):
    """Grid scan at ``step`` to seed a golden-section refinement around the best point."""
    n = max(int(math.ceil((b - a) / step)), 1)
    xs = [a + (b - a) * i / n for i in range(n + 1)]
    vals = [f(x) for x in xs]
    i = int(np.argmax(vals))
    if not math.isfinite(vals[i]):
        raise ConvergenceError(f"objective is not finite anywhere on [{a}, {b}]")
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n)]
    x, fx = golden_section_max(f, lo, hi, tol)
    if vals[i] > fx:
        return xs[i], vals[i]
    return x, fx


def _log2_cover_terms(u: float, s: int):
    x = 2.0**u
    log1p = math.log1p(x)
    # log2((1+x)^s - 1) without cancellation for small x
    covered = math.log2(math.expm1(s * log1p))
    return covered, s * log1p / math.log(2)


def cover_growth(s: int, mu: float, omega: float, p: float) -> float:
    """Growth rate (bits per N) of the number of covering s-tuples; -inf when infeasible."""
    eps = 1e-12
    if mu < -eps or omega < mu - eps or p > omega + eps or mu > s * p + eps or p < 0:
        return -math.inf
    mu = max(mu, 0.0)
    if p <= 0:
        return 0.0 if mu <= eps else -math.inf

    def phi(u):
        covered, free = _log2_cover_terms(u, s)
        return mu * covered + (omega - mu) * free - s * p * u

    # phi is convex in u; the minimiser escapes to +-inf only on the feasibility boundary,
    # where a wide bracket captures the limit to double precision
    u, neg = golden_section_max(lambda u: -phi(u), -200.0, 200.0, tol=1e-10)
    return -neg


def exponent_a(kind: str, s: int, omega1, omega: float, p: float, method: str = "saddle") -> float:
    """Asymptotic exponent -log2(Pr)/N of pr1 (kind "A1") or pr2 (kind "A2").

    Returns ``inf`` where the probability is identically zero.
    """
    if kind not in ("A1", "A2"):
        raise ValueError(f"kind must be 'A1' or 'A2', got {kind!r}")
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega={omega} outside [0, 1]")
    if kind == "A1":
        omega1 = 0.0
    elif omega1 is None or not 0.0 <= omega1 <= omega:
        raise ValueError(f"A2 needs 0 <= omega1 <= omega, got omega1={omega1}, omega={omega}")
    if method == "saddle":
        growth = cover_growth(s, omega - omega1, omega, p)
        return s * entropy(p) - growth if math.isfinite(growth) else math.inf
    if method == "extrapolated":
        return _extrapolated_exponent(s, omega1, omega, p)
    raise ValueError(f"unknown method {method!r}")


def exact_exponent(s: int, omega1: float, omega: float, p: float, N: int, interpolate: bool = False) -> float:
    """-log2(pr2)/N at finite N from the exact rational formula (pr1 when omega1 = 0).

    Weights are floored; with ``interpolate`` log2 Pr is instead interpolated
    multilinearly between the integer corners around (omega1 N, omega N, p N), which
    removes the O(1/N) jitter that flooring adds.
    """
    if not interpolate:
        return -_log2_prob(s, math.floor(omega1 * N), math.floor(omega * N), N, math.floor(p * N)) / N
    axes = []
    for x in (omega1 * N, omega * N, p * N):
        lo = math.floor(x)
        frac = x - lo
        axes.append([(lo, 1 - frac), (lo + 1, frac)] if frac > 0 else [(lo, 1.0)])
    total = 0.0
    for w1, a in axes[0]:
        for w, b in axes[1]:
            for k, c in axes[2]:
                if w1 > w or w > N:
                    return exact_exponent(s, omega1, omega, p, N)
                val = _log2_prob(s, w1, w, N, k)
                if not math.isfinite(val):
                    return exact_exponent(s, omega1, omega, p, N)
                total += a * b * c * val
    return -total / N


def _log2_prob(s, w1, w, N, k):
    prob = pr2(s, w1, w, N, k) if w1 else pr1(s, w, N, k)
    return log2_fraction(prob) if prob else -math.inf


EXTRAPOLATION_SIZES = (2000, 4000, 8000)


def _extrapolated_exponent(s, omega1, omega, p, sizes=EXTRAPOLATION_SIZES):
    # f(N) = A + (a ln N + b) / N through three sizes; the ln N / N term comes from the
    # polynomial prefactors of the binomials
    vals = [exact_exponent(s, omega1, omega, p, n, interpolate=True) for n in sizes]
    if not all(map(math.isfinite, vals)):
        return math.inf
    design = np.array([[1.0, math.log(n) / n, 1.0 / n] for n in sizes])
    return float(np.linalg.solve(design, np.array(vals))[0])


def s2_expression(omega: float, p: float = P_TWO) -> float:
    """omega*h(p/omega) + p*h((omega-p)/p) - 2h(p): log2 of the pair-count rate for s = 2."""
    if not p <= omega <= 2 * p:
        return -math.inf
    return omega * entropy(p / omega) + p * entropy((omega - p) / p) - 2 * entropy(p)


@lru_cache(maxsize=None)
def c3_constant(p: float = P_THREE, step: float = GRID_STEP) -> tuple[float, float]:
    """max over omega in [p, min(3p, 1)] of 1/A2(2, p, omega), with its argmax.

    A2 must stay positive on the whole interval; a non-positive value would make the
    stage-1 test count meaningless, so it is an error rather than clamped.
    """
    hi = min(3 * p, 1.0)
    n = max(int(math.ceil((hi - p) / step)), 1)
    for i in range(n + 1):
        omega = p + (hi - p) * i / n
        a2 = exponent_a("A2", 2, p, omega, p)
        if not a2 > 0:
            raise ConvergenceError(f"A2(2, p, omega) = {a2} is not positive at omega={omega}")
    omega, val = grid_then_golden(lambda om: 1.0 / exponent_a("A2", 2, p, om, p), p, hi, step)
    return val, omega


def e1_terms(omega1, omega, p: float, coef: float):
    """(r1, r2) divided by log2 t, with N / log2 t fixed at ``coef``. Works on arrays."""
    h = _entropy_array
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = coef * (
            omega * h(omega1 / omega) + omega1 * h(p / omega1) + p * h((omega1 - p) / p) - 2 * h(p)
        ) + 2
        r2 = 1 + coef * (omega1 * h((omega - p) / omega1) - h(p))
    return r1, r2


def e1_objective(omega1, omega, p: float, coef: float):
    """coef + 2*max(r2, r1 + r2) on the feasible region {r2 >= 0}, -inf outside it.

    Both weights are free variables over p <= omega1 <= min(2p, omega),
    omega - p <= omega1, omega <= min(3p, 1).
    """
    omega1 = np.asarray(omega1, dtype=float)
    omega = np.asarray(omega, dtype=float)
    r1, r2 = e1_terms(omega1, omega, p, coef)
    feasible = (
        (omega1 >= p - 1e-15)
        & (omega1 <= 2 * p + 1e-15)
        & (omega >= omega1)
        & (omega <= min(3 * p, 1.0) + 1e-15)
        & (omega - p <= omega1 + 1e-15)
        & (r2 >= 0)
    )
    val = coef + 2 * np.maximum(r2, r1 + r2)
    out = np.where(feasible & np.isfinite(val), val, -np.inf)
    return out if out.ndim else float(out)


def e1_bound(p: float, coef: float, step: float = GRID_STEP):
    """Maximum of :func:`e1_objective`; returns (value, omega1, omega)."""
    w1_grid = np.arange(p, 2 * p + step / 2, step)
    w_grid = np.arange(p, min(3 * p, 1.0) + step / 2, step)
    W1, W = np.meshgrid(w1_grid, w_grid, indexing="ij")
    vals = e1_objective(W1, W, p, coef)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    if not np.isfinite(vals[i, j]):
        raise ConvergenceError("feasible region of the E1 objective is empty")

    def inner(om1):
        lo = max(om1, W[i, j] - step)
        hi = min(om1 + p, 3 * p, 1.0, W[i, j] + step)
        if hi < lo:
            return -math.inf
        return golden_section_max(lambda om: e1_objective(om1, om, p, coef), lo, hi)[1]

    om1, val = golden_section_max(
        inner, max(p, W1[i, j] - step), min(2 * p, W1[i, j] + step)
    )
    lo = max(om1, W[i, j] - step)
    hi = min(om1 + p, 3 * p, 1.0, W[i, j] + step)
    om, _ = golden_section_max(lambda x: e1_objective(om1, x, p, coef), lo, hi)
    if vals[i, j] > val:
        return float(vals[i, j]), float(W1[i, j]), float(W[i, j])
    return val, om1, om


@dataclass(frozen=True)
class RateReport:
    c3: float
    omega_star_s2: float
    value_s2: float
    e1_bound: float
    c3_omega: float = math.nan
    e1_omega1: float = math.nan
    e1_omega: float = math.nan

    def __post_init__(self):
        if not self.c3 > 0:
            raise ValueError("c3 must be positive")

    def to_json_obj(self) -> dict:
        d = asdict(self)
        return {key: d[key] for key in ("c3", "omega_star_s2", "value_s2", "e1_bound")}


def optimize_constants(p2: float = P_TWO, p3: float = P_THREE) -> RateReport:
    """All rate constants: c3 for the s = 3 test count, the s = 2 pair-count maximum, and
    the bound on (N + 2 log2|E1|) / log2 t with N / log2 t at its large-L1 value 2*c3."""
    c3, c3_omega = c3_constant(p3)
    omega_s2, value_s2 = grid_then_golden(lambda om: s2_expression(om, p2), p2, 2 * p2)
    e1, e1_w1, e1_w = e1_bound(p3, 2 * c3)
    return RateReport(c3, omega_s2, value_s2, e1, c3_omega, e1_w1, e1_w)
