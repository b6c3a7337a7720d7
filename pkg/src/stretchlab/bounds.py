"""Closed-form bounds on the stretch factor F = F(n, p) and the regime classifier.

Every evaluator returns a :class:`Bound`: the explicit value, whether the
result's hypothesis on ``(n, p)`` holds, and whether the published statement
carries an additional unquantified ``o(1)`` term that is *not* included in
``value``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError

C_LOW = 1.0 / 51.0
C_HIGH = 1.0 / (16.0 * math.pi)


@dataclass(frozen=True)
class Bound:
    value: float
    precondition: bool | None = None
    asymptotic_slack: bool = False

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {"value": self.value, "precondition": self.precondition, "asymptotic_slack": self.asymptotic_slack}


@dataclass(frozen=True)
class BoundInputs:
    n: int
    p: float
    lam: float = 1.0
    w: float | None = None
    c: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidInputError(f"p must lie in [0, 1], got {self.p}")
        if not self.lam > 0:
            raise InvalidInputError("lambda must be positive")
        if self.w is not None and not self.w > 0:
            raise InvalidInputError("w must be positive")
        if self.c is not None and not C_LOW < self.c < C_HIGH:
            raise InvalidInputError(f"c must lie in (1/51, 1/(16 pi)), got {self.c}")

    @property
    def w_value(self) -> float:
        return math.log(self.n) if self.w is None else self.w


def _q(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p}")
    return 1.0 - p


def thm1_threshold(n: int, p: float, w: float) -> float:
    """Lower threshold ``sqrt(n(1-p)) / w`` exceeded by F a.a.s. when w -> infinity."""
    if not w > 0:
        raise InvalidInputError("w must be positive")
    return math.sqrt(n * _q(p)) / w


def thm2_aas_bound(n: int, p: float, w: float) -> Bound:
    """Upper bound ``1 + w sqrt(n(1-p)) / p``; hypothesis ``p^2 n >= 33 log n``."""
    if not p > 0:
        raise InvalidInputError("p must be positive")
    if not w > 0:
        raise InvalidInputError("w must be positive")
    value = 1.0 + w * math.sqrt(n * _q(p)) / p
    return Bound(value, p * p * n >= 33.0 * math.log(n))


def thm2_expectation_bound(n: int, p: float) -> Bound:
    """``E[F | connected] <= 1 + sqrt(2048 n (1-p)) / p + o(1)``; hypothesis ``p^2 n >= 113 log n``."""
    if not p > 0:
        raise InvalidInputError("p must be positive")
    value = 1.0 + math.sqrt(2048.0 * n * _q(p)) / p
    return Bound(value, p * p * n >= 113.0 * math.log(n), asymptotic_slack=True)


def lemma4_bound(n: int, p: float, lam: float, c: float) -> Bound:
    """``P(F < lam) <= exp(-c n (1-p) / (2 e^8 lam^2)) + o(1)``."""
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    if not C_LOW < c < C_HIGH:
        raise InvalidInputError(f"c must lie in (1/51, 1/(16 pi)), got {c}")
    value = math.exp(-c * n * _q(p) / (2.0 * math.exp(8.0) * lam * lam))
    return Bound(value, None, asymptotic_slack=True)


def lemma5_bound(n: int, p: float, lam: float) -> float:
    """``P(F > 2 lam + 1) <= n^2 [exp(-p^2 n / 16) + 128 (1-p) / (p^2 n lam^2)]``.

    Not clamped to [0, 1].
    """
    if not p > 0:
        raise InvalidInputError("p must be positive")
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    p2n = p * p * n
    return n * n * (math.exp(-p2n / 16.0) + 128.0 * _q(p) / (p2n * lam * lam))


def nice_probability_lower(p: float, lam: float) -> float:
    """Lower bound ``(1-p) / lam^2`` on the chance a two-vertex primary disc is nice (capped at 1-p)."""
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    return _q(p) * min(1.0, 1.0 / (lam * lam))


def lemma3_fraction() -> float:
    """Fraction ``e^-8`` of primary discs guaranteed to hold exactly two vertices."""
    return math.exp(-8.0)


# ------------------------------------------------------------------ regimes


class Regime(enum.Enum):
    BOUNDED = "BOUNDED"  # n(1-p) -> 0
    CRITICAL = "CRITICAL"  # n(1-p) = Theta(1)
    UNBOUNDED = "UNBOUNDED"  # n(1-p) -> infinity


@dataclass(frozen=True)
class PExpression:
    """Edge probability as a function of n.

    families: ``constant`` (p = a), ``power`` (p = 1 - a / n^b),
    ``nlogn`` (p = 1 - a / (n log n)), ``threshold`` (p = sqrt(a log n / n)).
    """

    family: str
    a: float
    b: float = 1.0

    FAMILIES = ("constant", "power", "nlogn", "threshold")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise InvalidInputError(f"unknown p-expression family {self.family!r}")
        if self.family == "constant":
            if not 0.0 <= self.a <= 1.0:
                raise InvalidInputError(f"constant p must lie in [0, 1], got {self.a}")
        elif not (self.a > 0 and self.b > 0):
            raise InvalidInputError("p-expression parameters must be positive")

    def one_minus_p(self, n) -> float:
        """``1 - p(n)``, computed without cancellation."""
        if self.family == "constant":
            return 1.0 - self.a
        if self.family == "power":
            return self.a / n**self.b
        if self.family == "nlogn":
            return self.a / (n * math.log(n))
        return 1.0 - math.sqrt(self.a * math.log(n) / n)

    def __call__(self, n) -> float:
        if self.family == "constant":
            return self.a
        if self.family == "threshold":
            p = math.sqrt(self.a * math.log(n) / n)
        else:
            p = 1.0 - self.one_minus_p(n)
        if not 0.0 <= p <= 1.0:
            raise InvalidInputError(f"p({n}) = {p} outside [0, 1] for {self}")
        return p

    def __str__(self):
        if self.family == "constant":
            return f"{self.a!r}"
        if self.family == "power":
            return f"1-{self.a!r}/n^{self.b!r}"
        if self.family == "nlogn":
            return f"1-{self.a!r}/(n*log(n))"
        return f"sqrt({self.a!r}*log(n)/n)"

    @classmethod
    def parse(cls, text: str) -> "PExpression":
        """Parse ``"0.5"``, ``"1-2/n"``, ``"1-3/n^1.5"``, ``"1-1/(n*log(n))"``, ``"sqrt(2*log(n)/n)"``."""
        s = re.sub(r"\s+", "", str(text)).replace("**", "^")
        num = r"([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)"
        if re.fullmatch(num, s):
            return cls("constant", float(s))
        m = re.fullmatch(r"1-" + num + r"/n(?:\^" + num + r")?", s)
        if m:
            return cls("power", float(m.group(1)), float(m.group(2) or 1.0))
        m = re.fullmatch(r"1-" + num + r"/\(n\*log\(n\)\)", s)
        if m:
            return cls("nlogn", float(m.group(1)))
        m = re.fullmatch(r"sqrt\((?:" + num + r"\*)?log\(n\)/n\)", s)
        if m:
            return cls("threshold", float(m.group(1) or 1.0))
        raise InvalidInputError(f"cannot parse p-expression {text!r}")


NUMERIC_GRID = [2**k for k in range(10, 21)]
SLOPE_THRESHOLD = 0.05


def _check_range(pexpr: PExpression, grid) -> None:
    for n in grid:
        pexpr(n)


def regime_classify(pexpr: PExpression) -> Regime:
    """Asymptotic behaviour of ``n (1 - p(n))`` for a closed-form family."""
    _check_range(pexpr, NUMERIC_GRID)
    fam = pexpr.family
    if fam == "constant":
        return Regime.BOUNDED if pexpr.a == 1.0 else Regime.UNBOUNDED
    if fam == "power":
        if pexpr.b > 1.0:
            return Regime.BOUNDED
        if pexpr.b == 1.0:
            return Regime.CRITICAL
        return Regime.UNBOUNDED
    if fam == "nlogn":
        return Regime.BOUNDED
    return Regime.UNBOUNDED


def regime_classify_numeric(one_minus_p: Callable[[int], float] | PExpression, grid=None) -> Regime:
    """Heuristic classifier from the least-squares slope of ``log(n (1-p))`` against ``log n``.

    Slope above +0.05 is UNBOUNDED, below -0.05 BOUNDED, otherwise CRITICAL.
    A :class:`PExpression` contributes its cancellation-free ``1 - p``.
    """
    grid = NUMERIC_GRID if grid is None else grid
    if isinstance(one_minus_p, PExpression):
        _check_range(one_minus_p, grid)
        q = one_minus_p.one_minus_p
    else:
        q = one_minus_p
    vals = np.array([n * q(n) for n in grid], dtype=float)
    if np.any(vals < 0):
        raise InvalidInputError("p(n) exceeds 1 on the grid")
    if np.all(vals == 0):
        return Regime.BOUNDED
    if np.any(vals == 0):
        raise InvalidInputError("1 - p(n) vanishes on part of the grid only")
    slope = np.polyfit(np.log(grid), np.log(vals), 1)[0]
    if slope > SLOPE_THRESHOLD:
        return Regime.UNBOUNDED
    if slope < -SLOPE_THRESHOLD:
        return Regime.BOUNDED
    return Regime.CRITICAL


def all_bounds(n: int, p: float, lam: float, w: float | None = None, c: float | None = None) -> dict:
    """Every applicable bound for one ``(n, p, lam)`` as a JSON-ready dict."""
    inp = BoundInputs(n, p, lam, w, c)
    w = inp.w_value
    out = {
        "n": n,
        "p": p,
        "lambda": lam,
        "w": w,
        "thm1_threshold": thm1_threshold(n, p, w),
    }
    if p > 0:
        out["thm2_aas_bound"] = thm2_aas_bound(n, p, w).to_dict()
        out["thm2_expectation_bound"] = thm2_expectation_bound(n, p).to_dict()
        out["lemma5_bound"] = {"value": lemma5_bound(n, p, lam), "event": f"F > {2 * lam + 1!r}"}
    if c is not None:
        out["c"] = c
        out["lemma4_bound"] = lemma4_bound(n, p, lam, c).to_dict()
    out["nice_probability_lower"] = nice_probability_lower(p, lam)
    return out
