"""Concrete distribution families used by the experiments.

Each family is an immutable value object with pure seeded draws.  Finite
sine supports keep their points as exact rationals 16^i/(16^i+1) and only
convert to float at emission, because the shattering machinery needs exact
values downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .core import DomainError, Observation, UnlabeledPair
from . import shatter
from .shatter import (ShatterCertificate, certificate_from_json,
                      certificate_to_json, lattice_multiplier, lattice_point)

TWO_PI = 2.0 * math.pi


def _strip(pairs_block):
    return tuple(UnlabeledPair(x=o.x, y=o.y, support_index=o.support_index)
                 for o in pairs_block)


@dataclass(frozen=True, eq=False)
class SineInstance:
    """x in (0,1], y = theta* x, z = sin(1/y).

    Either theta_star is a float in (0,1], or the instance is backed by an
    exact shattering witness (theta* = 1/(2*pi*c) with rational c, far below
    float range for deep lattices).  Support is the continuous interval or a
    uniform law on chosen lattice indices.
    """

    theta_star: Optional[float] = None
    support: Optional[tuple] = None        # lattice indices, None = continuous
    witness: Optional[ShatterCertificate] = None

    task_count = None
    q = 1
    k = 1

    def __post_init__(self):
        if (self.theta_star is None) == (self.witness is None):
            raise DomainError("exactly one of theta_star / witness required")
        if self.theta_star is not None:
            if not (0.0 < self.theta_star <= 1.0):
                raise DomainError("theta* must lie in (0, 1]")
        if self.support is not None:
            idx = tuple(int(i) for i in self.support)
            if len(idx) < 1 or any(i < 1 for i in idx):
                raise DomainError("support indices must be positive")
            if len(set(idx)) != len(idx):
                raise DomainError("support indices must be distinct")
            object.__setattr__(self, "support", tuple(sorted(idx)))
        if self.witness is not None:
            if self.support is None:
                raise DomainError("witness-backed instances need a finite support")
            if self.support != tuple(self.witness.indices):
                raise DomainError("support must match the witness index set")
            # fail fast if the lattice is too deep for float64 emission
            if np.any(self._y_floats == 0.0):
                raise DomainError("support too deep: y underflows float64")

    @property
    def continuous(self) -> bool:
        return self.support is None

    @property
    def theta(self) -> float:
        """Float view of theta*; may underflow for deep witnesses."""
        if self.theta_star is not None:
            return self.theta_star
        return self.witness.theta

    @cached_property
    def support_points(self) -> tuple:
        """Exact rational support points x_i."""
        if self.continuous:
            raise DomainError("continuous support has no point list")
        return tuple(lattice_point(i) for i in self.support)

    @cached_property
    def _x_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.support_points])

    @cached_property
    def _y_floats(self) -> np.ndarray:
        if self.witness is not None:
            ys = []
            for i in self.support:
                scaled = Fraction(1, 1) / (self.witness.c * lattice_multiplier(i))
                ys.append(float(scaled) / TWO_PI)
            return np.array(ys)
        return self.theta_star * self._x_floats

    @cached_property
    def _z_floats(self) -> np.ndarray:
        if self.witness is not None:
            return np.array([self.witness.entry_for(i).sine for i in self.support])
        # math.sin keeps emission bit-identical with scalar re-evaluation
        return np.array([math.sin(1.0 / y) for y in self._y_floats])

    def point(self, pos: int) -> Observation:
        return Observation(x=[self._x_floats[pos]], y=[self._y_floats[pos]],
                           z=self._z_floats[pos], support_index=pos)

    def exact_scaled_pairs(self, positions) -> list:
        """Exact (x, 2*pi*y) rational pairs for witness-backed supports.

        Scaling y by 2*pi keeps the pair rational: 2*pi*y_i = 1/(c*a_i).
        The scaling drops out of any ratio- or argmin-based fit.
        """
        if self.witness is None:
            raise DomainError("exact pairs need a witness-backed instance")
        out = []
        for pos in positions:
            i = self.support[pos]
            x = lattice_point(i)
            scaled_y = Fraction(1, 1) / (self.witness.c * lattice_multiplier(i))
            out.append((x, scaled_y))
        return out

    def draw_labeled_task(self, rng, t, count):
        if self.continuous:
            x = 1.0 - rng.random(count)          # uniform on (0, 1]
            y = self.theta_star * x
            return [Observation(x=[xi], y=[yi], z=math.sin(1.0 / yi))
                    for xi, yi in zip(x, y)]
        pos = rng.integers(0, len(self.support), size=count)
        return [self.point(p) for p in pos]

    def draw_unlabeled_task(self, rng, t, count):
        return _strip(self.draw_labeled_task(rng, t, count))

    def support_enumeration(self, t: int):
        """Exact uniform law over the finite support, or None if continuous."""
        if self.continuous:
            return None
        p = Fraction(1, len(self.support))
        return [(p, self.point(pos)) for pos in range(len(self.support))]

    def min_support_y(self) -> float:
        if self.continuous:
            raise DomainError("continuous support has no minimum y")
        return float(np.min(self._y_floats))


def make_sine(theta_star: float, support=None) -> SineInstance:
    """Sine family instance; support None = continuous, int m = indices 1..m,
    or an explicit collection of distinct lattice indices."""
    if support is None:
        return SineInstance(theta_star=theta_star, support=None)
    if isinstance(support, int):
        if support < 1:
            raise DomainError("finite support size must be positive")
        support = range(1, support + 1)
    return SineInstance(theta_star=theta_star, support=tuple(support))


def make_sine_subset(indices: Sequence[int], theta_star: float) -> SineInstance:
    """Uniform law on a chosen subset of lattice indices with sine labels."""
    idx = tuple(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise DomainError("subset indices must be distinct")
    return SineInstance(theta_star=theta_star, support=idx)


def make_sine_shattered(signs: Sequence[int], indices=None,
                        convention: str = "sine-sign") -> SineInstance:
    """Witness-backed instance whose labels realize the given sign pattern
    (|z| >= sqrt(2)/2 at every support point)."""
    cert = shatter.construct(signs, convention=convention, indices=indices)
    return SineInstance(witness=cert, support=tuple(cert.indices))


THREE_PARAM_RULES = ("sine-of-sum", "raw-sum")


@dataclass(frozen=True, eq=False)
class ThreeParamInstance:
    """Per-draw latents c in (0,1), t1 in (1,2), t2 in (-2,-1), t1+t2 != 0;
    emits (x, y) = (c*t1, c*t2).

    The label is governed by label_rule: "sine-of-sum" gives z = sin(1/(x+y))
    so the composed-class analysis applies; "raw-sum" gives z = x + y.  Both
    are retained because only complexity measurements depend on the choice.
    Note |x|, |y| can reach 2, beyond the usual unit-ball convention.
    """

    label_rule: str = "sine-of-sum"

    task_count = None
    q = 1
    k = 1

    def __post_init__(self):
        if self.label_rule not in THREE_PARAM_RULES:
            raise DomainError(f"unknown label rule {self.label_rule!r}")

    def draw_latent_task(self, rng, t, count):
        c = rng.random(count)
        t1 = 1.0 + rng.random(count)
        t2 = -2.0 + rng.random(count)
        # retry the measure-zero degeneracies c=0 and t1+t2=0
        bad = (c == 0.0) | (t1 + t2 == 0.0)
        while np.any(bad):
            c[bad] = rng.random(int(bad.sum()))
            t1[bad] = 1.0 + rng.random(int(bad.sum()))
            t2[bad] = -2.0 + rng.random(int(bad.sum()))
            bad = (c == 0.0) | (t1 + t2 == 0.0)
        obs = []
        for ci, a, b in zip(c, t1, t2):
            x = ci * a
            y = ci * b
            z = math.sin(1.0 / (x + y)) if self.label_rule == "sine-of-sum" else x + y
            obs.append(Observation(x=[x], y=[y], z=z))
        return obs, np.stack([c, t1, t2], axis=1)

    def draw_labeled_task(self, rng, t, count):
        obs, _ = self.draw_latent_task(rng, t, count)
        return obs

    def draw_unlabeled_task(self, rng, t, count):
        return _strip(self.draw_labeled_task(rng, t, count))

    def support_enumeration(self, t):
        return None


def make_three_param(label_rule: str = "sine-of-sum") -> ThreeParamInstance:
    return ThreeParamInstance(label_rule=label_rule)


_BOOL_PATTERNS = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


@dataclass(frozen=True, eq=False)
class BooleanInstance:
    """Uniform law on the four observations (x, y, b_t(y)) with x, y in {0,1};
    the label depends on y alone, so no x-only predictor can beat chance when
    b_t is non-constant."""

    tables: tuple   # one (b(0), b(1)) pair per task

    q = 1
    k = 1

    def __post_init__(self):
        tabs = tuple((int(a), int(b)) for a, b in self.tables)
        if len(tabs) < 1:
            raise DomainError("need at least one task table")
        if any(v not in (0, 1) for tab in tabs for v in tab):
            raise DomainError("truth tables take values in {0, 1}")
        object.__setattr__(self, "tables", tabs)

    @property
    def task_count(self) -> int:
        return len(self.tables)

    def pattern(self, t: int, which: int) -> Observation:
        x, y = _BOOL_PATTERNS[which]
        z = float(self.tables[t][int(y)])
        return Observation(x=[x], y=[y], z=z, support_index=which)

    def draw_labeled_task(self, rng, t, count):
        picks = rng.integers(0, 4, size=count)
        return [self.pattern(t, int(w)) for w in picks]

    def draw_unlabeled_task(self, rng, t, count):
        return _strip(self.draw_labeled_task(rng, t, count))

    def support_enumeration(self, t: int):
        p = Fraction(1, 4)
        return [(p, self.pattern(t, w)) for w in range(4)]


def make_boolean(tables) -> BooleanInstance:
    return BooleanInstance(tables=tuple(tables))


@dataclass(frozen=True, eq=False)
class HyperplaneLabel:
    """z = sign(wx*x + wy.y - offset), ties resolved to +1."""

    wx: float = 1.0
    wy: tuple = ()
    offset: float = 0.0

    def __call__(self, x: float, y: np.ndarray) -> float:
        s = self.wx * x + float(np.dot(np.asarray(self.wy or [0.0] * len(y)), y))
        return 1.0 if s - self.offset >= 0 else -1.0

    def to_json(self) -> dict:
        return {"rule": "hyperplane", "wx": self.wx,
                "wy": list(self.wy), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class SubspaceInstance:
    """x uniform on [-1, 1], y = x*v + y0 exactly (so y lives on a line in
    the radius-2 ball); the label is any measurable map of (x, y)."""

    v: np.ndarray
    y0: np.ndarray
    label_rule: Callable = None

    task_count = None
    q = 1

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        y0 = np.asarray(self.y0, dtype=np.float64)
        if v.shape != y0.shape or v.ndim != 1:
            raise DomainError("v and y0 must be 1-D vectors of equal length")
        if np.linalg.norm(v) > 1 + 1e-12 or np.linalg.norm(y0) > 1 + 1e-12:
            raise DomainError("v and y0 must lie in the unit ball")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "y0", y0)
        if self.label_rule is None:
            object.__setattr__(self, "label_rule", HyperplaneLabel())

    @property
    def k(self) -> int:
        return len(self.v)

    def draw_labeled_task(self, rng, t, count):
        xs = rng.uniform(-1.0, 1.0, size=count)
        obs = []
        for x in xs:
            y = x * self.v + self.y0
            obs.append(Observation(x=[x], y=y, z=self.label_rule(x, y)))
        return obs

    def draw_unlabeled_task(self, rng, t, count):
        return _strip(self.draw_labeled_task(rng, t, count))

    def support_enumeration(self, t):
        return None


def make_subspace(v, y0, label_rule=None) -> SubspaceInstance:
    return SubspaceInstance(v=np.asarray(v, dtype=float),
                            y0=np.asarray(y0, dtype=float),
                            label_rule=label_rule)


@dataclass(frozen=True, eq=False)
class SeparableInstance:
    """y = f(x) for a strictly increasing piecewise-linear f on [0,1] with
    f(0)=0, f(1)=1; z = sign(x - y) with ties sent to +1.

    The pair (x, y) is always separated by the line x - y = 0, while the
    x-axis decision regions alternate across the interior fixed points of f.
    The identity map is rejected: its label would be a tie everywhere.
    """

    breakpoints: tuple   # ((Fraction x, Fraction y), ...) strictly increasing

    task_count = None
    q = 1
    k = 1

    def __post_init__(self):
        pts = tuple((Fraction(a), Fraction(b)) for a, b in self.breakpoints)
        if len(pts) < 2:
            raise DomainError("need at least the two endpoint breakpoints")
        if pts[0] != (Fraction(0), Fraction(0)) or pts[-1] != (Fraction(1), Fraction(1)):
            raise DomainError("breakpoints must start at (0,0) and end at (1,1)")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not (x1 > x0 and y1 > y0):
                raise DomainError("breakpoints must increase strictly in x and y")
        if all(a == b for a, b in pts):
            raise DomainError("f must differ from the identity map")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if y0 == x0 and y1 == x1:
                raise DomainError("diagonal segments make the fixed-point set infinite")
        object.__setattr__(self, "breakpoints", pts)

    @cached_property
    def fixed_points(self) -> tuple:
        """Exact solutions of f(x) = x, always including 0 and 1."""
        found = []
        for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:]):
            slope = (y1 - y0) / (x1 - x0)
            if slope == 1:
                continue  # parallel to the diagonal, crossings only at ends
            xstar = (y0 - slope * x0) / (1 - slope)
            if x0 <= xstar <= x1:
                found.append(xstar)
        found.extend([Fraction(0), Fraction(1)])
        return tuple(sorted(set(found)))

    @cached_property
    def _bx(self) -> np.ndarray:
        return np.array([float(a) for a, _ in self.breakpoints])

    @cached_property
    def _by(self) -> np.ndarray:
        return np.array([float(b) for _, b in self.breakpoints])

    def f(self, x):
        return np.interp(x, self._bx, self._by)

    def f_exact(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise DomainError("x outside [0, 1]")

    def draw_labeled_task(self, rng, t, count):
        xs = rng.random(count)
        obs = []
        for x in xs:
            y = float(self.f(x))
            z = 1.0 if x >= y else -1.0
            obs.append(Observation(x=[x], y=[y], z=z))
        return obs

    def draw_unlabeled_task(self, rng, t, count):
        return _strip(self.draw_labeled_task(rng, t, count))

    def support_enumeration(self, t):
        return None


def make_separable(breakpoints) -> SeparableInstance:
    return SeparableInstance(breakpoints=tuple(breakpoints))


def make_separable_from_fixed_points(points, wobble=Fraction(1, 4)) -> SeparableInstance:
    """Piecewise-linear f whose fixed-point set is exactly the given points.

    Between consecutive fixed points the graph detours above/below the
    diagonal alternately, by wobble * gap (< gap/2 keeps f strictly
    increasing).
    """
    pts = sorted(Fraction(p) for p in points)
    if pts[0] != 0 or pts[-1] != 1 or len(set(pts)) != len(pts):
        raise DomainError("fixed points must be distinct and include 0 and 1")
    wobble = Fraction(wobble)
    if not (0 < wobble < Fraction(1, 2)):
        raise DomainError("wobble must lie in (0, 1/2)")
    breakpoints = [(Fraction(0), Fraction(0))]
    side = 1
    for a, b in zip(pts, pts[1:]):
        mid = (a + b) / 2
        breakpoints.append((mid, mid + side * wobble * (b - a)))
        breakpoints.append((b, b))
        side = -side
    return SeparableInstance(breakpoints=tuple(breakpoints))


def instance_to_json(instance) -> dict:
    if isinstance(instance, SineInstance):
        data = {"family": "sine",
                "support": list(instance.support) if instance.support else None}
        if instance.witness is not None:
            data["witness"] = certificate_to_json(instance.witness)
        else:
            data["theta_star"] = instance.theta_star
        return data
    if isinstance(instance, ThreeParamInstance):
        return {"family": "three-param", "label_rule": instance.label_rule}
    if isinstance(instance, BooleanInstance):
        return {"family": "boolean", "tables": [list(t) for t in instance.tables]}
    if isinstance(instance, SubspaceInstance):
        rule = instance.label_rule
        rule_json = rule.to_json() if hasattr(rule, "to_json") else "custom"
        return {"family": "subspace", "v": list(instance.v),
                "y0": list(instance.y0), "label_rule": rule_json}
    if isinstance(instance, SeparableInstance):
        return {"family": "separable",
                "breakpoints": [[str(a), str(b)] for a, b in instance.breakpoints]}
    raise UnsupportedFamily(instance)


class UnsupportedFamily(TypeError):
    pass


def instance_from_json(data: dict):
    family = data["family"]
    if family == "sine":
        support = data.get("support")
        if data.get("witness") is not None:
            cert = certificate_from_json(data["witness"])
            return SineInstance(witness=cert, support=tuple(support))
        return make_sine(data["theta_star"],
                         support=tuple(support) if support else None)
    if family == "three-param":
        return make_three_param(data.get("label_rule", "sine-of-sum"))
    if family == "boolean":
        return make_boolean(tuple(tuple(t) for t in data["tables"]))
    if family == "subspace":
        rule = data.get("label_rule")
        label = None
        if isinstance(rule, dict) and rule.get("rule") == "hyperplane":
            label = HyperplaneLabel(wx=rule["wx"], wy=tuple(rule["wy"]),
                                    offset=rule["offset"])
        return make_subspace(data["v"], data["y0"], label_rule=label)
    if family == "separable":
        pts = tuple((Fraction(a), Fraction(b)) for a, b in data["breakpoints"])
        return make_separable(pts)
    raise UnsupportedFamily(family)
