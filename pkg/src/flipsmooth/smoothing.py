"""Smoothed edge-weight models and the quantitative thresholds that go with them.

Seeding rule: every random draw goes through :func:`derive_seed`, which maps
``(base_seed, trial, stream)`` to a 64-bit seed via numpy's ``SeedSequence``
spawn keys.  Trial results therefore do not depend on scheduling order, and
the weight stream of a trial is unaffected by the cut or pivot streams.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph_core import GraphTopology, WeightAssignment

# stream ids for derive_seed
WEIGHTS, INITIAL_CUT, PIVOT = 0, 1, 2


def derive_seed(base_seed: int, trial: int, stream: int) -> int:
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(trial), int(stream)))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


class Kind(str, enum.Enum):
    UNIFORM = "Uniform"
    ADVERSARIAL_PLUS_NOISE = "AdversarialPlusNoise"


@dataclass(frozen=True)
class SmoothedModel:
    phi: float
    kind: Kind = Kind.UNIFORM
    base: Optional[tuple] = field(default=None)

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.UNIFORM:
            # uniform on [-1, 1] has density exactly 1/2
            if self.phi != 0.5:
                raise ValueError(f"Uniform model has phi = 1/2, got {self.phi}")
            if self.base is not None:
                raise ValueError("Uniform model takes no base offsets")
            return
        if not self.phi > 0.5:
            raise ValueError(f"AdversarialPlusNoise needs phi > 1/2, got {self.phi}")
        if self.base is None:
            raise ValueError("AdversarialPlusNoise needs a base offset per edge")
        base = tuple(float(b) for b in self.base)
        width = 1.0 / self.phi
        for e, b in enumerate(base):
            if b < -1.0 or b + width > 1.0:
                raise ValueError(
                    f"base[{e}] = {b} outside [-1, {1 - width}] for phi = {self.phi}")
        object.__setattr__(self, "base", base)

    @classmethod
    def uniform(cls) -> "SmoothedModel":
        return cls(0.5, Kind.UNIFORM)

    @classmethod
    def adversarial(cls, phi: float, base) -> "SmoothedModel":
        return cls(phi, Kind.ADVERSARIAL_PLUS_NOISE, tuple(base))

    def draw(self, rng: np.random.Generator, m: int) -> np.ndarray:
        if self.kind is Kind.UNIFORM:
            return rng.uniform(-1.0, 1.0, size=m)
        if len(self.base) != m:
            raise ValueError(f"base has {len(self.base)} offsets for {m} edges")
        return np.asarray(self.base) + rng.uniform(0.0, 1.0 / self.phi, size=m)

    def to_dict(self, seed: Optional[int] = None) -> dict:
        doc = {"phi": self.phi, "kind": self.kind.value}
        if self.base is not None:
            doc["base"] = list(self.base)
        if seed is not None:
            doc["seed"] = seed
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SmoothedModel":
        base = doc.get("base")
        return cls(float(doc["phi"]), Kind(doc["kind"]), None if base is None else tuple(base))


def sample_weights(model: SmoothedModel, g: GraphTopology, seed: int) -> WeightAssignment:
    """Independent per-edge weights; deterministic in ``(model, g, seed)``."""
    values = model.draw(make_rng(seed), g.m)
    return WeightAssignment(tuple(float(x) for x in values))


def good_pair_epsilon(phi: float, beta: float, alpha: int, n: int, c: float) -> float:
    """Improvement guaranteed w.h.p. by a good pair of moves: phi^-1 * 3^(-2 beta alpha) * n^-c.

    Underflows to 0.0 for large ``beta * alpha``.
    """
    if alpha < 1 or n < 2 or phi <= 0 or beta <= 0 or c <= 0:
        raise ValueError("need phi, beta, c > 0, alpha >= 1 and n >= 2")
    return (1.0 / phi) * 3.0 ** (-2.0 * beta * alpha) * float(n) ** (-c)


def union_bound(k: int, eps: float, phi: float) -> float:
    """min(1, 3^k * eps * phi): chance that some {-2,0,2}^k combination lands in [0, eps]."""
    if k < 0 or eps < 0 or phi <= 0:
        raise ValueError("need k >= 0, eps >= 0, phi > 0")
    if eps == 0:
        return 0.0
    try:
        return min(1.0, 3.0 ** k * eps * phi)
    except OverflowError:
        return 1.0
