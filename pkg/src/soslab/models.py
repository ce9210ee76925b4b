"""Planted-instance generators for the two statistical models.

Submatrix model: the mean matrix has value ``beta_star`` on every
off-diagonal pair inside a hidden ``s_star``-subset (the support) and 0
elsewhere; the observation adds independent noise to each upper-triangle
entry. Gaussian noise has standard deviation ``sigma``, with ``sigma = 0``
admitted as an explicit noiseless mode. Two-point ("rademacher") noise
replaces each entry by +/-``nu`` with equal probability; it is a null
construction and requires ``beta_star = 0``.

Block model (sbm): a binary symmetric adjacency matrix; pairs inside the
support connect with probability ``beta_star``, all other pairs with
probability ``beta_tilde <= beta_star``.

Default scales ``sigma = nu = 1`` ("unit scale"); all downstream rate checks
are scale-relative.

Determinism: generation is a pure function of the params. The support is
drawn first, by a Fisher-Yates prefix shuffle of ``[1..d]`` (``s_star``
seeded swaps), then the upper-triangle entries are drawn in storage order.
Same params (including seed) give a bit-identical instance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, InvalidSupport, RademacherWithSignal
from .matrix import NoisyMatrix, n_pairs, pair_index
from .seeds import generator

SUBMATRIX = "submatrix"
SBM = "sbm"

GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"


@dataclass(frozen=True)
class Noise:
    """Noise law for the submatrix model: gaussian(sigma) or rademacher(nu)."""

    kind: str
    scale: float = 1.0

    def validate(self) -> None:
        if self.kind == GAUSSIAN:
            if self.scale < 0:
                raise InvalidParams("gaussian sigma must be >= 0 (0 = noiseless mode)")
        elif self.kind == RADEMACHER:
            if self.scale <= 0:
                raise InvalidParams("rademacher nu must be > 0")
        else:
            raise InvalidParams(f"unknown noise kind {self.kind!r}")

    def to_dict(self) -> dict:
        key = "sigma" if self.kind == GAUSSIAN else "nu"
        return {"kind": self.kind, key: self.scale}

    @classmethod
    def from_dict(cls, doc: dict) -> "Noise":
        kind = doc["kind"]
        scale = doc.get("sigma" if kind == GAUSSIAN else "nu", 1.0)
        return cls(kind=kind, scale=float(scale))


@dataclass(frozen=True)
class ModelParams:
    """Full description of one planted model, including the seed."""

    kind: str
    d: int
    s_star: int
    beta_star: float
    noise: Noise | None = None
    beta_tilde: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in (SUBMATRIX, SBM):
            raise InvalidParams(f"unknown model kind {self.kind!r}")
        if self.d < 2:
            raise InvalidParams("d must be >= 2")
        if not 2 <= self.s_star <= self.d:
            raise InvalidParams(f"need 2 <= s_star <= d, got s_star={self.s_star}, d={self.d}")
        if self.beta_star < 0:
            raise InvalidParams("beta_star must be >= 0")
        if self.kind == SUBMATRIX:
            if self.noise is None:
                raise InvalidParams("submatrix model requires a noise spec")
            self.noise.validate()
            if self.noise.kind == RADEMACHER and self.beta_star != 0:
                raise RademacherWithSignal(
                    "rademacher noise models a null instance; beta_star must be 0"
                )
        else:
            if self.beta_tilde is None:
                raise InvalidParams("sbm requires beta_tilde")
            if not 0 <= self.beta_tilde <= self.beta_star <= 1:
                raise InvalidParams(
                    f"sbm requires 0 <= beta_tilde <= beta_star <= 1, "
                    f"got beta_tilde={self.beta_tilde}, beta_star={self.beta_star}"
                )

    def to_dict(self) -> dict:
        doc: dict = {
            "kind": self.kind,
            "d": self.d,
            "s_star": self.s_star,
            "beta_star": self.beta_star,
            "seed": self.seed,
        }
        if self.noise is not None:
            doc["noise"] = self.noise.to_dict()
        if self.beta_tilde is not None:
            doc["beta_tilde"] = self.beta_tilde
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelParams":
        return cls(
            kind=doc["kind"],
            d=int(doc["d"]),
            s_star=int(doc["s_star"]),
            beta_star=float(doc["beta_star"]),
            noise=Noise.from_dict(doc["noise"]) if "noise" in doc else None,
            beta_tilde=float(doc["beta_tilde"]) if "beta_tilde" in doc else None,
            seed=int(doc["seed"]),
        )


@dataclass(frozen=True)
class PlantedInstance:
    """A generated matrix together with its ground truth."""

    matrix: NoisyMatrix
    support: frozenset[int]
    params: ModelParams

    def ground_truth_dict(self) -> dict:
        return {"support": sorted(self.support), "params": self.params.to_dict()}


def _check_support(d: int, s_star: int, support) -> frozenset[int]:
    supp = frozenset(int(v) for v in support)
    if len(supp) != s_star:
        raise InvalidSupport(f"support must have exactly {s_star} vertices, got {len(supp)}")
    if not supp <= set(range(1, d + 1)):
        raise InvalidSupport(f"support must be a subset of 1..{d}")
    return supp


def mean_matrix(params: ModelParams, support) -> NoisyMatrix:
    """Entrywise mean of the model: beta_star inside the support, else 0
    (for sbm, beta_tilde outside)."""
    params.validate()
    supp = _check_support(params.d, params.s_star, support)
    outside = params.beta_tilde if params.kind == SBM else 0.0
    entries = np.full(n_pairs(params.d), outside, dtype=np.float64)
    members = sorted(supp)
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            entries[pair_index(params.d, members[a], members[b])] = params.beta_star
    return NoisyMatrix(d=params.d, entries=entries)


def sample_support(d: int, s_star: int, rng: np.random.Generator) -> frozenset[int]:
    """Uniform s_star-subset of {1..d} via a Fisher-Yates prefix shuffle."""
    labels = np.arange(1, d + 1)
    for k in range(s_star):
        j = int(rng.integers(k, d))
        labels[k], labels[j] = labels[j], labels[k]
    return frozenset(int(v) for v in labels[:s_star])


def _pair_inside_mask(d: int, support: frozenset[int]) -> np.ndarray:
    member = np.zeros(d + 1, dtype=bool)
    member[list(support)] = True
    mask = np.zeros(n_pairs(d), dtype=bool)
    pos = 0
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            mask[pos] = member[i] and member[j]
            pos += 1
    return mask


def gen_submatrix(params: ModelParams) -> PlantedInstance:
    """Draw a submatrix-model instance, deterministically from the seed."""
    params.validate()
    if params.kind != SUBMATRIX:
        raise InvalidParams("gen_submatrix requires kind='submatrix'")
    rng = generator(params.seed)
    support = sample_support(params.d, params.s_star, rng)
    m = n_pairs(params.d)
    assert params.noise is not None
    if params.noise.kind == GAUSSIAN:
        theta = np.where(_pair_inside_mask(params.d, support), params.beta_star, 0.0)
        entries = theta + params.noise.scale * rng.standard_normal(m)
    else:
        signs = 2.0 * rng.integers(0, 2, size=m).astype(np.float64) - 1.0
        entries = params.noise.scale * signs
    return PlantedInstance(
        matrix=NoisyMatrix(d=params.d, entries=entries), support=support, params=params
    )


def gen_sbm(params: ModelParams) -> PlantedInstance:
    """Draw a block-model adjacency matrix, deterministically from the seed."""
    params.validate()
    if params.kind != SBM:
        raise InvalidParams("gen_sbm requires kind='sbm'")
    rng = generator(params.seed)
    support = sample_support(params.d, params.s_star, rng)
    m = n_pairs(params.d)
    prob = np.where(_pair_inside_mask(params.d, support), params.beta_star, params.beta_tilde)
    entries = (rng.random(m) < prob).astype(np.float64)
    return PlantedInstance(
        matrix=NoisyMatrix(d=params.d, entries=entries), support=support, params=params
    )


def generate(params: ModelParams) -> PlantedInstance:
    """Dispatch on the model kind."""
    if params.kind == SBM:
        return gen_sbm(params)
    return gen_submatrix(params)
