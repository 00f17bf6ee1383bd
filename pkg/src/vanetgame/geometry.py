"""Monte Carlo estimation of encounter probabilities from random placement.

Every slot, all nodes are placed independently in a square area (fresh
positions each slot, static within a slot). An RSU encounters a vehicle when
their Euclidean distance is at most the vehicle's transmission range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GRID_CELLS",
    "GeometryConfig",
    "EncounterEstimate",
    "analytic_pair_encounter",
    "estimate_encounter_matrix",
]

GRID_CELLS = 10

PLACEMENTS = ("continuous", "grid")


@dataclass(frozen=True)
class GeometryConfig:
    """Square-area placement model used to estimate encounter probabilities.

    placement "continuous" draws positions uniformly over the square;
    "grid" snaps every node to the center of one of GRID_CELLS x GRID_CELLS
    uniformly chosen cells. range_km holds one transmission range per vehicle.
    """

    side_km: float
    range_km: tuple
    placement: str = "continuous"
    n_slots: int = 1_000_000
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "side_km", float(self.side_km))
        object.__setattr__(self, "range_km", tuple(float(r) for r in self.range_km))
        if self.side_km <= 0.0:
            raise ValueError("side_km must be positive")
        if any(r < 0.0 for r in self.range_km):
            raise ValueError("transmission ranges must be nonnegative")
        if self.n_slots < 1:
            raise ValueError("n_slots must be at least 1")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")


def analytic_pair_encounter(d: float, side: float = 1.0) -> float:
    """Exact probability that two uniform points in a square lie within d.

    With x = d/side: pi*x^2 - (8/3)*x^3 + x^4/2, valid for 0 <= d <= side
    (ranges beyond the side are rejected; the sweep never needs them).
    """
    if side <= 0.0:
        raise ValueError("side must be positive")
    if d < 0.0 or d > side:
        raise ValueError(f"range {d} outside [0, {side}]")
    x = d / side
    return math.pi * x * x - (8.0 / 3.0) * x ** 3 + 0.5 * x ** 4


def positions_from_uniforms(u: np.ndarray, side: float, placement: str) -> np.ndarray:
    """Map uniforms of shape (n, nodes*2) to positions of shape (n, nodes, 2)."""
    pos = u.reshape(u.shape[0], -1, 2)
    if placement == "continuous":
        return pos * side
    if placement == "grid":
        cells = np.minimum((pos * GRID_CELLS).astype(np.int64), GRID_CELLS - 1)
        return (cells + 0.5) * (side / GRID_CELLS)
    raise ValueError(f"unknown placement {placement!r}")


@dataclass(frozen=True)
class EncounterEstimate:
    """Empirical encounter matrix with binomial standard errors."""

    matrix: np.ndarray   # (M, K)
    stderr: np.ndarray   # (M, K)
    n_slots: int
    seed: int

    def encounter_section(self) -> dict:
        """The `encounter` config-file section this estimate corresponds to."""
        return {"matrix": [[float(v) for v in row] for row in self.matrix]}


def estimate_encounter_matrix(geo: GeometryConfig, K: int, M: int,
                              chunk_slots: int = 65_536) -> EncounterEstimate:
    """Estimate the (M, K) encounter matrix by redrawing placements per slot.

    Positions are drawn vehicle 1..K then RSU 1..M, x before y, from a PCG64
    stream seeded with geo.seed, so results are bit-for-bit reproducible for
    a given config. Standard errors are binomial: sqrt(p*(1-p)/n).
    """
    if len(geo.range_km) != K:
        raise ValueError(f"range_km has {len(geo.range_km)} entries, expected {K}")
    n_nodes = K + M
    ranges_sq = (np.asarray(geo.range_km, dtype=np.float64) ** 2)[None, None, :]
    rng = np.random.default_rng(geo.seed)
    counts = np.zeros((M, K), dtype=np.int64)
    done = 0
    while done < geo.n_slots:
        m = min(chunk_slots, geo.n_slots - done)
        u = rng.random((m, n_nodes * 2))
        pos = positions_from_uniforms(u, geo.side_km, geo.placement)
        veh = pos[:, :K, :]
        rsu = pos[:, K:, :]
        diff = rsu[:, :, None, :] - veh[:, None, :, :]
        dist_sq = np.einsum("smkc,smkc->smk", diff, diff)
        counts += (dist_sq <= ranges_sq).sum(axis=0)
        done += m
    phat = counts / float(geo.n_slots)
    stderr = np.sqrt(phat * (1.0 - phat) / float(geo.n_slots))
    return EncounterEstimate(matrix=phat, stderr=stderr,
                             n_slots=geo.n_slots, seed=geo.seed)
