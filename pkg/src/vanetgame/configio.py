"""Config-file loading and the built-in default parameter set.

Config files are JSON with three sections:

  game       K, M, p, delta, price, cost_fwd, cost_rcv, alpha, beta, gamma, mu
             (scalars spread to full arrays; matrices as nested lists)
  encounter  {"matrix": [[...]]} with one row per RSU, or
             {"from_geometry": true} to estimate the matrix from placement
  geometry   side_km, placement, range_km, n_slots, seed

See README.md for the full schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .geometry import EncounterEstimate, GeometryConfig, estimate_encounter_matrix
from .model import GameConfig, make_config, validate_config

__all__ = [
    "ConfigError",
    "LoadedConfig",
    "load_config",
    "resolve_encounter",
    "default_game_config",
    "default_geometry",
    "default_config_dict",
]


class ConfigError(Exception):
    """Invalid config file; .errors carries the full violation list."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class LoadedConfig:
    game: GameConfig
    geometry: GeometryConfig | None
    encounter_from_geometry: bool


_GAME_KEYS = ("p", "delta", "price", "cost_fwd", "cost_rcv", "alpha", "beta", "gamma", "mu")


def _parse_geometry(section, K: int) -> GeometryConfig:
    rng_km = section.get("range_km", 0.2)
    if np.isscalar(rng_km):
        rng_km = (float(rng_km),) * K
    return GeometryConfig(
        side_km=float(section.get("side_km", 1.0)),
        range_km=tuple(float(r) for r in rng_km),
        placement=str(section.get("placement", "continuous")),
        n_slots=int(section.get("n_slots", 1_000_000)),
        seed=int(section.get("seed", 0)),
    )


def load_config(path) -> LoadedConfig:
    """Parse and validate a config file, reporting every problem at once."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path} is not valid JSON: {exc}"]) from exc

    errors = []
    game = doc.get("game")
    if not isinstance(game, dict):
        raise ConfigError([f"{path}: missing or malformed 'game' section"])
    missing = [k for k in ("K", "M", *_GAME_KEYS) if k not in game]
    if missing:
        raise ConfigError([f"{path}: 'game' section missing keys {missing}"])
    K, M = int(game["K"]), int(game["M"])

    encounter = doc.get("encounter", {})
    from_geometry = bool(encounter.get("from_geometry", False))
    if "matrix" in encounter:
        enc = np.asarray(encounter["matrix"], dtype=np.float64)
    elif from_geometry:
        enc = np.zeros((M, K))   # placeholder until resolve_encounter runs
    else:
        errors.append("encounter section needs either 'matrix' or 'from_geometry': true")
        enc = np.zeros((M, K))

    geometry = None
    if "geometry" in doc:
        try:
            geometry = _parse_geometry(doc["geometry"], K)
        except (ValueError, TypeError) as exc:
            errors.append(f"geometry: {exc}")
    if from_geometry and geometry is None:
        errors.append("encounter.from_geometry requires a 'geometry' section")
    if geometry is not None and len(geometry.range_km) != K:
        errors.append(f"geometry.range_km needs {K} entries, got {len(geometry.range_km)}")

    try:
        cfg = make_config(K, M, enc=enc, check=False,
                          **{k: game[k] for k in _GAME_KEYS})
    except (ValueError, TypeError) as exc:
        raise ConfigError(errors + [f"game section: {exc}"]) from exc
    errors.extend(validate_config(cfg))
    if errors:
        raise ConfigError(errors)
    return LoadedConfig(game=cfg, geometry=geometry,
                        encounter_from_geometry=from_geometry)


def resolve_encounter(loaded: LoadedConfig) -> tuple[GameConfig, EncounterEstimate | None]:
    """Fill the encounter matrix from geometry when the file asked for it."""
    if not loaded.encounter_from_geometry:
        return loaded.game, None
    est = estimate_encounter_matrix(loaded.geometry, loaded.game.K, loaded.game.M)
    import dataclasses
    return dataclasses.replace(loaded.game, enc=est.matrix), est


def default_game_config(encounter=0.5) -> GameConfig:
    """Built-in 2-vehicle / 2-RSU parameter set used by the docs and tests."""
    return make_config(
        2, 2, p=0.6, enc=encounter, delta=0.5, price=1.5,
        cost_fwd=0.5, cost_rcv=0.2, alpha=10.0, beta=1.0, gamma=1.0, mu=1.0)


def default_geometry(K: int = 2) -> GeometryConfig:
    return GeometryConfig(side_km=1.0, range_km=(0.2,) * K,
                          placement="continuous", n_slots=1_000_000, seed=20_240_808)


def default_config_dict() -> dict:
    """The default parameter set in config-file form (see configs/default.json)."""
    cfg = default_game_config()
    geo = default_geometry(cfg.K)
    return {
        "game": {
            "K": cfg.K, "M": cfg.M,
            "p": cfg.p.tolist(),
            "delta": cfg.delta.tolist(),
            "price": cfg.price.tolist(),
            "cost_fwd": cfg.cost_fwd.tolist(),
            "cost_rcv": cfg.cost_rcv.tolist(),
            "alpha": cfg.alpha.tolist(),
            "beta": cfg.beta.tolist(),
            "gamma": cfg.gamma.tolist(),
            "mu": cfg.mu.tolist(),
        },
        "encounter": {"matrix": cfg.enc.tolist()},
        "geometry": {
            "side_km": geo.side_km,
            "placement": geo.placement,
            "range_km": list(geo.range_km),
            "n_slots": geo.n_slots,
            "seed": geo.seed,
        },
    }
