"""Slot-by-slot simulation of the full protocol, as an empirical cross-check.

Each slot: vehicles wake up independently; in every coalition the smallest-id
active vehicle is scheduled and the rest stay silent; the transmission
succeeds only when every vehicle outside the coalition is idle; the scheduled
vehicle draws encounter indicators for its coalition's RSUs and picks a relay
uniformly among those encountered (transmitting directly when none); the fee
goes to the chosen relay whether or not the slot collided; an RSU pays the
receive cost for every encounter with its coalition's scheduled vehicle and
the forward cost when it is the one picked.

Everything is accumulated as integer event counts first, so vehicle payments
and RSU revenues balance exactly and all means and standard errors derive
from the counts. By default encounters are drawn straight from the encounter
matrix; pass a GeometryConfig to draw node placements instead (end-to-end
mode, where encounters of one vehicle with different RSUs are correlated
through its position and only qualitative agreement with the closed forms is
expected).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import default_backend, run_chunk
from .geometry import GeometryConfig, positions_from_uniforms
from .model import CoalitionStructure, GameConfig, canonical_structure, check_structure

__all__ = ["EmpiricalReport", "simulate_slots"]

DEFAULT_CHUNK = 65_536


@dataclass(frozen=True)
class EmpiricalReport:
    """Sample means, standard errors, and raw event counts of one run."""

    structure: CoalitionStructure
    n_slots: int
    seed: int
    backend: str
    # per vehicle (K,)
    throughput: np.ndarray
    throughput_se: np.ndarray
    payment: np.ndarray
    payment_se: np.ndarray
    vehicle_payoff: np.ndarray
    vehicle_payoff_se: np.ndarray
    # per RSU (M,)
    revenue: np.ndarray
    revenue_se: np.ndarray
    cost: np.ndarray
    cost_se: np.ndarray
    rsu_payoff: np.ndarray
    rsu_payoff_se: np.ndarray
    # event counts
    scheduled: np.ndarray       # (K,)
    success_no_relay: np.ndarray
    fail_no_relay: np.ndarray
    encounters: np.ndarray      # (M, K) scheduled-vehicle encounters
    relays_success: np.ndarray  # (M, K)
    relays_fail: np.ndarray     # (M, K)

    @property
    def relays(self) -> np.ndarray:
        """Relay events per (RSU, vehicle), collided slots included."""
        return self.relays_success + self.relays_fail

    def rows(self) -> list[tuple]:
        """Flat (player, quantity, estimate, stderr, n_slots, seed) rows."""
        out = []
        k = self.throughput.shape[0]
        for i in range(k):
            out.append((i + 1, "throughput", float(self.throughput[i]),
                        float(self.throughput_se[i]), self.n_slots, self.seed))
            out.append((i + 1, "payment", float(self.payment[i]),
                        float(self.payment_se[i]), self.n_slots, self.seed))
            out.append((i + 1, "payoff", float(self.vehicle_payoff[i]),
                        float(self.vehicle_payoff_se[i]), self.n_slots, self.seed))
        for j in range(self.revenue.shape[0]):
            player = k + j + 1
            out.append((player, "revenue", float(self.revenue[j]),
                        float(self.revenue_se[j]), self.n_slots, self.seed))
            out.append((player, "cost", float(self.cost[j]),
                        float(self.cost_se[j]), self.n_slots, self.seed))
            out.append((player, "payoff", float(self.rsu_payoff[j]),
                        float(self.rsu_payoff_se[j]), self.n_slots, self.seed))
        return out


def _layout(cs, cfg):
    """Flatten the vehicle-containing coalitions into kernel-friendly arrays."""
    veh_flat, rsu_flat = [], []
    veh_start, rsu_start = [0], [0]
    for block in canonical_structure(cs):
        vehicles = sorted(m - 1 for m in block if m <= cfg.K)
        if not vehicles:
            continue
        rsus = sorted(m - cfg.K - 1 for m in block if m > cfg.K)
        veh_flat.extend(vehicles)
        rsu_flat.extend(rsus)
        veh_start.append(len(veh_flat))
        rsu_start.append(len(rsu_flat))
    return (np.asarray(veh_flat, np.int64), np.asarray(veh_start, np.int64),
            np.asarray(rsu_flat, np.int64), np.asarray(rsu_start, np.int64))


def _mean_se(total: np.ndarray, total_sq: np.ndarray, n: int):
    mean = total / n
    if n > 1:
        var = np.maximum(total_sq - n * mean * mean, 0.0) / (n - 1)
        se = np.sqrt(var / n)
    else:
        se = np.zeros_like(mean)
    return mean, se


def simulate_slots(cs, cfg: GameConfig, n_slots: int, seed: int = 0, *,
                   use_numba: bool | None = None,
                   geometry: GeometryConfig | None = None,
                   chunk_slots: int = DEFAULT_CHUNK) -> EmpiricalReport:
    """Simulate a coalition structure for n_slots slots.

    Deterministic for a given seed and independent of chunk_slots: randomness
    comes from one PCG64 stream consumed in a fixed order. use_numba=None
    picks the compiled path when available (see _kernels.DISABLE_ENV),
    True/False forces one path; both paths give identical reports.
    """
    errors = check_structure(cs, cfg.n_players)
    if errors:
        raise ValueError("invalid structure: " + "; ".join(errors))
    if n_slots < 1:
        raise ValueError("n_slots must be at least 1")
    if geometry is not None and len(geometry.range_km) != cfg.K:
        raise ValueError(f"geometry has {len(geometry.range_km)} ranges, expected {cfg.K}")

    if use_numba is None:
        backend = default_backend()
    else:
        backend = "numba" if use_numba else "numpy"

    K, M = cfg.K, cfg.M
    veh_flat, veh_start, rsu_flat, rsu_start = _layout(cs, cfg)
    n_coal = len(veh_start) - 1

    scheduled = np.zeros(K, np.int64)
    enc_cnt = np.zeros((M, K), np.int64)
    relay_succ = np.zeros((M, K), np.int64)
    relay_fail = np.zeros((M, K), np.int64)
    succ_norelay = np.zeros(K, np.int64)
    fail_norelay = np.zeros(K, np.int64)

    # keep the (chunk, M, K) encounter block modest for large games
    chunk_slots = max(1024, min(chunk_slots, (1 << 24) // max(1, M * K)))
    rng = np.random.default_rng(seed)
    ranges_sq = None
    if geometry is not None:
        ranges_sq = (np.asarray(geometry.range_km, np.float64) ** 2)[None, None, :]

    done = 0
    while done < n_slots:
        m = min(chunk_slots, n_slots - done)
        if geometry is None:
            u = rng.random((m, K + M + n_coal))
            active = u[:, :K] < cfg.p[None, :]
            enc_ind = u[:, K:K + M, None] < cfg.enc[None, :, :]
            u_sel = u[:, K + M:]
        else:
            n_nodes = K + M
            u = rng.random((m, K + 2 * n_nodes + n_coal))
            active = u[:, :K] < cfg.p[None, :]
            pos = positions_from_uniforms(u[:, K:K + 2 * n_nodes],
                                          geometry.side_km, geometry.placement)
            diff = pos[:, K:, None, :] - pos[:, None, :K, :]
            dist_sq = np.einsum("smkc,smkc->smk", diff, diff)
            enc_ind = dist_sq <= ranges_sq
            u_sel = u[:, K + 2 * n_nodes:]
        enc_ind = np.ascontiguousarray(enc_ind)
        run_chunk(backend, active, enc_ind, u_sel,
                  veh_flat, veh_start, rsu_flat, rsu_start,
                  scheduled, enc_cnt, relay_succ, relay_fail,
                  succ_norelay, fail_norelay)
        done += m

    n = n_slots
    relays = relay_succ + relay_fail
    rate = 1.0 + cfg.delta.T          # (M, K): rate when relayed by that RSU
    fee = cfg.price                   # (M, K)
    enc_only = enc_cnt - relays

    sum_t = succ_norelay + (relay_succ * rate).sum(axis=0)
    sumsq_t = succ_norelay + (relay_succ * rate * rate).sum(axis=0)
    sum_p = (relays * fee).sum(axis=0)
    sumsq_p = (relays * fee * fee).sum(axis=0)
    u_relay_ok = cfg.alpha[None, :] * rate - cfg.beta[None, :] * fee
    u_relay_bad = -cfg.beta[None, :] * fee
    sum_u = succ_norelay * cfg.alpha + (relay_succ * u_relay_ok).sum(axis=0) \
        + (relay_fail * u_relay_bad).sum(axis=0)
    sumsq_u = succ_norelay * cfg.alpha ** 2 + (relay_succ * u_relay_ok ** 2).sum(axis=0) \
        + (relay_fail * u_relay_bad ** 2).sum(axis=0)

    sum_r = (relays * fee).sum(axis=1)
    sumsq_r = (relays * fee * fee).sum(axis=1)
    cost_enc = cfg.cost_rcv
    cost_relay = cfg.cost_rcv + cfg.cost_fwd
    sum_c = (enc_only * cost_enc + relays * cost_relay).sum(axis=1)
    sumsq_c = (enc_only * cost_enc ** 2 + relays * cost_relay ** 2).sum(axis=1)
    ut_enc = -cfg.mu[:, None] * cost_enc
    ut_relay = cfg.gamma[:, None] * fee - cfg.mu[:, None] * cost_relay
    sum_ut = (enc_only * ut_enc + relays * ut_relay).sum(axis=1)
    sumsq_ut = (enc_only * ut_enc ** 2 + relays * ut_relay ** 2).sum(axis=1)

    thr, thr_se = _mean_se(sum_t, sumsq_t, n)
    pay, pay_se = _mean_se(sum_p, sumsq_p, n)
    upv, upv_se = _mean_se(sum_u, sumsq_u, n)
    rev, rev_se = _mean_se(sum_r, sumsq_r, n)
    cst, cst_se = _mean_se(sum_c, sumsq_c, n)
    upr, upr_se = _mean_se(sum_ut, sumsq_ut, n)

    return EmpiricalReport(
        structure=canonical_structure(cs), n_slots=n_slots, seed=seed, backend=backend,
        throughput=thr, throughput_se=thr_se,
        payment=pay, payment_se=pay_se,
        vehicle_payoff=upv, vehicle_payoff_se=upv_se,
        revenue=rev, revenue_se=rev_se,
        cost=cst, cost_se=cst_se,
        rsu_payoff=upr, rsu_payoff_se=upr_se,
        scheduled=scheduled, success_no_relay=succ_norelay, fail_no_relay=fail_norelay,
        encounters=enc_cnt, relays_success=relay_succ, relays_fail=relay_fail)
