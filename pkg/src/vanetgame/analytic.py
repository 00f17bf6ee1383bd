"""Closed-form per-player quantities inside a single coalition.

Scheduling rule: in each slot, the active coalition vehicle with the smallest
id transmits and the other members stay silent. A scheduled vehicle picks one
relay uniformly at random among the coalition RSUs that encounter it.

Throughput carries a collision discount (all vehicles outside the coalition
must be inactive for the slot to succeed); payments, revenues and costs are
charged per scheduled transmission whether or not it collides. All functions
are pure and side-effect free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import Coalition, GameConfig, split_members

__all__ = [
    "ABS_TOL",
    "PayoffReport",
    "transmission_share",
    "relay_usage_prob",
    "relay_weighted_mean",
    "oracle_relay_mean",
    "rate_gain",
    "fee_per_transmission",
    "throughput",
    "avg_payment",
    "revenue",
    "cost",
    "player_payoffs",
]

# Absolute tolerance used for the exact identities among these quantities.
ABS_TOL = 1e-12

_ORACLE_MAX_RSUS = 20


def _require_vehicle_member(S, i: int, cfg: GameConfig) -> None:
    if not cfg.is_vehicle(i) or i not in S:
        raise ValueError(f"player {i} is not a vehicle member of coalition {sorted(S)}")


def _require_rsu_member(S, j: int, cfg: GameConfig) -> None:
    if not cfg.is_rsu(j) or j not in S:
        raise ValueError(f"player {j} is not an RSU member of coalition {sorted(S)}")


def transmission_share(S, i: int, cfg: GameConfig) -> float:
    """Long-run fraction of slots in which vehicle i is the one scheduled.

    The smallest-id member transmits whenever it is active; every other member
    transmits only when active while all smaller-id members are inactive.
    """
    _require_vehicle_member(S, i, cfg)
    vehicles, _ = split_members(S, cfg.K)
    share = float(cfg.p[cfg.vrow(i)])
    for v in vehicles:
        if v < i:
            share *= 1.0 - cfg.p[cfg.vrow(v)]
    return float(share)


def _member_encounters(S, i: int, cfg: GameConfig):
    """Coalition RSUs (sorted) and their encounter probabilities with vehicle i."""
    _, rsus = split_members(S, cfg.K)
    q = [float(cfg.enc[cfg.rrow(j), cfg.vrow(i)]) for j in rsus]
    return rsus, q


def relay_usage_prob(S, i: int, j: int, cfg: GameConfig) -> float:
    """Probability that vehicle i both encounters RSU j and picks it as relay.

    Grouped by the number of competing encountered RSUs: a set of b competitors
    leaves j a 1/(b+1) chance under the uniform pick.
    """
    _require_vehicle_member(S, i, cfg)
    _require_rsu_member(S, j, cfg)
    rsus, q = _member_encounters(S, i, cfg)
    jpos = rsus.index(j)
    others = [q[k] for k in range(len(q)) if k != jpos]
    m = len(others)
    bracket = 0.0
    for n_competitors in range(m + 1):
        level = 0.0
        for comb in itertools.combinations(range(m), n_competitors):
            inside = set(comb)
            prob = 1.0
            for k in range(m):
                prob *= others[k] if k in inside else 1.0 - others[k]
            level += prob
        bracket += level / (n_competitors + 1.0)
    return q[jpos] * bracket


def relay_weighted_mean(S, i: int, weights, cfg: GameConfig) -> float:
    """Expected weight of the relay vehicle i ends up using (0 if none).

    `weights` maps each coalition RSU id to a weight. The expectation runs over
    every non-empty encounter set, grouped by size, taking the plain mean of
    the weights inside the set: exactly the distribution induced by the
    uniform relay pick. With the rate-increase column as weights this is the
    average rate boost; with the price column it is the average fee per
    scheduled transmission. Returns 0 when the coalition has no RSUs.
    """
    _require_vehicle_member(S, i, cfg)
    rsus, q = _member_encounters(S, i, cfg)
    missing = [j for j in rsus if j not in weights]
    if missing:
        raise ValueError(f"weights missing for RSUs {missing}")
    w = [float(weights[j]) for j in rsus]
    n = len(rsus)
    total = 0.0
    for size in range(1, n + 1):
        level = 0.0
        for comb in itertools.combinations(range(n), size):
            inside = set(comb)
            prob = 1.0
            for k in range(n):
                prob *= q[k] if k in inside else 1.0 - q[k]
            wsum = 0.0
            for k in comb:
                wsum += w[k]
            level += wsum * prob
        total += level / size
    return total


def oracle_relay_mean(S, i: int, weights, cfg: GameConfig):
    """Brute-force counterpart of the grouped sums above, for validation.

    Enumerates all 2^(#RSUs) encounter sets directly and, inside each set,
    averages over the uniform relay choices. Returns the expected weight and
    the per-RSU probability of being the chosen relay. Kept deliberately
    independent of relay_weighted_mean / relay_usage_prob.
    """
    _require_vehicle_member(S, i, cfg)
    rsus, q = _member_encounters(S, i, cfg)
    if len(rsus) > _ORACLE_MAX_RSUS:
        raise ValueError(f"enumeration bound exceeded: {len(rsus)} RSUs > {_ORACLE_MAX_RSUS}")
    w = [float(weights[j]) for j in rsus]
    n = len(rsus)
    value = 0.0
    chosen = {j: 0.0 for j in rsus}
    for mask in range(1 << n):
        prob = 1.0
        members = []
        for k in range(n):
            if mask >> k & 1:
                prob *= q[k]
                members.append(k)
            else:
                prob *= 1.0 - q[k]
        if not members:
            continue
        size = len(members)
        wsum = 0.0
        for k in members:
            wsum += w[k]
        value += prob * wsum / size
        for k in members:
            chosen[rsus[k]] += prob / size
    return value, chosen


def _delta_weights(S, i: int, cfg: GameConfig) -> dict:
    _, rsus = split_members(S, cfg.K)
    return {j: float(cfg.delta[cfg.vrow(i), cfg.rrow(j)]) for j in rsus}


def _price_weights(S, i: int, cfg: GameConfig) -> dict:
    _, rsus = split_members(S, cfg.K)
    return {j: float(cfg.price[cfg.rrow(j), cfg.vrow(i)]) for j in rsus}


def rate_gain(S, i: int, cfg: GameConfig) -> float:
    """Average data-rate increase vehicle i gets from coalition relaying."""
    return relay_weighted_mean(S, i, _delta_weights(S, i, cfg), cfg)


def fee_per_transmission(S, i: int, cfg: GameConfig) -> float:
    """Average fee vehicle i owes per scheduled transmission."""
    return relay_weighted_mean(S, i, _price_weights(S, i, cfg), cfg)


def throughput(S, i: int, cfg: GameConfig) -> float:
    """Average successful rate of vehicle i.

    share * (1 + rate gain) * probability that every vehicle outside the
    coalition is inactive. The outside product runs over all non-member
    vehicles: any active outsider transmits in its own coalition and collides,
    however the outsiders are grouped.
    """
    _require_vehicle_member(S, i, cfg)
    vehicles, _ = split_members(S, cfg.K)
    su = set(vehicles)
    t = transmission_share(S, i, cfg) * (1.0 + rate_gain(S, i, cfg))
    for v in cfg.vehicles:
        if v not in su:
            t *= 1.0 - cfg.p[cfg.vrow(v)]
    return float(t)


def avg_payment(S, i: int, cfg: GameConfig) -> float:
    """Average fee per slot: share times average fee per scheduled transmission.

    Charged whenever the vehicle is scheduled and relayed, collisions
    included, so there is no outside-inactivity factor here.
    """
    return transmission_share(S, i, cfg) * fee_per_transmission(S, i, cfg)


def revenue(S, j: int, cfg: GameConfig) -> float:
    """Average fee income per slot of RSU j across the coalition's vehicles."""
    _require_rsu_member(S, j, cfg)
    vehicles, _ = split_members(S, cfg.K)
    total = 0.0
    for i in vehicles:
        total += (transmission_share(S, i, cfg)
                  * relay_usage_prob(S, i, j, cfg)
                  * cfg.price[cfg.rrow(j), cfg.vrow(i)])
    return float(total)


def cost(S, j: int, cfg: GameConfig) -> float:
    """Average outlay per slot of RSU j.

    Receiving cost accrues whenever j encounters the scheduled vehicle, even
    if another relay is picked; forwarding cost only when j is the one chosen.
    """
    _require_rsu_member(S, j, cfg)
    vehicles, _ = split_members(S, cfg.K)
    total = 0.0
    for i in vehicles:
        vi, rj = cfg.vrow(i), cfg.rrow(j)
        total += transmission_share(S, i, cfg) * (
            cfg.cost_fwd[rj, vi] * relay_usage_prob(S, i, j, cfg)
            + cfg.enc[rj, vi] * cfg.cost_rcv[rj, vi])
    return float(total)


@dataclass(frozen=True)
class PayoffReport:
    """Every per-player quantity for one coalition, keyed by player id.

    relay_prob maps RSU id -> {vehicle id -> probability of being its relay}.
    total_payoff is the sum of all member payoffs.
    """

    members: Coalition
    share: dict
    rate_gain: dict
    fee: dict
    relay_prob: dict
    throughput: dict
    payment: dict
    revenue: dict
    cost: dict
    vehicle_payoff: dict
    rsu_payoff: dict
    total_payoff: float

    def payoff_of(self, player: int) -> float:
        if player in self.vehicle_payoff:
            return self.vehicle_payoff[player]
        return self.rsu_payoff[player]


def player_payoffs(S, cfg: GameConfig) -> PayoffReport:
    """Full closed-form report for one coalition.

    Vehicle payoff: alpha * throughput - beta * payment.
    RSU payoff: gamma * revenue - mu * cost.
    """
    S = frozenset(S)
    if not S:
        raise ValueError("empty coalition")
    vehicles, rsus = split_members(S, cfg.K)
    share = {i: transmission_share(S, i, cfg) for i in vehicles}
    gain = {i: rate_gain(S, i, cfg) for i in vehicles}
    fee = {i: fee_per_transmission(S, i, cfg) for i in vehicles}
    thr = {i: throughput(S, i, cfg) for i in vehicles}
    pay = {i: share[i] * fee[i] for i in vehicles}
    relay = {j: {i: relay_usage_prob(S, i, j, cfg) for i in vehicles} for j in rsus}
    rev = {j: revenue(S, j, cfg) for j in rsus}
    cst = {j: cost(S, j, cfg) for j in rsus}
    u_veh = {i: float(cfg.alpha[cfg.vrow(i)]) * thr[i] - float(cfg.beta[cfg.vrow(i)]) * pay[i]
             for i in vehicles}
    u_rsu = {j: float(cfg.gamma[cfg.rrow(j)]) * rev[j] - float(cfg.mu[cfg.rrow(j)]) * cst[j]
             for j in rsus}
    total = 0.0
    for i in vehicles:
        total += u_veh[i]
    for j in rsus:
        total += u_rsu[j]
    return PayoffReport(
        members=S, share=share, rate_gain=gain, fee=fee, relay_prob=relay,
        throughput=thr, payment=pay, revenue=rev, cost=cst,
        vehicle_payoff=u_veh, rsu_payoff=u_rsu, total_payoff=total)
