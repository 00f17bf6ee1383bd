"""Structure-level payoffs, profitability, and core stability analysis."""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass

import numpy as np

from .analytic import ABS_TOL, PayoffReport, player_payoffs
from .model import (Coalition, CoalitionStructure, GameConfig, check_structure,
                    split_members)

__all__ = [
    "structure_payoffs",
    "structure_reports",
    "vehicle_coalition_profitability",
    "pricing_cancellation_check",
    "proper_coalitions",
    "CoreConditions",
    "CoreMembership",
    "StabilityVerdict",
    "core_sufficient_conditions",
    "core_membership",
    "stability_verdict",
    "CheckResult",
    "run_identity_checks",
]

_ENUM_MAX_PLAYERS = 20


def structure_reports(cs, cfg: GameConfig) -> list[PayoffReport]:
    """Per-coalition payoff reports for a full structure."""
    errors = check_structure(cs, cfg.n_players)
    if errors:
        raise ValueError("invalid structure: " + "; ".join(errors))
    return [player_payoffs(block, cfg) for block in cs]


def structure_payoffs(cs, cfg: GameConfig) -> np.ndarray:
    """Payoff of every player under a coalition structure.

    Entry k holds the payoff of player k+1, computed inside that player's own
    coalition. Throughput already discounts for all outside vehicles, so the
    vector does not depend on how the outsiders are grouped among themselves.
    """
    out = np.zeros(cfg.n_players)
    for rep in structure_reports(cs, cfg):
        for i, u in rep.vehicle_payoff.items():
            out[i - 1] = u
        for j, u in rep.rsu_payoff.items():
            out[j - 1] = u
    return out


def vehicle_coalition_profitability(S, cfg: GameConfig) -> dict:
    """Per-member test that joining a vehicle-only coalition beats acting alone.

    For each member the closed-form ratio of its standalone payoff to its
    in-coalition payoff reduces to the product of (1 - p) over the
    larger-id members, which never exceeds one: scheduling priority can only
    help. Ties (in particular the largest-id member) count as profitable.
    """
    vehicles, rsus = split_members(S, cfg.K)
    if rsus:
        raise ValueError(f"coalition contains RSUs {list(rsus)}; profitability "
                         "condition is defined for vehicle-only coalitions")
    if not vehicles:
        raise ValueError("empty coalition")
    desc = sorted(vehicles, reverse=True)
    size = len(desc)
    out = {}
    for pos, member in enumerate(desc, start=1):
        numerator = 1.0
        for v in desc:
            if v != member:
                numerator *= 1.0 - cfg.p[cfg.vrow(v)]
        if pos == size:
            ratio = numerator
        else:
            denominator = 1.0
            for v in desc[pos:]:
                denominator *= 1.0 - cfg.p[cfg.vrow(v)]
            if denominator == 0.0:
                # some smaller-id member is always active; both payoffs are 0
                out[member] = True
                continue
            ratio = numerator / denominator
        out[member] = ratio <= 1.0 + ABS_TOL
    return out


def pricing_cancellation_check(S, cfg: GameConfig):
    """Verify that fees cancel out of the coalition's summed payoff.

    Requires unit payment weight on every member vehicle and unit revenue
    weight on every member RSU (raises "weights not 1" otherwise: with other
    weights the cancellation does not hold and the check is vacuous). Returns
    (holds, residual) where the residual is the larger of the zero-price
    sum-payoff difference and the payment/revenue imbalance.
    """
    vehicles, rsus = split_members(S, cfg.K)
    off = [i for i in vehicles if cfg.beta[cfg.vrow(i)] != 1.0]
    off += [j for j in rsus if cfg.gamma[cfg.rrow(j)] != 1.0]
    if off:
        raise ValueError(f"weights not 1 for players {off}")
    rep = player_payoffs(S, cfg)
    no_fees = dataclasses.replace(cfg, price=np.zeros_like(cfg.price))
    rep0 = player_payoffs(S, no_fees)
    paid = 0.0
    for i in vehicles:
        paid += rep.payment[i]
    earned = 0.0
    for j in rsus:
        earned += rep.revenue[j]
    residual = max(abs(rep.total_payoff - rep0.total_payoff), abs(paid - earned))
    return residual <= ABS_TOL, residual


def proper_coalitions(n_players: int):
    """Every non-empty proper subset of {1..n}, in a fixed bitmask order."""
    full = (1 << n_players) - 1
    for mask in range(1, full):
        yield frozenset(k + 1 for k in range(n_players) if mask >> k & 1)


@dataclass(frozen=True)
class CoreConditions:
    """Outcome of the three-part sufficient check for an unblockable grand vector.

    Witnesses identify the first offending (player, coalition) found in the
    fixed enumeration order; None when a condition holds.
    """

    weights_positive: bool
    weight_witness: int | None
    gains_strict: bool
    gain_witness: tuple | None
    grand_preferred: bool
    preference_witness: tuple | None

    @property
    def all_hold(self) -> bool:
        return self.weights_positive and self.gains_strict and self.grand_preferred


def core_sufficient_conditions(cfg: GameConfig) -> CoreConditions:
    """Check three conditions that together make the grand vector unblockable.

    1) every payoff weight is strictly positive;
    2) inside every proper coalition with at least one vehicle, each vehicle
       member's weighted throughput strictly exceeds its weighted payment and
       each RSU member's weighted revenue strictly exceeds its weighted cost
       (RSU-only coalitions are skipped: all their quantities are identically
       zero, so the members are already equivalent to acting alone);
    3) every member of every proper coalition, RSU-only ones included, earns
       strictly more in the grand coalition than inside that coalition.

    Condition 3 is demanding. With two or more RSUs and fees above forwarding
    costs it fails: an RSU serving vehicles as the only relay beats sharing
    them with competitors, and the check reports that witness. Condition 3
    implies that no coalition can block, so whenever all three hold the grand
    payoff vector is in the core.
    """
    n = cfg.n_players
    if n > _ENUM_MAX_PLAYERS:
        raise ValueError(f"enumeration bound exceeded: {n} players > {_ENUM_MAX_PLAYERS}")

    weight_witness = None
    for i in cfg.vehicles:
        if not (cfg.alpha[cfg.vrow(i)] > 0.0 and cfg.beta[cfg.vrow(i)] > 0.0):
            weight_witness = i
            break
    if weight_witness is None:
        for j in cfg.rsus:
            if not (cfg.gamma[cfg.rrow(j)] > 0.0 and cfg.mu[cfg.rrow(j)] > 0.0):
                weight_witness = j
                break

    grand = player_payoffs(frozenset(range(1, n + 1)), cfg)
    gain_witness = None
    preference_witness = None
    for S in proper_coalitions(n):
        vehicles, rsus = split_members(S, cfg.K)
        rep = player_payoffs(S, cfg)
        if vehicles and gain_witness is None:
            for i in vehicles:
                vi = cfg.vrow(i)
                if not (cfg.alpha[vi] * rep.throughput[i] > cfg.beta[vi] * rep.payment[i]):
                    gain_witness = (i, S)
                    break
            if gain_witness is None:
                for j in rsus:
                    rj = cfg.rrow(j)
                    if not (cfg.gamma[rj] * rep.revenue[j] > cfg.mu[rj] * rep.cost[j]):
                        gain_witness = (j, S)
                        break
        if preference_witness is None:
            for m in sorted(S):
                if not (grand.payoff_of(m) > rep.payoff_of(m)):
                    preference_witness = (m, S)
                    break
        if gain_witness is not None and preference_witness is not None:
            break
    return CoreConditions(
        weights_positive=weight_witness is None,
        weight_witness=weight_witness,
        gains_strict=gain_witness is None,
        gain_witness=gain_witness,
        grand_preferred=preference_witness is None,
        preference_witness=preference_witness,
    )


@dataclass(frozen=True)
class CoreMembership:
    in_core: bool
    blocking: Coalition | None


def core_membership(x, cfg: GameConfig) -> CoreMembership:
    """Test whether payoff vector x is unblocked by every coalition.

    A coalition blocks when every one of its members earns strictly more
    inside it than under x. The feasible payoffs of a coalition are the single
    vector produced by the fixed scheduler and fixed fees. All non-empty
    coalitions are candidates, the full player set included (it never blocks
    its own payoff vector, but does block dominated ones). When blockers
    exist, the lexicographically smallest one (on sorted member lists) is
    reported, after re-verifying strict domination member by member.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (cfg.n_players,):
        raise ValueError(f"payoff vector has shape {x.shape}, expected ({cfg.n_players},)")
    if cfg.n_players > _ENUM_MAX_PLAYERS:
        raise ValueError(f"enumeration bound exceeded: {cfg.n_players} players")
    n = cfg.n_players
    blockers = []
    for mask in range(1, 1 << n):
        S = frozenset(k + 1 for k in range(n) if mask >> k & 1)
        rep = player_payoffs(S, cfg)
        if all(rep.payoff_of(m) > x[m - 1] for m in S):
            blockers.append(tuple(sorted(S)))
    if not blockers:
        return CoreMembership(True, None)
    best = min(blockers)
    rep = player_payoffs(frozenset(best), cfg)
    assert all(rep.payoff_of(m) > x[m - 1] for m in best)
    return CoreMembership(False, frozenset(best))


@dataclass(frozen=True)
class StabilityVerdict:
    conditions: CoreConditions
    payoff_vector: np.ndarray
    membership: CoreMembership


def stability_verdict(cfg: GameConfig) -> StabilityVerdict:
    """Sufficient conditions plus direct core membership of the grand vector."""
    conditions = core_sufficient_conditions(cfg)
    grand: CoalitionStructure = (frozenset(range(1, cfg.n_players + 1)),)
    vec = structure_payoffs(grand, cfg)
    membership = core_membership(vec, cfg)
    if conditions.all_hold and not membership.in_core:
        raise RuntimeError("internal invariant breach: sufficient conditions hold "
                           f"but the grand vector is blocked by {sorted(membership.blocking)}")
    return StabilityVerdict(conditions, vec, membership)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool | None   # None = skipped
    detail: str


def _uniformized(cfg: GameConfig) -> GameConfig:
    """Copy of cfg with per-vehicle-uniform rate gains and fees."""
    delta = np.repeat(cfg.delta[:, :1], cfg.M, axis=1) if cfg.M else cfg.delta
    price = np.repeat(cfg.price[:1, :], cfg.M, axis=0) if cfg.M else cfg.price
    return dataclasses.replace(cfg, delta=delta, price=price)


def run_identity_checks(cfg: GameConfig, max_structures: int = 64) -> list[CheckResult]:
    """Exercise the exact identities tying the closed-form quantities together.

    Runs over every coalition of every partition when the player count is
    small (a deterministic sample of partitions otherwise) and reports one
    result per identity. Used by the CLI `check` subcommand.
    """
    from .model import enumerate_partitions, normalize_structure
    from .analytic import (fee_per_transmission, oracle_relay_mean, rate_gain,
                           relay_usage_prob, transmission_share)

    n = cfg.n_players
    partitions = enumerate_partitions(n) if n <= 8 else None
    if partitions is None or len(partitions) > max_structures:
        partitions = (partitions or enumerate_partitions(min(n, 8)))[:max_structures]
    coalitions = sorted({block for cs in partitions for block in cs}, key=sorted)

    results: list[CheckResult] = []

    def run(name, fn):
        worst = 0.0
        where = ""
        for S in coalitions:
            r = fn(S)
            if r is None:
                continue
            if r > worst:
                worst, where = r, f" (coalition {sorted(S)})"
        results.append(CheckResult(name, worst <= ABS_TOL,
                                   f"max residual {worst:.3e}{where}"))

    def share_sum(S):
        vehicles, _ = split_members(S, cfg.K)
        if not vehicles:
            return None
        total = sum(transmission_share(S, i, cfg) for i in vehicles)
        miss = 1.0
        for i in vehicles:
            miss *= 1.0 - cfg.p[cfg.vrow(i)]
        return abs(total - (1.0 - miss))

    def relay_row_sum(S):
        vehicles, rsus = split_members(S, cfg.K)
        if not vehicles or not rsus:
            return None
        worst = 0.0
        for i in vehicles:
            total = sum(relay_usage_prob(S, i, j, cfg) for j in rsus)
            none = 1.0
            for j in rsus:
                none *= 1.0 - cfg.enc[cfg.rrow(j), cfg.vrow(i)]
            worst = max(worst, abs(total - (1.0 - none)))
        return worst

    def mean_vs_relay_prob(S):
        vehicles, rsus = split_members(S, cfg.K)
        if not vehicles or not rsus:
            return None
        worst = 0.0
        for i in vehicles:
            fee_direct = fee_per_transmission(S, i, cfg)
            gain_direct = rate_gain(S, i, cfg)
            fee_sum = sum(relay_usage_prob(S, i, j, cfg) * cfg.price[cfg.rrow(j), cfg.vrow(i)]
                          for j in rsus)
            gain_sum = sum(relay_usage_prob(S, i, j, cfg) * cfg.delta[cfg.vrow(i), cfg.rrow(j)]
                           for j in rsus)
            worst = max(worst, abs(fee_direct - fee_sum), abs(gain_direct - gain_sum))
        return worst

    def payment_balance(S):
        rep = player_payoffs(S, cfg)
        paid = sum(rep.payment[i] for i in sorted(rep.payment))
        earned = sum(rep.revenue[j] for j in sorted(rep.revenue))
        return abs(paid - earned)

    def oracle_agreement(S):
        vehicles, rsus = split_members(S, cfg.K)
        if not vehicles or not rsus or len(rsus) > 12:
            return None
        worst = 0.0
        for i in vehicles:
            weights = {j: float(cfg.delta[cfg.vrow(i), cfg.rrow(j)]) for j in rsus}
            value, chosen = oracle_relay_mean(S, i, weights, cfg)
            worst = max(worst, abs(value - rate_gain(S, i, cfg)))
            for j in rsus:
                worst = max(worst, abs(chosen[j] - relay_usage_prob(S, i, j, cfg)))
        return worst

    uni = _uniformized(cfg)

    def simplified_forms(S):
        vehicles, rsus = split_members(S, cfg.K)
        if not vehicles:
            return None
        worst = 0.0
        for i in vehicles:
            reach = 1.0
            for j in rsus:
                reach *= 1.0 - uni.enc[uni.rrow(j), uni.vrow(i)]
            reach = 1.0 - reach
            d_i = float(uni.delta[uni.vrow(i), 0]) if rsus else 0.0
            xi_i = float(uni.price[0, uni.vrow(i)]) if rsus else 0.0
            worst = max(worst,
                        abs(rate_gain(S, i, uni) - d_i * reach),
                        abs(fee_per_transmission(S, i, uni) - xi_i * reach))
        return worst

    run("scheduled-share total matches 1 - P(all idle)", share_sum)
    run("relay-choice probabilities total P(any encounter)", relay_row_sum)
    run("fee and rate-gain match relay-probability sums", mean_vs_relay_prob)
    run("vehicle payments equal RSU revenues", payment_balance)
    run("grouped sums match brute-force enumeration", oracle_agreement)
    run("uniform-weight closed forms match general formulas", simplified_forms)

    if (cfg.beta == 1.0).all() and (cfg.gamma == 1.0).all():
        worst = 0.0
        for S in coalitions:
            _, residual = pricing_cancellation_check(S, cfg)
            worst = max(worst, residual)
        results.append(CheckResult("fees cancel out of every coalition's sum payoff",
                                   worst <= ABS_TOL, f"max residual {worst:.3e}"))
    else:
        results.append(CheckResult("fees cancel out of every coalition's sum payoff",
                                   None, "skipped: needs unit payment/revenue weights"))

    rsu_only_ok = True
    norm_ok = True
    for cs in partitions:
        vec = structure_payoffs(cs, cfg)
        for block in cs:
            if all(m > cfg.K for m in block):
                rsu_only_ok &= all(vec[m - 1] == 0.0 for m in block)
        normalized = normalize_structure(cs, cfg.K)
        norm_ok &= bool((structure_payoffs(normalized, cfg) == vec).all())
    results.append(CheckResult("RSU-only coalitions earn exactly zero",
                               rsu_only_ok, "checked over enumerated structures"))
    results.append(CheckResult("normalization preserves every payoff exactly",
                               norm_ok, "checked over enumerated structures"))

    profit_ok = True
    for S in coalitions:
        vehicles, rsus = split_members(S, cfg.K)
        if rsus or not vehicles:
            continue
        verdict = vehicle_coalition_profitability(S, cfg)
        rep = player_payoffs(S, cfg)
        for i in vehicles:
            alone = player_payoffs(frozenset((i,)), cfg).vehicle_payoff[i]
            direct = rep.vehicle_payoff[i] >= alone - ABS_TOL * max(1.0, abs(alone))
            profit_ok &= verdict[i] == direct
    results.append(CheckResult("share-ratio profitability agrees with payoff comparison",
                               profit_ok, "checked over vehicle-only coalitions"))
    return results
