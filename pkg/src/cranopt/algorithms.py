"""Iterative energy-minimization procedures and the MSE-descent kernels.

Two entry points:

* ``ran_power_minimization`` - transmit-side minimization under fixed rate
  floors, alternating an SOCP step with reweighting of the fronthaul
  surrogate (clusters sparsify as weights grow on weak beamformer blocks).
* ``joint_energy_minimization`` - block coordinate descent on the
  MSE-reformulated joint cloud+radio energy objective: closed-form receiver
  update, closed-form MSE weight from the cloud-energy utility gradient,
  then a conic transmit-beamformer step, with rates/weights refreshed each
  round.

Both return solutions with serving clusters extracted and a final refit on
the reduced support, so returned iterates replay cleanly against the model
constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ran
from .cloud import CloudInfeasibleError, clone_energy, solve_cloud_allocation
from .conic import build_power_min_socp, build_wmmse_step_socp, extract_beamformers, solve
from .ran import BeamformerSet, EnergyBreakdown, RateInfeasibleError
from .scenario import ChannelState, SystemConfig, Task

__all__ = [
    "MseState",
    "RanSolution",
    "JointSolution",
    "BaselineInfeasibleError",
    "mmse_receiver",
    "mse",
    "mse_weight",
    "cloud_energy_of_rate",
    "ran_power_minimization",
    "joint_energy_minimization",
    "split_deadline_baseline",
    "extract_rrh_clusters",
    "constraint_violations",
]

MAX_ITERATIONS = 30
CONV_REL_TOL = 1e-4
CLUSTER_THRESHOLD = 1e-6   # of P_j, on ||v_ij||^2
CULL_THRESHOLD = 1e-8      # of P_j: blocks this weak leave the working support
FRONTHAUL_MARGIN = 0.9     # keep surrogate rows only where the l0 load could bind
REFIT_FLOOR_SLACK = 1e-4   # relative rate slack allowed when refitting on a support
SOLVE_KW = dict(gap_tol=1e-8, feas_tol=1e-7, max_iter=200)


class BaselineInfeasibleError(ValueError):
    """One side of a fixed deadline split cannot meet its share."""

    def __init__(self, side: str, detail: str):
        self.side = side
        super().__init__(f"{side} side infeasible: {detail}")


@dataclass
class MseState:
    receivers: np.ndarray   # complex scalar per UE
    mse: np.ndarray         # in (0, 1] with MMSE receivers
    weights: np.ndarray     # >= 0


@dataclass
class RanSolution:
    beamformers: BeamformerSet
    rates: np.ndarray
    clusters: tuple
    powers: np.ndarray          # per-UE transmit power over the serving set
    floors: np.ndarray
    objective_trace: list = field(default_factory=list)
    status: str = "optimal"
    iterations: int = 0
    converged: bool = True
    message: str = ""


@dataclass
class JointSolution:
    ran: RanSolution
    clone_capacity: np.ndarray
    energy: EnergyBreakdown | None
    energy_trace: list = field(default_factory=list)
    surrogate_trace: list = field(default_factory=list)  # (S0, S1, S2, S3) rows
    status: str = "optimal"
    iterations: int = 0
    converged: bool = True
    mse_state: MseState | None = None


# ---------------------------------------------------------------------------
# MSE kernels.


def _combined_amplitudes(channels: ChannelState, vectors: np.ndarray) -> np.ndarray:
    """amps[i, k] = sum_j h[i,j]^H v[k,j]."""
    return np.einsum("ijc,kjc->ik", np.conj(channels.gains), vectors)


def mmse_receiver(channels: ChannelState, beamformers: BeamformerSet) -> np.ndarray:
    """Scalar receivers u_i = m_ii / (sum_k |m_ik|^2 + sigma_i^2)."""
    amps = _combined_amplitudes(channels, beamformers.vectors)
    denom = np.sum(np.abs(amps) ** 2, axis=1) + channels.noise_power
    return np.diag(amps) / denom


def mse(ue: int, receiver: complex, channels: ChannelState,
        beamformers: BeamformerSet) -> float:
    """Receive MSE e_i = |u|^2 (sum_k |m_ik|^2 + sigma^2) - 2 Re(u* m_ii) + 1."""
    amps = _combined_amplitudes(channels, beamformers.vectors)[ue]
    total = float(np.sum(np.abs(amps) ** 2) + channels.noise_power[ue])
    return float(abs(receiver) ** 2 * total
                 - 2.0 * np.real(np.conj(receiver) * amps[ue]) + 1.0)


def _mse_all(channels, vectors, receivers) -> np.ndarray:
    amps = _combined_amplitudes(channels, vectors)
    total = np.sum(np.abs(amps) ** 2, axis=1) + channels.noise_power
    own = np.diag(amps)
    return (np.abs(receivers) ** 2 * total
            - 2.0 * np.real(np.conj(receivers) * own) + 1.0)


def _clamped_rate(e: float, bandwidth: float, task: Task, capacity_limit: float):
    """Rate implied by an MSE value, kept at/above the deadline floor."""
    r = bandwidth * math.log2(1.0 / e)
    if task.result_bits == 0:
        return max(r, 0.0), False
    floor = task.result_bits / (task.deadline - task.cpu_cycles / capacity_limit)
    return (floor, True) if r < floor else (r, False)


def cloud_energy_of_rate(r: float, task: Task, kappa: float, exponent: float,
                         capacity_limit: float) -> float:
    """Clone energy when the radio leg runs at rate r and the deadline is tight.

    The clone must cover F cycles in T - D/r seconds; speeds are capped at
    the clone capacity (rates below the implied floor evaluate at the cap).
    """
    if task.result_bits == 0:
        speed = task.cpu_cycles / task.deadline
    else:
        slack = task.deadline - task.result_bits / r
        speed = task.cpu_cycles / slack if slack > 0 else float("inf")
    speed = min(speed, capacity_limit)
    return clone_energy(task.cpu_cycles, speed, kappa, exponent)


def mse_weight(e: float, task: Task, bandwidth: float, kappa: float,
               exponent: float, capacity_limit: float) -> float:
    """Gradient of the cloud-energy utility through the MSE map.

    With tau(e) = gamma(B log2(1/e)) and gamma the deadline-tight clone
    energy as a function of the radio rate, the chain rule gives

        d tau / d e = kappa (nu - 1) D f^nu / r^2 * B / (e ln 2),

    where f = F / (T - D/r) is the implied clone speed.  The speed is
    clamped at the clone capacity when the MSE implies a rate below the
    deadline floor, which bounds the weight at infeasible iterates.
    """
    if not 0.0 < e < 1.0:
        raise ValueError("mse weight needs e in (0, 1)")
    if task.result_bits == 0 or exponent == 1.0 or kappa == 0.0:
        return 0.0
    if task.deadline <= task.cpu_cycles / capacity_limit:
        raise RateInfeasibleError(0, "cloud execution alone exhausts the deadline")
    r, clamped = _clamped_rate(e, bandwidth, task, capacity_limit)
    speed = task.cpu_cycles / (task.deadline - task.result_bits / r)
    if clamped:
        speed = min(speed, capacity_limit)
    grad_gamma = (kappa * (exponent - 1.0) * task.result_bits
                  * speed ** exponent / r ** 2)
    return grad_gamma * bandwidth / (e * math.log(2.0))


def _tau_utility(e: float, task: Task, bandwidth: float, kappa: float,
                 exponent: float, capacity_limit: float) -> float:
    r, _ = _clamped_rate(e, bandwidth, task, capacity_limit)
    return cloud_energy_of_rate(r, task, kappa, exponent, capacity_limit)


# ---------------------------------------------------------------------------
# Shared pieces of the iterative loops.


def _initial_beamformers(config: SystemConfig, channels: ChannelState,
                         support: np.ndarray) -> np.ndarray:
    """Matched-filter directions at half the per-RRH power budget."""
    n, l, k = channels.gains.shape
    v = np.zeros((n, l, k), dtype=complex)
    active = max(1, int(support.any(axis=1).sum()))
    for j in range(l):
        share = config.rrh_power_limit[j] / (2.0 * active)
        for i in range(n):
            if not support[i, j]:
                continue
            h = channels.gains[i, j]
            norm = np.linalg.norm(h)
            if norm > 0:
                v[i, j] = math.sqrt(share) * h / norm
    return v


def _cs_rate_bound(config, channels, ue_powers, support) -> np.ndarray:
    """Per-UE interference-free rate bound at the previous power level.

    B log2(1 + sum_j ||h_ij||^2 p_i / sigma_i^2), the concave envelope used
    as the frozen denominator of the transmit-energy surrogate.
    """
    gain = np.sum(np.abs(channels.gains) ** 2, axis=2)  # (N, L)
    gain = np.where(support, gain, 0.0).sum(axis=1)
    b = np.asarray(config.bandwidth)
    return b * np.log2(1.0 + gain * ue_powers / channels.noise_power)


def _rates_and_powers(config, channels, vectors):
    bf = BeamformerSet(vectors.copy())
    n = config.num_ue
    rates = np.array([ran.rate(i, channels, bf, bandwidth=config.bandwidth[i])
                      for i in range(n)])
    powers = np.array([ran.ue_power(i, bf) for i in range(n)])
    return rates, powers


def extract_rrh_clusters(beamformers: BeamformerSet, power_limits,
                         threshold_factor: float = CLUSTER_THRESHOLD):
    """Serving sets C_i = {j : ||v_ij||^2 > threshold * P_j}; small blocks zeroed."""
    v = beamformers.vectors
    sq = np.sum(np.abs(v) ** 2, axis=-1)
    limits = np.asarray(power_limits, dtype=float)
    keep = sq > threshold_factor * limits[None, :]
    zeroed = np.where(keep[:, :, None], v, 0.0)
    clusters = tuple(frozenset(np.flatnonzero(keep[i]).tolist())
                     for i in range(v.shape[0]))
    return clusters, BeamformerSet(zeroed)


def _weighted_fronthaul_ok(config, vectors, rho, frozen_rates, slack=1e-9):
    sq = np.sum(np.abs(vectors) ** 2, axis=-1)
    load = (rho * sq * frozen_rates[:, None]).sum(axis=0)
    return np.all(load <= np.asarray(config.fronthaul_limit) * (1.0 + slack))


def _iterate_feasible(config, vectors, rates, floors, slack=1e-9):
    """Quick replay of the hard constraint set at an in-loop iterate."""
    if np.any(rates < floors * (1.0 - 1e-6)):
        return False
    bf = BeamformerSet(vectors.copy())
    for j in range(config.num_rrh):
        limit = config.rrh_power_limit[j]
        if ran.rrh_power(j, bf) > limit * (1.0 + slack):
            return False
        load = ran.fronthaul_load(j, bf, rates, mode="l0",
                                  zero_threshold=CLUSTER_THRESHOLD * limit)
        if load > config.fronthaul_limit[j] * (1.0 + slack):
            return False
    return True


def _fronthaul_rows(config, vectors, frozen_rates, support):
    """Reweighting factors with rows zeroed where the load cannot bind.

    If serving every supported UE at the frozen rates already fits under
    FRONTHAUL_MARGIN * C_j, the surrogate row for RRH j is pure numerical
    load (enormous weights on dying blocks) with no effect, so it is
    dropped for this round; the hard form is re-checked at exit.
    """
    rho = ran.fronthaul_weights(BeamformerSet(vectors.copy()),
                                config.stability_epsilon)
    caps = np.asarray(config.fronthaul_limit)
    ceiling = (np.where(support, frozen_rates[:, None], 0.0)).sum(axis=0)
    inactive = ceiling <= FRONTHAUL_MARGIN * caps
    rho[:, inactive] = 0.0
    return rho


def _cull_support(vectors, support, power_limits):
    """Drop blocks far below the extraction threshold (keeping one per UE)."""
    sq = np.sum(np.abs(vectors) ** 2, axis=-1)
    keep = support & (sq > CULL_THRESHOLD * np.asarray(power_limits)[None, :])
    for i in range(support.shape[0]):
        if support[i].any() and not keep[i].any():
            keep[i, int(np.argmax(sq[i]))] = True
    return keep


def constraint_violations(config, tasks, channels, solution,
                          deadline_total=None) -> dict:
    """Worst-case constraint slacks of a returned solution (positive = violated).

    Rates/loads are recomputed from the stored beamformers, so this is an
    independent replay rather than trust in solver bookkeeping.
    """
    bf = solution.beamformers
    n, l = config.num_ue, config.num_rrh
    rates, _ = _rates_and_powers(config, channels, bf.vectors)
    power = max(ran.rrh_power(j, bf) - config.rrh_power_limit[j] for j in range(l))
    rate_short = 0.0
    for i in range(n):
        if solution.floors[i] > 0:
            rate_short = max(rate_short, (solution.floors[i] - rates[i])
                             / solution.floors[i])
    fronthaul = max(
        ran.fronthaul_load(j, bf, rates, mode="l0") - config.fronthaul_limit[j]
        for j in range(l))
    out = {"power": power, "rate_rel": rate_short, "fronthaul": fronthaul}
    if deadline_total is not None:
        worst = 0.0
        for i in range(n):
            if tasks[i].result_bits > 0:
                worst = max(worst, deadline_total[i] - tasks[i].deadline)
        out["deadline"] = worst
    return out


# ---------------------------------------------------------------------------
# Transmit-side minimization under fixed rate floors.


def ran_power_minimization(config: SystemConfig, tasks: list[Task],
                           channels: ChannelState, transmit_budgets,
                           max_iterations: int = MAX_ITERATIONS) -> RanSolution:
    """Iterative reweighted power minimization meeting per-UE rate floors.

    Per round: conic solve at the current fronthaul weights -> refresh rates
    -> refresh weights -> refresh the surrogate power metric, until the
    metric settles.  The first round runs with the fronthaul surrogate
    inactive so the reweighting has a point to start from.
    """
    n = config.num_ue
    budgets = np.broadcast_to(np.asarray(transmit_budgets, dtype=float), (n,))
    floors = np.array([t.result_bits / budgets[i] if t.result_bits > 0 else 0.0
                       for i, t in enumerate(tasks)])
    support = np.repeat((floors > 0)[:, None], config.num_rrh, axis=1)
    if not support.any():
        zero = BeamformerSet(np.zeros_like(channels.gains))
        return RanSolution(zero, np.zeros(n), tuple(frozenset() for _ in range(n)),
                           np.zeros(n), floors, [0.0], "optimal", 0, True)

    v = _initial_beamformers(config, channels, support)
    _, powers = _rates_and_powers(config, channels, v)
    rho = frozen = None
    metric_prev = None
    trace = []
    status, converged, it = "max_iterations", False, 0
    bits = np.array([t.result_bits for t in tasks])

    for it in range(1, max_iterations + 1):
        bound = _cs_rate_bound(config, channels, powers, support)
        weights = np.where(floors > 0, _safe_div(bits, bound), 0.0)
        problem = build_power_min_socp(
            channels, floors, config.bandwidth, config.rrh_power_limit,
            objective_weights=weights, rho=rho, frozen_rates=frozen,
            fronthaul_limits=config.fronthaul_limit, support=support)
        report = solve(problem, **SOLVE_KW)
        if not report.optimal:
            return RanSolution(BeamformerSet(v), np.zeros(n),
                               tuple(frozenset() for _ in range(n)),
                               powers, floors, trace, report.status, it, False,
                               f"conic step failed: {report.message or report.status}; "
                               f"floors={floors.tolist()}")
        v = extract_beamformers(report, n, config.num_rrh, config.antennas_per_rrh)
        support = _cull_support(v, support, config.rrh_power_limit)
        v = np.where(support[:, :, None], v, 0.0)
        rates, powers = _rates_and_powers(config, channels, v)
        rho = _fronthaul_rows(config, v, rates, support)
        frozen = rates
        bound = _cs_rate_bound(config, channels, powers, support)
        metric = float(np.sum(np.where(floors > 0, powers * _safe_div(bits, bound), 0.0)))
        trace.append(metric)
        if metric_prev is not None and abs(metric - metric_prev) <= CONV_REL_TOL * max(
                metric_prev, 1e-30):
            status, converged = "optimal", True
            break
        metric_prev = metric

    clusters, bf = extract_rrh_clusters(BeamformerSet(v), config.rrh_power_limit)
    bf, rates, powers, clusters = _refit_on_support(
        config, channels, bf, clusters, floors, np.where(floors > 0, 1.0, 0.0)
        * _safe_div(bits, _cs_rate_bound(config, channels, powers, support)),
        support)
    return RanSolution(bf, rates, clusters, powers, floors, trace,
                       status if converged else "max_iterations",
                       it, converged)


def _safe_div(a, b):
    b = np.asarray(b, dtype=float)
    return np.divide(a, np.where(b > 0, b, 1.0), where=b > 0,
                     out=np.zeros_like(b))


def _refit_on_support(config, channels, bf, clusters, floors, weights, support):
    """Re-solve on the extracted support so zeroed blocks are exactly zero.

    Floors are held at max(original floor, achieved rate less a small
    relative slack): cluster extraction may shave a little amplitude, and
    the refit re-tightens feasibility on the kept blocks only.  Passes
    repeat until extraction is a no-op and the hard fronthaul form holds.
    """
    n, l = config.num_ue, config.num_rrh
    mask = np.zeros((n, l), dtype=bool)
    for i, cluster in enumerate(clusters):
        for j in cluster:
            mask[i, j] = True
    mask &= support

    rates, _ = _rates_and_powers(config, channels, bf.vectors)
    target = np.where(floors > 0,
                      np.maximum(floors, rates * (1.0 - REFIT_FLOOR_SLACK)), 0.0)
    frozen = np.maximum(rates, floors)
    obj = np.where(floors > 0, np.maximum(weights, 1e-12), 0.0)
    caps = np.asarray(config.fronthaul_limit)
    for _ in range(10):
        if not mask.any():
            zero = BeamformerSet(np.zeros_like(bf.vectors))
            return zero, np.zeros(n), np.zeros(n), tuple(
                frozenset() for _ in range(n))
        # Every served UE costs its full rate on the hard per-RRH form, and a
        # power-min refit lands on its targets, so shed targets until the
        # planned load fits each masked RRH.
        for _shed in range(16):
            planned = (mask * target[:, None]).sum(axis=0)
            over = planned > caps * (1.0 - 1e-9)
            if not over.any():
                break
            for j in np.flatnonzero(over):
                scale = caps[j] * (1.0 - 1e-6) / planned[j]
                rows = mask[:, j] & (floors > 0)
                target[rows] = np.maximum(floors[rows], target[rows] * scale)
        rho = _fronthaul_rows(config, bf.vectors, frozen, mask)
        problem = build_power_min_socp(
            channels, target, config.bandwidth, config.rrh_power_limit,
            objective_weights=obj, rho=rho, frozen_rates=frozen,
            fronthaul_limits=config.fronthaul_limit, support=mask)
        report = solve(problem, **SOLVE_KW)
        if not report.optimal:
            # Retry with slacker targets; bail out once they sit at the floors.
            if np.all(target <= floors * (1.0 + 1e-12)):
                break
            target = np.maximum(floors, target * 0.9)
            continue
        vec = extract_beamformers(report, n, l, config.antennas_per_rrh)
        clusters, bf = extract_rrh_clusters(BeamformerSet(vec),
                                            config.rrh_power_limit)
        new_mask = np.zeros((n, l), dtype=bool)
        for i, cluster in enumerate(clusters):
            for j in cluster:
                new_mask[i, j] = True
        rates, _ = _rates_and_powers(config, channels, bf.vectors)
        loads = np.array([ran.fronthaul_load(j, bf, rates, mode="l0")
                          for j in range(l)])
        fronthaul_ok = np.all(loads <= caps * (1.0 + 1e-9))
        if np.array_equal(new_mask, mask) and fronthaul_ok:
            break
        mask = new_mask
        if not fronthaul_ok:
            target = np.where(floors > 0,
                              np.maximum(floors,
                                         np.minimum(target, rates)), 0.0)
            frozen = np.maximum(frozen, rates * (1.0 + 1e-4))
    rates, powers = _rates_and_powers(config, channels, bf.vectors)
    clusters, bf = extract_rrh_clusters(bf, config.rrh_power_limit)
    return bf, rates, powers, clusters


# ---------------------------------------------------------------------------
# Joint cloud + radio energy minimization.


def joint_energy_minimization(config: SystemConfig, tasks: list[Task],
                              channels: ChannelState,
                              max_iterations: int = MAX_ITERATIONS) -> JointSolution:
    """Block coordinate descent on the joint energy objective.

    Round n: (1) receivers from the current beamformers, (2) MSE weights
    from the cloud-utility gradient, (3) transmit beamformers by a conic
    step under rate floors / per-RRH power / fronthaul surrogate, then
    refresh rates, fronthaul weights and the energy bookkeeping; stop when
    the total energy settles.  On exit clone speeds are recovered from the
    final rates, making the deadline exactly tight per UE.
    """
    n, l = config.num_ue, config.num_rrh
    kappa = np.asarray(config.switched_capacitance)
    nu = np.asarray(config.cloud_exponent)
    fmax = np.asarray(config.clone_capacity_limit)
    bw = np.asarray(config.bandwidth)
    eta = np.asarray(config.tradeoff)
    bits = np.array([t.result_bits for t in tasks])
    cycles = np.array([t.cpu_cycles for t in tasks])
    deadlines = np.array([t.deadline for t in tasks])

    for i in range(n):
        if deadlines[i] <= cycles[i] / fmax[i]:
            raise RateInfeasibleError(
                i, f"cloud execution needs {cycles[i] / fmax[i]:.6g} s "
                   f"of a {deadlines[i]:.6g} s deadline")

    floors = np.where(bits > 0, _safe_div(bits, deadlines - cycles / fmax), 0.0)
    support = np.repeat((bits > 0)[:, None], l, axis=1)

    if not support.any():
        allocs = solve_cloud_allocation(tasks, deadlines, fmax, kappa, nu)
        energy = EnergyBreakdown.combine([a.exec_energy for a in allocs],
                                         np.zeros(n), eta)
        zero = BeamformerSet(np.zeros_like(channels.gains))
        ransol = RanSolution(zero, np.zeros(n), tuple(frozenset() for _ in range(n)),
                             np.zeros(n), floors, [], "optimal", 0, True)
        return JointSolution(ransol, np.array([a.clone_capacity for a in allocs]),
                             energy, [energy.total], [], "optimal", 0, True)

    v = _initial_beamformers(config, channels, support)
    rho = frozen = None
    u = None
    energy_prev = None
    energy_trace, surrogate_trace = [], []
    status, converged, it = "max_iterations", False, 0
    best_total, best_state = np.inf, None

    def tau_terms(e_vec):
        taus = np.zeros(n)
        for i in range(n):
            if bits[i] > 0:
                taus[i] = _tau_utility(e_vec[i], tasks[i], bw[i], kappa[i],
                                       nu[i], fmax[i])
            else:
                taus[i] = clone_energy(cycles[i], cycles[i] / deadlines[i],
                                       kappa[i], nu[i])
        return taus

    def true_surrogate(e_vec, powers, weights):
        return float(np.sum(tau_terms(e_vec)) + weights @ powers)

    for it in range(1, max_iterations + 1):
        rates_prev, powers = _rates_and_powers(config, channels, v)
        bound = _cs_rate_bound(config, channels, powers, support)
        weights = np.where(bits > 0, eta * _safe_div(bits, bound), 0.0)

        s0 = None
        if u is not None:
            e_stale = np.clip(_mse_all(channels, v, u), 1e-300, 1.0 - 1e-15)
            s0 = true_surrogate(e_stale, powers, weights)

        u = mmse_receiver(channels, BeamformerSet(v.copy()))
        e = np.clip(_mse_all(channels, v, u), 1e-300, 1.0 - 1e-15)
        s1 = true_surrogate(e, powers, weights)

        phi = np.array([mse_weight(e[i], tasks[i], bw[i], kappa[i], nu[i], fmax[i])
                        if bits[i] > 0 else 0.0 for i in range(n)])
        s2 = s1  # the weight refresh re-anchors phi; the surrogate value is unchanged

        problem = build_wmmse_step_socp(
            channels, phi, u, weights, config.rrh_power_limit,
            rate_floors=floors, bandwidths=bw, rho=rho, frozen_rates=frozen,
            fronthaul_limits=config.fronthaul_limit, support=support)
        report = solve(problem, **SOLVE_KW)
        if not report.optimal:
            ransol = RanSolution(BeamformerSet(v), rates_prev,
                                 tuple(frozenset() for _ in range(n)), powers,
                                 floors, [], report.status, it, False,
                                 f"conic step failed: {report.message or report.status}")
            return JointSolution(ransol, np.zeros(n), None, energy_trace,
                                 surrogate_trace, report.status, it, False)
        v_cand = extract_beamformers(report, n, l, config.antennas_per_rrh)
        # The conic step minimizes the tangent model of the cloud-energy
        # utility, which under-estimates it where tau is convex in the MSE;
        # a line search on the true surrogate keeps the descent honest.
        v, s3 = _surrogate_line_search(
            config, channels, u, weights, v, v_cand, rho, frozen,
            true_surrogate, s2)
        surrogate_trace.append((s0, s1, s2, s3))

        support = _cull_support(v, support, config.rrh_power_limit)
        v = np.where(support[:, :, None], v, 0.0)
        rates, powers = _rates_and_powers(config, channels, v)
        rho = _fronthaul_rows(config, v, rates, support)
        frozen = rates.copy()

        speeds, cloud_e, tx_e = _recover_cloud(config, tasks, rates, powers)
        total = float(np.sum(cloud_e + eta * tx_e))
        energy_trace.append(total)
        if total < best_total and _iterate_feasible(config, v, rates, floors):
            best_total, best_state = total, (v.copy(), support.copy())
        if energy_prev is not None and abs(total - energy_prev) <= CONV_REL_TOL * max(
                energy_prev, 1e-30):
            status, converged = "optimal", True
            break
        energy_prev = total

    if best_state is not None:
        # Under a binding fronthaul budget the loop can orbit the optimum;
        # return the best load-feasible visit rather than the last.
        v, support = best_state
        rates, powers = _rates_and_powers(config, channels, v)
    clusters, bf = extract_rrh_clusters(BeamformerSet(v), config.rrh_power_limit)
    bf, rates, powers, clusters = _refit_on_support(
        config, channels, bf, clusters, floors,
        np.where(bits > 0, eta * _safe_div(bits, _cs_rate_bound(
            config, channels, powers, support)), 0.0), support)
    speeds, cloud_e, tx_e = _recover_cloud(config, tasks, rates, powers)
    energy = EnergyBreakdown.combine(cloud_e, tx_e, eta)
    ransol = RanSolution(bf, rates, clusters, powers, floors, energy_trace,
                         status if converged else "max_iterations", it, converged)
    receivers = mmse_receiver(channels, bf)
    mses = np.clip(_mse_all(channels, bf.vectors, receivers), 1e-300, 1.0)
    weights_out = np.array([
        mse_weight(min(mses[i], 1.0 - 1e-15), tasks[i], bw[i], kappa[i], nu[i],
                   fmax[i]) if bits[i] > 0 else 0.0 for i in range(n)])
    return JointSolution(ransol, speeds, energy, energy_trace, surrogate_trace,
                         status if converged else "max_iterations", it, converged,
                         mse_state=MseState(receivers, mses, weights_out))


def _surrogate_line_search(config, channels, receivers, weights, v_prev, v_cand,
                           rho, frozen, surrogate_fn, s_incumbent):
    """Step from v_prev toward the conic candidate, minimizing the true surrogate.

    Along the segment every constraint stays satisfied (the feasible set is
    convex and both ends are feasible), the per-UE MSE and power are
    quadratics in the step length, and the surrogate is convex, so a golden
    section bracket finds the minimum.  Returns the new point and its value.
    """
    dv = v_cand - v_prev
    if not np.any(dv):
        return v_prev, s_incumbent
    if rho is not None and not _weighted_fronthaul_ok(config, v_prev, rho, frozen):
        # Incumbent end is outside this round's surrogate set: only the full
        # step is known feasible.
        e1 = np.clip(_mse_all(channels, v_cand, receivers), 1e-300, 1.0 - 1e-15)
        p1 = np.sum(np.abs(v_cand) ** 2, axis=(1, 2))
        return v_cand, surrogate_fn(e1, p1, weights)

    a = _combined_amplitudes(channels, v_prev)
    b = _combined_amplitudes(channels, dv)
    u2 = np.abs(receivers) ** 2
    # e_i(alpha) and p_i(alpha) as quadratics in the step length.
    e2 = u2 * np.sum(np.abs(b) ** 2, axis=1)
    e1c = u2 * 2.0 * np.sum(np.real(np.conj(a) * b), axis=1) \
        - 2.0 * np.real(np.conj(receivers) * np.diag(b))
    e0 = (u2 * (np.sum(np.abs(a) ** 2, axis=1) + channels.noise_power)
          - 2.0 * np.real(np.conj(receivers) * np.diag(a)) + 1.0)
    p2 = np.sum(np.abs(dv) ** 2, axis=(1, 2))
    p1c = 2.0 * np.sum(np.real(np.conj(v_prev) * dv), axis=(1, 2))
    p0 = np.sum(np.abs(v_prev) ** 2, axis=(1, 2))

    def value(alpha):
        e = np.clip(e0 + e1c * alpha + e2 * alpha * alpha, 1e-300, 1.0 - 1e-15)
        p = p0 + p1c * alpha + p2 * alpha * alpha
        return surrogate_fn(e, p, weights)

    lo, hi = 0.0, 1.0
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - golden * (hi - lo)
    x2 = lo + golden * (hi - lo)
    f1, f2 = value(x1), value(x2)
    for _ in range(40):
        if hi - lo < 1e-6:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - golden * (hi - lo)
            f1 = value(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + golden * (hi - lo)
            f2 = value(x2)
    candidates = [(s_incumbent, 0.0), (value(1.0), 1.0),
                  (f1, x1), (f2, x2)]
    best_val, best_alpha = min(candidates, key=lambda t: t[0])
    if best_alpha == 0.0:
        return v_prev, s_incumbent
    return v_prev + best_alpha * dv, best_val


def _recover_cloud(config, tasks, rates, powers):
    """Clone speeds from final rates (deadline tight), plus both energy legs."""
    n = config.num_ue
    kappa = np.asarray(config.switched_capacitance)
    nu = np.asarray(config.cloud_exponent)
    fmax = np.asarray(config.clone_capacity_limit)
    speeds = np.zeros(n)
    cloud_e = np.zeros(n)
    tx_e = np.zeros(n)
    for i in range(n):
        t = tasks[i]
        if t.result_bits == 0:
            speeds[i] = t.cpu_cycles / t.deadline
        else:
            slack = t.deadline - t.result_bits / rates[i]
            speeds[i] = t.cpu_cycles / slack if slack > 0 else fmax[i]
            speeds[i] = min(speeds[i], fmax[i])
            tx_e[i] = powers[i] * t.result_bits / rates[i]
        cloud_e[i] = clone_energy(t.cpu_cycles, speeds[i], kappa[i], nu[i])
    return speeds, cloud_e, tx_e


# ---------------------------------------------------------------------------
# Fixed-split baseline.


def split_deadline_baseline(config: SystemConfig, tasks: list[Task],
                            channels: ChannelState, alpha: float) -> JointSolution:
    """Separate optimization with the deadline split T_tx = alpha * T_max.

    The cloud side gets (1 - alpha) * T_max and is solved in closed form;
    the radio side gets alpha * T_max as a hard transmit budget.  Raises
    BaselineInfeasibleError naming the side that cannot meet its share.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("split fraction must be in (0, 1)")
    n = config.num_ue
    deadlines = np.array([t.deadline for t in tasks])
    try:
        allocs = solve_cloud_allocation(tasks, (1.0 - alpha) * deadlines,
                                        config.clone_capacity_limit,
                                        config.switched_capacitance,
                                        config.cloud_exponent)
    except CloudInfeasibleError as err:
        raise BaselineInfeasibleError("cloud", str(err)) from err

    ransol = ran_power_minimization(config, tasks, channels, alpha * deadlines)
    if ransol.status != "optimal":
        raise BaselineInfeasibleError("transmit", ransol.message or ransol.status)

    cloud_e = np.array([a.exec_energy for a in allocs])
    tx_e = np.array([
        powers * t.result_bits / r if t.result_bits > 0 else 0.0
        for powers, r, t in zip(ransol.powers, ransol.rates, tasks)])
    energy = EnergyBreakdown.combine(cloud_e, tx_e, config.tradeoff)
    return JointSolution(ransol, np.array([a.clone_capacity for a in allocs]),
                         energy, [energy.total], [], ransol.status,
                         ransol.iterations, ransol.converged)
