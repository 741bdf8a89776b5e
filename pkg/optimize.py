"""
Pulse optimization.

Transfers on trees are parameterized by one amplitude, one phase and a
common duration: 2F + 1 numbers for F fields. The search runs in the RWA
model, where each objective call is a single Hermitian eigendecomposition,
and the answer is then re-simulated with the full time-dependent
Hamiltonian (the double check).
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable

import numpy as np

from pulseman import analytic, dynamics, rwa
from pulseman import graph as level_graph
from pulseman.exceptions import ControlError
from pulseman.protocols.control import SimplexConfig, SimplexResult, TransferProblem, TransferSolution
from pulseman.protocols.dynamics import Frame, StateVector
from pulseman.protocols.propagator import ExactPropagator

logger = logging.getLogger(__name__)

TRIVIAL_TOL = 1e-12
SEED_TOL = 1e-14


# =============================================================================
# NELDER-MEAD
# =============================================================================


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0,
    config: SimplexConfig | None = None,
    scale=None,
) -> SimplexResult:
    """
    Downhill simplex minimization with restarts.

    The initial simplex is x0 plus one step along each axis (`scale`, else
    `config.scale`, else 0.1). A run converges when both the simplex
    spread (max coordinate distance to the best vertex) is below `xtol` and
    the objective spread is below `ftol`. Each restart rebuilds the simplex
    around the incumbent; restarting stops as soon as one brings no
    improvement. Ties between vertices keep their index order.

    Raises:
        ControlError: OBJECTIVE_NON_FINITE on NaN or infinite values.
    """
    config = config or SimplexConfig()
    x0 = np.asarray(x0, dtype=float).copy()
    n = x0.size
    steps = np.asarray(scale if scale is not None else (config.scale or [0.1] * n), dtype=float)
    if steps.shape != (n,):
        raise ControlError("INVALID_CONFIG", message="Simplex scale must match the parameter count")

    evaluations = 0

    def f(x):
        nonlocal evaluations
        evaluations += 1
        value = float(objective(x))
        if not math.isfinite(value):
            raise ControlError("OBJECTIVE_NON_FINITE", x=x.tolist(), value=value)
        return value

    rho, chi = config.reflection, config.expansion
    psi, sigma = config.contraction, config.shrink

    best_x, best_f = x0, f(x0)
    iterations = 0
    restarts = 0
    converged = False

    for attempt in range(config.restarts + 1):
        if attempt:
            restarts += 1
        start_f = best_f
        simplex = np.vstack([best_x, best_x + np.diag(steps)])
        values = np.full(n + 1, np.inf)
        values[0] = best_f
        for i in range(1, n + 1):
            if evaluations >= config.max_evaluations:
                break
            values[i] = f(simplex[i])

        converged = False
        if np.all(np.isfinite(values)):
            while True:
                order = np.argsort(values, kind="stable")
                simplex, values = simplex[order], values[order]
                if config.target is not None and values[0] <= config.target:
                    converged = True
                    break
                x_spread = np.max(np.abs(simplex[1:] - simplex[0]))
                f_spread = values[-1] - values[0]
                if x_spread <= config.xtol and f_spread <= config.ftol:
                    converged = True
                    break
                if evaluations >= config.max_evaluations:
                    break
                iterations += 1

                centroid = simplex[:-1].mean(axis=0)
                worst = simplex[-1]
                xr = centroid + rho * (centroid - worst)
                fr = f(xr)
                if evaluations >= config.max_evaluations:
                    if fr < values[-1]:
                        simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[0]:
                    xe = centroid + chi * (centroid - worst)
                    fe = f(xe)
                    if fe < fr:
                        simplex[-1], values[-1] = xe, fe
                    else:
                        simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[-2]:
                    simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[-1]:
                    xc = centroid + psi * (xr - centroid)
                    fc = f(xc)
                    if fc <= fr:
                        simplex[-1], values[-1] = xc, fc
                        continue
                else:
                    xc = centroid + psi * (worst - centroid)
                    fc = f(xc)
                    if fc < values[-1]:
                        simplex[-1], values[-1] = xc, fc
                        continue
                for i in range(1, n + 1):
                    if evaluations >= config.max_evaluations:
                        break
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                    values[i] = f(simplex[i])

        i_best = int(np.argmin(values))
        if values[i_best] < best_f:
            best_x, best_f = simplex[i_best].copy(), float(values[i_best])
        logger.debug("Simplex attempt %d: f=%.3g evaluations=%d", attempt, best_f, evaluations)

        if config.target is not None and best_f <= config.target:
            break
        if evaluations >= config.max_evaluations:
            converged = False
            break
        if attempt and best_f >= start_f - config.ftol:
            break

    return SimplexResult(
        x=best_x,
        fun=best_f,
        evaluations=evaluations,
        iterations=iterations,
        restarts=restarts,
        converged=converged,
    )


# =============================================================================
# TRANSFER OBJECTIVE
# =============================================================================


def random_goal(rng: np.random.Generator, dimension: int) -> np.ndarray:
    """Uniform random state on the complex unit sphere."""
    z = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
    return z / np.linalg.norm(z)


class TransferModel:
    """
    RWA evolution of one transfer problem as a function of pulse parameters.

    Parameter vector x = (a_1..a_F, alpha_1..alpha_F, tau) with
    |A_f| = A_ref |a_f| and T = |tau| / A_ref, where A_ref is the amplitude
    bound (or 1 when unbounded).
    """

    def __init__(self, problem: TransferProblem):
        graph = level_graph.build_graph(problem.system)
        detunings = rwa.oriented_detunings(problem.system, problem.drives)
        self.problem = problem
        self.graph = graph
        self.gamma = level_graph.assign_gamma(graph, detunings)
        self.reference = problem.amplitude_bound or 1.0

        system = problem.system
        n = system.dimension
        self.upper = np.array([u for u, _ in problem.drives.assignment], dtype=int)
        self.lower = np.array([l for _, l in problem.drives.assignment], dtype=int)
        self.couplings = np.array([system.coupling(u, l) for u, l in problem.drives.assignment], dtype=complex)
        self.diagonal = -np.diag(np.asarray(self.gamma.gamma, dtype=complex))
        self.gamma_values = np.asarray(self.gamma.gamma, dtype=float)
        self.dimension = n
        self.initial = problem.initial.amplitudes
        self.goal = problem.goal.amplitudes

    @property
    def field_count(self) -> int:
        return len(self.upper)

    def unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        f = self.field_count
        magnitudes = self.reference * np.abs(x[:f])
        phases = np.asarray(x[f : 2 * f])
        duration = abs(float(x[2 * f])) / self.reference
        return magnitudes, phases, duration

    def pack(self, magnitudes, phases, duration: float) -> np.ndarray:
        return np.concatenate(
            [np.asarray(magnitudes) / self.reference, np.asarray(phases), [duration * self.reference]]
        )

    def generator(self, amplitudes: np.ndarray) -> np.ndarray:
        g = self.diagonal.copy()
        values = 0.5 * amplitudes * self.couplings
        g[self.upper, self.lower] = values
        g[self.lower, self.upper] = values.conj()
        return g

    def final_state(self, amplitudes: np.ndarray, duration: float) -> np.ndarray:
        """c-frame coefficients at T under the RWA."""
        b = dynamics.evolution_operator(self.generator(amplitudes), duration) @ self.initial
        return np.exp(-1j * self.gamma_values * duration) * b

    def infidelity(self, amplitudes: np.ndarray, duration: float) -> float:
        return dynamics.vector_infidelity(self.goal, self.final_state(amplitudes, duration))

    def objective(self, x: np.ndarray) -> float:
        magnitudes, phases, duration = self.unpack(x)
        value = self.infidelity(magnitudes * np.exp(1j * phases), duration)
        if self.problem.amplitude_bound is not None:
            excess = np.maximum(np.abs(x[: self.field_count]) - 1.0, 0.0)
            value += float(np.sum(excess**2))
        return value

    def clipped(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        magnitudes, phases, duration = self.unpack(x)
        if self.problem.amplitude_bound is not None:
            magnitudes = np.minimum(magnitudes, self.problem.amplitude_bound)
        return magnitudes, np.mod(phases, 2 * math.pi), duration


def _analytic_seed(model: TransferModel) -> np.ndarray | None:
    """
    Closed-form starting point for stars driven from their center.

    Applies when the initial state is the center level and every leaf sees
    the same oriented detuning.
    """
    problem = model.problem
    center = level_graph.is_star(model.graph)
    if center is None:
        return None
    if abs(abs(model.initial[center]) - 1.0) > 1e-12:
        return None
    leaves = model.graph.neighbors(center)
    detunings = [level_graph.oriented(model.gamma.detunings, leaf, center) for leaf in leaves]
    common = detunings[0]
    if any(abs(d - common) > 1e-12 * max(1.0, abs(common)) for d in detunings):
        return None

    hc = [problem.system.coupling(leaf, center) for leaf in leaves]
    budget = model.reference * min(abs(h) for h in hc)
    order = [center, *leaves]
    goal = analytic.star_goal(model.goal[order] * np.conj(model.initial[center]))
    try:
        solution = analytic.star_solve(goal, [budget / math.sqrt(len(leaves))] * len(leaves), common)
    except ControlError as exc:
        logger.debug("No analytic seed: %s", exc)
        return None

    magnitudes = np.zeros(model.field_count)
    phases = np.zeros(model.field_count)
    for leaf, h, effective in zip(leaves, hc, solution.complex_amplitudes):
        f = problem.drives.field_for((leaf, center))
        amplitude = effective / h
        if problem.system.energies[leaf] < problem.system.energies[center]:
            amplitude = amplitude.conjugate()
        magnitudes[f] = abs(amplitude)
        phases[f] = math.atan2(amplitude.imag, amplitude.real)
    return model.pack(magnitudes, phases, solution.duration)


def analytic_transfer(problem: TransferProblem, seed: int | None = None) -> TransferSolution:
    """
    Closed-form pulse for a star driven from its center with equal detunings.

    Raises:
        ControlError: INCONSISTENT_GOAL when the problem has no closed form.
    """
    model = TransferModel(problem)
    x = _analytic_seed(model)
    if x is None:
        raise ControlError(
            "INCONSISTENT_GOAL",
            message="Closed form needs a reachable goal on a star driven from its center at equal detunings",
        )
    return _solution(model, x, 1, seed, "analytic")


def _random_seed(model: TransferModel, rng: np.random.Generator) -> np.ndarray:
    f = model.field_count
    return np.concatenate(
        [
            rng.uniform(0.2, 1.0, f),
            rng.uniform(0.0, 2 * math.pi, f),
            [rng.uniform(0.5, math.pi * model.dimension)],
        ]
    )


def _solution(model: TransferModel, x: np.ndarray, evaluations: int, seed, method: str) -> TransferSolution:
    magnitudes, phases, duration = model.clipped(x)
    value = model.infidelity(magnitudes * np.exp(1j * phases), duration)
    return TransferSolution(
        amplitudes=tuple(float(m) for m in magnitudes),
        phases=tuple(float(p) for p in phases),
        duration=float(duration),
        rwa_infidelity=value,
        threshold=model.problem.threshold,
        evaluations=evaluations,
        seed=seed,
        method=method,
    )


def optimize_transfer(
    problem: TransferProblem,
    config: SimplexConfig | None = None,
    seed: int | None = None,
    attempts: int = 4,
    analytic_seed: bool = True,
) -> TransferSolution:
    """
    Minimize the RWA infidelity over amplitudes, phases and duration.

    Stars driven from their center start from the closed-form solution
    (unless `analytic_seed` is off);
    otherwise up to `attempts` random starting points share the evaluation
    budget, stopping once one reaches the target (or the success threshold
    when no target is configured).
    """
    config = config or SimplexConfig()
    model = TransferModel(problem)
    f = model.field_count

    if dynamics.vector_infidelity(model.goal, model.initial) <= TRIVIAL_TOL:
        x = model.pack(np.zeros(f), np.zeros(f), 0.0)
        return _solution(model, x, 0, seed, "trivial")

    scale = config.scale if len(config.scale) == 2 * f + 1 else (0.1,) * f + (math.pi / 4,) * f + (1.0,)
    good_enough = config.target if config.target is not None else problem.threshold

    seeded = _analytic_seed(model) if analytic_seed else None
    if seeded is not None:
        if model.objective(seeded) <= SEED_TOL:
            logger.debug("Analytic seed already exact")
            return _solution(model, seeded, 1, seed, "analytic")
        result = nelder_mead(model.objective, seeded, config, scale=scale)
        if result.fun <= good_enough:
            return _solution(model, result.x, result.evaluations + 1, seed, "analytic+nelder-mead")

    rng = np.random.default_rng(seed)
    best: SimplexResult | None = None
    used = 0
    for attempt in range(max(1, attempts)):
        remaining = config.max_evaluations - used
        if remaining <= 0:
            break
        result = nelder_mead(model.objective, _random_seed(model, rng), config.evolve(max_evaluations=remaining), scale)
        used += result.evaluations
        if best is None or result.fun < best.fun:
            best = result
        logger.debug("Transfer attempt %d: f=%.3g (evaluations %d)", attempt, result.fun, used)
        if best.fun <= good_enough:
            break

    solution = _solution(model, best.x, used, seed, "nelder-mead")
    logger.info(
        "Transfer optimized: N=%d F=%d I_rwa=%.3g evaluations=%d",
        model.dimension,
        f,
        solution.rwa_infidelity,
        used,
    )
    return solution


# =============================================================================
# DOUBLE CHECK
# =============================================================================


def rwa_final_state(problem: TransferProblem, solution: TransferSolution) -> StateVector:
    """c-frame state reached at T by the RWA model."""
    model = TransferModel(problem)
    c = model.final_state(np.asarray(solution.complex_amplitudes), solution.duration)
    return StateVector(c, Frame.C, solution.duration)


def double_check(
    problem: TransferProblem,
    solution: TransferSolution,
    tol: float = dynamics.DEFAULT_TOL,
    propagator: ExactPropagator | None = None,
    stop: threading.Event | None = None,
) -> TransferSolution:
    """
    Re-simulate the pulse with the full time-dependent Hamiltonian.

    Integrator errors propagate to the caller.
    """
    drives = problem.drives.with_amplitudes(solution.complex_amplitudes)
    psi0 = dynamics.frame_transform(problem.initial.at(0.0), Frame.LAB, problem.system)
    if propagator is None:
        result = dynamics.propagate_exact(problem.system, drives, psi0, solution.duration, tol=tol, stop=stop)
    else:
        result = propagator.propagate(problem.system, drives, psi0, solution.duration, tol=tol, stop=stop)
    reached = dynamics.frame_transform(result.state, Frame.C, problem.system)
    exact = dynamics.infidelity(problem.goal.at(solution.duration), reached)
    if solution.rwa_success and exact >= problem.threshold:
        logger.warning(
            "Double check failed: I_rwa=%.3g I_exact=%.3g (T=%g)", solution.rwa_infidelity, exact, solution.duration
        )
    return solution.evolve(exact_infidelity=exact, exact_steps=result.steps, norm_drift=result.norm_drift)
