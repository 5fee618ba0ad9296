"""Multi-time integration and the multiform test-bed.

Flows of one model commute, so points of multi-time R^N are reached by
composing one-flow integrations along a path of (flow, duration) segments.
This module provides the path integrator (classical RK4), the action of the
Lagrangian one-form along a path (composite Simpson), an on-shell closure
residual d/dt_k L_j - d/dt_j L_k, and the off-shell identity checker tying
closure, Euler-Lagrange one-forms and Hamiltonian involution together on
canonical charts:

    d/dt_k L_j - d/dt_j L_k + Ups_j . P . Ups_k = {H_j, H_k}_R,

with Ups_j^n = sum_m omega_mn v^(j)_m - dH_j/dxi_n and P = omega^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

BLOWUP_NORM = 1e8

#: central-difference step for positional Hamiltonian gradients in "fd" mode
FD_GRADIENT_STEP = 1e-6


class Trajectory(NamedTuple):
    """Samples of a single-flow integration: times (m+1,), states (m+1, dim)."""

    times: np.ndarray
    states: np.ndarray

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class MultiTimePath:
    """Ordered (flow_id, duration) segments; durations are signed times."""

    segments: tuple
    step: float = 1e-3

    def __post_init__(self):
        segs = tuple((fid, float(t)) for fid, t in self.segments)
        if self.step <= 0:
            raise ValueError("step must be positive")
        object.__setattr__(self, "segments", segs)

    @property
    def arc_parameter(self) -> float:
        return float(sum(abs(t) for _, t in self.segments))

    def reversed(self) -> "MultiTimePath":
        return MultiTimePath(
            tuple((fid, -t) for fid, t in reversed(self.segments)), self.step
        )


@dataclass(frozen=True)
class JetPoint:
    """Second-order jet data at a chart point: velocities per flow and
    symmetric mixed derivatives w^(j,k) (stored once per unordered pair)."""

    xi: np.ndarray
    velocities: dict
    mixed: dict = field(default_factory=dict)

    def velocity(self, fid) -> np.ndarray:
        return self.velocities[fid]

    def mixed_velocity(self, j, k) -> np.ndarray:
        for key in ((j, k), (k, j)):
            if key in self.mixed:
                return self.mixed[key]
        return np.zeros_like(np.asarray(self.xi))


def _rk4_step(f: Callable, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_flow(model, flow_id, start, T: float, h: float, *, even_steps: bool = False) -> Trajectory:
    """Classical RK4 trajectory of one flow over signed time T with step <= h."""
    if h <= 0:
        raise ValueError("step size h must be positive")
    y = np.asarray(start, dtype=model.dtype).copy()
    if T == 0.0:
        return Trajectory(np.zeros(1), y[np.newaxis, :].copy())
    n_steps = max(1, int(np.ceil(abs(T) / h - 1e-12)))
    if even_steps and n_steps % 2:
        n_steps += 1
    dt = T / n_steps
    field_at = lambda state: model.flow_field(flow_id, state)
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, y.size), dtype=model.dtype)
    times[0], states[0] = 0.0, y
    for i in range(1, n_steps + 1):
        y = _rk4_step(field_at, y, dt)
        if np.linalg.norm(y) > BLOWUP_NORM:
            raise RuntimeError(
                f"flow {flow_id!r} blew up at t={i * dt:.6g} (|state| > {BLOWUP_NORM:g})"
            )
        times[i], states[i] = i * dt, y
    return Trajectory(times, states)


def path_endpoint(model, path: MultiTimePath, start) -> np.ndarray:
    """Compose the segment integrations in order and return the final state."""
    y = np.asarray(start, dtype=model.dtype).copy()
    for fid, duration in path.segments:
        y = integrate_flow(model, fid, y, duration, path.step).endpoint
    return y


def action(model, path: MultiTimePath, start, *, velocity_perturbation=None):
    """Action of the Lagrangian one-form along the path, by composite Simpson.

    The integrand of each segment is L_fid evaluated on the sampled
    trajectory with on-shell velocities recomputed from the flow field.
    ``velocity_perturbation(fid, y, v) -> v'``, when given, distorts the
    velocities fed to the Lagrangian; it is the off-shell negative control
    (path-independence of the action must then fail).
    """
    total = 0.0
    y = np.asarray(start, dtype=model.dtype).copy()
    for fid, duration in path.segments:
        if duration == 0.0:
            continue
        traj = integrate_flow(model, fid, y, duration, path.step, even_steps=True)
        values = []
        for state in traj.states:
            vel = model.flow_field(fid, state)
            if velocity_perturbation is not None:
                vel = velocity_perturbation(fid, state, vel)
            values.append(model.lagrangian(fid, state, vel))
        values = np.asarray(values)
        dt = traj.times[1] - traj.times[0]
        total = total + _simpson(values, dt)
        y = traj.endpoint
    return total


def _simpson(values: np.ndarray, dt: float):
    # composite Simpson over an even number of uniform intervals
    m = values.size - 1
    assert m % 2 == 0, "Simpson needs an even interval count"
    return (dt / 3.0) * (
        values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-2:2].sum()
    )


def closure_residual(model, j, k, start, T: float, h: float) -> float:
    """|d/dt_k L_j - d/dt_j L_k| at ``start`` by central differences of
    half-width T over on-shell trajectories (L evaluated with flow-field
    velocities at the displaced points)."""
    if j == k:
        raise ValueError("closure residual needs two distinct flows")
    if T <= 0:
        raise ValueError("patch half-width T must be positive")

    def lagr(fid, state):
        return model.lagrangian(fid, state, model.flow_field(fid, state))

    def derivative(of_fid, along_fid):
        plus = integrate_flow(model, along_fid, start, +T, h).endpoint
        minus = integrate_flow(model, along_fid, start, -T, h).endpoint
        return (lagr(of_fid, plus) - lagr(of_fid, minus)) / (2.0 * T)

    return abs(derivative(j, k) - derivative(k, j))


def _require_canonical_chart(model) -> tuple[np.ndarray, np.ndarray]:
    for attr in ("omega", "momentum", "momentum_jacobian", "hamiltonian"):
        if not hasattr(model, attr):
            raise ValueError(f"model lacks a canonical chart (missing {attr!r})")
    omega = np.asarray(model.omega(), dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise ValueError("omega must be a square matrix")
    if np.any(omega + omega.T != 0.0):
        raise ValueError("omega must be antisymmetric: chart is not canonical")
    try:
        pbiv = np.linalg.inv(omega)
    except np.linalg.LinAlgError as exc:
        raise ValueError("omega is degenerate: chart is not canonical") from exc
    return omega, pbiv


def _positional_gradient(model, fid, xi: np.ndarray, gradients: str) -> np.ndarray:
    if gradients == "analytic":
        return np.asarray(model.grad_hamiltonian(fid, xi))
    if gradients != "fd":
        raise ValueError(f"unknown gradient mode {gradients!r}")
    g = np.empty_like(xi)
    for m in range(xi.size):
        bump = np.zeros_like(xi)
        bump[m] = FD_GRADIENT_STEP
        g[m] = (model.hamiltonian(fid, xi + bump) - model.hamiltonian(fid, xi - bump)) / (
            2.0 * FD_GRADIENT_STEP
        )
    return g


def double_zero_identity_parts(model, j, k, jet: JetPoint, gradients: str = "analytic"):
    """The three terms of the off-shell identity, evaluated at an arbitrary jet.

    Returns (closure_term, double_zero_term, bracket_term) with

        closure_term      = d/dt_k L_j - d/dt_j L_k   (chain rule, the
                            symmetric mixed term pi . w cancels between the two)
        double_zero_term  = Ups_j . P . Ups_k
        bracket_term      = {H_j, H_k}_R = dH_j . P . dH_k

    and closure_term + double_zero_term = bracket_term identically.
    """
    omega, pbiv = _require_canonical_chart(model)
    xi = np.asarray(jet.xi, dtype=float)
    vj, vk = np.asarray(jet.velocity(j)), np.asarray(jet.velocity(k))
    w = np.asarray(jet.mixed_velocity(j, k))
    pi = model.momentum(xi)
    dpi = model.momentum_jacobian(xi)
    curl = dpi - dpi.T
    if np.any(curl != omega):
        raise ValueError("momentum-map curl does not match omega: chart is not canonical")
    gj = _positional_gradient(model, j, xi, gradients)
    gk = _positional_gradient(model, k, xi, gradients)
    # d L_j / dxi at frozen velocity: (dpi^T v)_beta - dH_j/dxi_beta
    dlj_dxi = dpi.T @ vj - gj
    dlk_dxi = dpi.T @ vk - gk
    closure = (dlj_dxi @ vk + pi @ w) - (dlk_dxi @ vj + pi @ w)
    ups_j = omega.T @ vj - gj
    ups_k = omega.T @ vk - gk
    # antisymmetrized evaluations of x.P.y (exact-zero when both slots agree)
    double_zero = 0.5 * (ups_j @ pbiv @ ups_k - ups_k @ pbiv @ ups_j)
    bracket = 0.5 * (gj @ pbiv @ gk - gk @ pbiv @ gj)
    return float(closure), float(double_zero), float(bracket)


def double_zero_identity_residual(model, j, k, jet: JetPoint, gradients: str = "analytic") -> float:
    """|closure_term + double_zero_term - bracket_term| at the given jet."""
    closure, double_zero, bracket = double_zero_identity_parts(model, j, k, jet, gradients)
    return abs(closure + double_zero - bracket)


def on_shell_jet(model, xi: np.ndarray, flows) -> JetPoint:
    """Jet with flow-field velocities (mixed data zero; it cancels identically)."""
    return JetPoint(
        xi=np.asarray(xi, dtype=float),
        velocities={fid: model.flow_field(fid, xi) for fid in flows},
    )
