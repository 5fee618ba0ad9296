"""Acceptance criteria, one test per criterion at its pinned tolerance.

Each test prints a single pass/fail line (run ``pytest -s`` to see them all)
and asserts both the residual bound and the runtime budget.
"""

import time

import numpy as np

from conftest import random_gaudin_orbit, random_traceless, random_ub, random_wz
from orbitforms import gaudin as gd
from orbitforms import toda_aks as aks
from orbitforms import toda_cartan as car
from orbitforms.dialgebra import (
    AKS_TODA,
    CARTAN_TODA,
    ROperator,
    lax_vector_field,
    lie_poisson_r,
    mcybe_residual,
    skewness_defect,
)
from orbitforms.liealg import grad_trace_power
from orbitforms.linalg import charpoly_coeffs
from orbitforms.models import GaudinModel, TodaAksModel, TodaCartanModel
from orbitforms.multitime import (
    JetPoint,
    MultiTimePath,
    action,
    closure_residual,
    double_zero_identity_parts,
    double_zero_identity_residual,
    integrate_flow,
    on_shell_jet,
    path_endpoint,
)


def report(number, name, residual, tolerance, elapsed, budget, mode="<="):
    ok = residual <= tolerance if mode == "<=" else residual >= tolerance
    status = "PASS" if ok and elapsed <= budget else "FAIL"
    print(
        f"ACCEPTANCE {number:02d} {name}: {status} "
        f"(value {residual:.3e}, bound {mode} {tolerance:.1e}, {elapsed:.2f}s/{budget:.0f}s)"
    )
    assert ok, f"criterion {number}: {residual} not {mode} {tolerance}"
    assert elapsed <= budget, f"criterion {number}: runtime {elapsed:.1f}s over {budget}s"


def test_criterion_01_mcybe():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for kind in (AKS_TODA, CARTAN_TODA):
        for n_sites in (1, 2, 3, 4):
            op = ROperator(kind, n_sites + 1)
            for _ in range(200):
                x = random_traceless(rng, op.n)
                y = random_traceless(rng, op.n)
                worst = max(worst, mcybe_residual(op, x, y))
    report(1, "mCYBE residual, both structures, sl(2..5)", worst,
           1e-12, time.perf_counter() - t0, 1.0)


def test_criterion_02_skewness_contrast():
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    cartan_worst = 0.0
    for n_sites in (1, 2, 3, 4):
        op = ROperator(CARTAN_TODA, n_sites + 1)
        for _ in range(200):
            x = random_traceless(rng, op.n)
            y = random_traceless(rng, op.n)
            cartan_worst = max(cartan_worst, skewness_defect(op, x, y))
    op = ROperator(AKS_TODA, 3)
    basis = [np.outer(np.eye(3)[i], np.eye(3)[j]) for i in range(3) for j in range(3)]
    aks_best = max(skewness_defect(op, e1, e2) for e1 in basis for e2 in basis)
    elapsed = time.perf_counter() - t0
    assert aks_best >= 0.1, "the non-skew structure must violate skewness at order one"
    report(2, "skewness: Cartan exact, AKS violated >= 0.1", cartan_worst,
           1e-12, elapsed, 1.0)


def test_criterion_03_involution():
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    worst = 0.0
    for kind, scale, sampler, chart in (
        (AKS_TODA, aks.H_SCALE, random_ub, aks.ub_to_flaschka),
        (CARTAN_TODA, car.H_SCALE, random_wz, car.wz_to_flaschka),
    ):
        op = ROperator(kind, 3)
        for _ in range(100):
            lm = aks.lax_from_flaschka(chart(sampler(rng, 2)))
            worst = max(
                worst,
                abs(lie_poisson_r(op, lm, grad_trace_power(lm, 1, scale),
                                  grad_trace_power(lm, 2, scale))),
            )
    for _ in range(100):
        lax = random_gaudin_orbit(rng, 3, 2).lax
        for j in (1, 2):
            for s in range(3):
                for k in (1, 2):
                    for r in range(3):
                        worst = max(worst, abs(gd.hamiltonian_flow_derivative(lax, j, s, k, r)))
    report(3, "involution of the Hamiltonian families", worst,
           1e-11, time.perf_counter() - t0, 1.0)


def test_criterion_04_el_equals_lax():
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    worst = 0.0
    for kind, grad, sampler, chart in (
        (AKS_TODA, aks.grad_hamiltonian_aks, random_ub, aks.ub_to_flaschka),
        (CARTAN_TODA, car.grad_hamiltonian_cartan, random_wz, car.wz_to_flaschka),
    ):
        op = ROperator(kind, 3)
        for _ in range(100):
            pt = sampler(rng, 2)
            fl = chart(pt)
            lm = aks.lax_from_flaschka(fl)
            for k in (1, 2):
                field = lax_vector_field(op, lm, grad(k, lm))
                da, db = aks.flow_field_flaschka(k, fl)
                worst = max(
                    worst,
                    float(np.abs(np.diagonal(field) - da).max()),
                    float(np.abs(np.diagonal(field, 1) - db).max()),
                )
    report(4, "chart EL systems equal the Lax fields", worst,
           1e-10, time.perf_counter() - t0, 2.0)


def test_criterion_05_factorisation_oracle():
    rng = np.random.default_rng(105)
    t0 = time.perf_counter()
    model = TodaAksModel(2, chart="flaschka")
    worst = 0.0
    for _ in range(10):
        fl = aks.ub_to_flaschka(random_ub(rng, 2, scale=0.5))
        y0 = np.concatenate([fl.a, fl.b])
        end = integrate_flow(model, 1, y0, 1.0, 1e-4).endpoint
        l_rk4 = aks.lax_from_flaschka(model.unpack(end))
        l_qr = aks.solve_by_factorisation(aks.lax_from_flaschka(fl), 1.0)
        worst = max(worst, float(np.abs(l_rk4 - l_qr).max()))
    # convergence order against the closed form
    fl = aks.ub_to_flaschka(random_ub(rng, 2, scale=0.5))
    y0 = np.concatenate([fl.a, fl.b])
    l_true = aks.solve_by_factorisation(aks.lax_from_flaschka(fl), 1.0)
    hs = np.array([0.04, 0.02, 0.01, 0.005])
    errs = [
        np.abs(
            aks.lax_from_flaschka(model.unpack(integrate_flow(model, 1, y0, 1.0, h).endpoint))
            - l_true
        ).max()
        for h in hs
    ]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    elapsed = time.perf_counter() - t0
    assert abs(slope - 4.0) <= 0.2, f"convergence order {slope} outside 4.0 +- 0.2"
    report(5, f"QR closed form vs RK4 (order fit {slope:.2f})", worst,
           1e-6, elapsed, 30.0)


def test_criterion_06_isospectrality():
    rng = np.random.default_rng(106)
    t0 = time.perf_counter()
    worst = 0.0

    def drift(model, fid, y0):
        traj = integrate_flow(model, fid, y0, 1.0, 1e-3)
        if hasattr(model, "lax_matrix"):
            pairs = [(model.lax_matrix(traj.states[0]), model.lax_matrix(traj.states[-1]))]
        else:
            pairs = list(zip(model.spectral_matrices(traj.states[0]),
                             model.spectral_matrices(traj.states[-1])))
        return max(float(np.abs(charpoly_coeffs(a) - charpoly_coeffs(b)).max()) for a, b in pairs)

    for model_cls, sampler, chart in (
        (TodaAksModel, random_ub, aks.ub_to_flaschka),
        (TodaCartanModel, random_wz, car.wz_to_flaschka),
    ):
        model = model_cls(2, chart="flaschka")
        for _ in range(3):
            fl = chart(sampler(rng, 2, scale=0.5))
            y0 = np.concatenate([fl.a, fl.b])
            for fid in model.flow_ids:
                worst = max(worst, drift(model, fid, y0))
    for _ in range(2):
        gm = GaudinModel(random_gaudin_orbit(rng, 3, 2, scale=0.5), chart="residues")
        y0 = gm.initial_state()
        for fid in gm.flow_ids:
            worst = max(worst, drift(gm, fid, y0))
    report(6, "isospectral drift over unit time, every flow", worst,
           1e-8, time.perf_counter() - t0, 30.0)


def test_criterion_07_flow_commutativity():
    rng = np.random.default_rng(107)
    t0 = time.perf_counter()
    worst = 0.0
    leg = 0.1
    for model_cls, sampler, chart in (
        (TodaAksModel, random_ub, aks.ub_to_flaschka),
        (TodaCartanModel, random_wz, car.wz_to_flaschka),
    ):
        model = model_cls(2, chart="flaschka")
        fl = chart(sampler(rng, 2, scale=0.5))
        y0 = np.concatenate([fl.a, fl.b])
        p12 = MultiTimePath(((1, leg), (2, leg)), 1e-3)
        p21 = MultiTimePath(((2, leg), (1, leg)), 1e-3)
        worst = max(
            worst,
            float(np.linalg.norm(path_endpoint(model, p12, y0) - path_endpoint(model, p21, y0))),
        )
    gm = GaudinModel(random_gaudin_orbit(rng, 3, 2, scale=0.5), chart="residues")
    y0 = gm.initial_state()
    fids = list(gm.flow_ids)
    for i in range(len(fids)):
        for j in range(i + 1, len(fids)):
            pij = MultiTimePath(((fids[i], leg), (fids[j], leg)), 1e-3)
            pji = MultiTimePath(((fids[j], leg), (fids[i], leg)), 1e-3)
            worst = max(
                worst,
                float(np.linalg.norm(path_endpoint(gm, pij, y0) - path_endpoint(gm, pji, y0))),
            )
    report(7, "staircase-swap endpoint defects, all flow pairs", worst,
           1e-7, time.perf_counter() - t0, 60.0)


def test_criterion_08_closure_relation():
    rng = np.random.default_rng(108)
    t0 = time.perf_counter()
    worst = 0.0
    for model, y0 in (
        (TodaAksModel(2), TodaAksModel(2).pack(random_ub(rng, 2))),
        (TodaCartanModel(2), TodaCartanModel(2).pack(random_wz(rng, 2))),
    ):
        worst = max(worst, closure_residual(model, 1, 2, y0, 2e-4, 2.5e-5))
    gm = GaudinModel(random_gaudin_orbit(rng, 3, 2, scale=0.5), chart="group")
    y0 = gm.initial_state()
    fids = list(gm.flow_ids)
    for i in range(len(fids)):
        for j in range(i + 1, len(fids)):
            worst = max(worst, closure_residual(gm, fids[i], fids[j], y0, 1e-4, 1.25e-5))
    report(8, "closure relation on shell, all flow pairs", worst,
           1e-6, time.perf_counter() - t0, 60.0)


def test_criterion_09_double_zero_identity():
    rng = np.random.default_rng(109)
    t0 = time.perf_counter()
    worst_off = 0.0
    worst_on = 0.0
    for model, sampler in ((TodaAksModel(2), random_ub), (TodaCartanModel(2), random_wz)):
        for _ in range(100):
            xi = model.pack(sampler(rng, 2))
            jet = JetPoint(
                xi,
                velocities={1: rng.standard_normal(4), 2: rng.standard_normal(4)},
                mixed={(1, 2): rng.standard_normal(4)},
            )
            worst_off = max(worst_off, double_zero_identity_residual(model, 1, 2, jet, "fd"))
            shell = on_shell_jet(model, xi, (1, 2))
            closure, dz, bracket = double_zero_identity_parts(model, 1, 2, shell)
            worst_on = max(worst_on, abs(closure + dz), abs(bracket))
    elapsed = time.perf_counter() - t0
    assert worst_on <= 1e-8, f"on-shell sides reached {worst_on}"
    report(9, f"off-shell identity (on-shell sides {worst_on:.1e})", worst_off,
           1e-6, elapsed, 10.0)


def test_criterion_10_action_path_independence():
    t0 = time.perf_counter()
    worst = 0.0
    for model, y0 in (
        (TodaAksModel(1), np.array([0.3, 1.2])),
        (TodaAksModel(2), np.array([0.8, -0.5, 1.4, 1.1])),
        (TodaCartanModel(2), np.array([0.8, -0.5, 1.4, 1.1])),
    ):
        p1 = MultiTimePath(((1, 0.2), (2, 0.2)), 1e-3)
        p2 = MultiTimePath(((2, 0.2), (1, 0.2)), 1e-3)
        gap = float(np.linalg.norm(path_endpoint(model, p1, y0) - path_endpoint(model, p2, y0)))
        assert gap <= 1e-7, "staircase endpoints must agree before comparing actions"
        worst = max(worst, abs(action(model, p1, y0) - action(model, p2, y0)))

    def distort(fid, y, v):
        out = v.copy()
        if fid == 1:
            out[0] += 2.0
        return out

    model = TodaAksModel(2)
    y0 = np.array([0.8, -0.5, 1.4, 1.1])
    p1 = MultiTimePath(((1, 0.3), (2, 0.3)), 1e-3)
    p2 = MultiTimePath(((2, 0.3), (1, 0.3)), 1e-3)
    control = abs(
        action(model, p1, y0, velocity_perturbation=distort)
        - action(model, p2, y0, velocity_perturbation=distort)
    )
    elapsed = time.perf_counter() - t0
    assert control >= 1e-2, f"negative control too weak: {control}"
    report(10, f"action path-independence (control {control:.2e})", worst,
           1e-6, elapsed, 10.0)


def test_criterion_11_gaudin_hamiltonian_extraction():
    rng = np.random.default_rng(111)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        lax = random_gaudin_orbit(rng, 3, 2).lax
        center = lax.poles.mean()
        spread = 1.0 + float(np.abs(lax.poles - center).max())
        samples = center + 2.5 * spread * np.exp(2j * np.pi * (np.arange(14) + 0.3) / 14)
        rows, rhs = [], []
        for lam in samples:
            inv = 1.0 / (lam - lax.poles)
            rows.append(np.concatenate([inv**2, inv, [1.0]]))
            value = gd.eval_lax(lax, lam)
            rhs.append(0.5 * np.trace(value @ value))
        coeffs, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        for r in range(3):
            worst = max(worst, abs(coeffs[3 + r] - gd.gaudin_hamiltonian(lax, 1, r)))
    report(11, "quadratic Hamiltonians recovered by sampling", worst,
           1e-9, time.perf_counter() - t0, 5.0)
