"""Command-line front end: trajectory export, verification campaigns, action comparison.

One JSON config document per run (no environment configuration), three
subcommands:

    orbitforms simulate --config run.json --out outdir
    orbitforms verify   --config campaign.json --out outdir
    orbitforms action   --config paths.json

Exit codes: 0 success, 1 a verification/tolerance judgment failed,
2 invalid configuration, 3 runtime failure, 4 I/O failure.

CSV output is UTF-8 with ',' separators, '.' decimal points, no padding and
shortest round-trip float formatting; complex values occupy two columns with
``_re``/``_im`` suffixes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import gaudin as gd
from . import toda_aks as aks
from . import toda_cartan as car
from .harness import (
    CampaignConfig,
    run_suite,
    sample_gaudin_orbit,
    sample_traceless,
    sample_ub,
    sample_wz,
)
from .linalg import charpoly_coeffs, expm
from .models import GaudinModel, TodaAksModel, TodaCartanModel
from .multitime import MultiTimePath, action, integrate_flow, path_endpoint


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


# ----------------------------------------------------------------------
# config parsing
# ----------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return doc


def _as_complex(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{what} must be a number or an [re, im] pair, got {value!r}")


def _complex_matrix(value, n: int, what: str) -> np.ndarray:
    try:
        m = np.array([[_as_complex(x, what) for x in row] for row in value])
    except (TypeError, ConfigError) as exc:
        raise ConfigError(f"{what}: {exc}") from exc
    if m.shape != (n, n):
        raise ConfigError(f"{what} must be {n}x{n}, got {m.shape}")
    return m


def _float_vector(value, what: str) -> np.ndarray:
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} must be a list of numbers: {exc}") from exc
    if v.ndim != 1:
        raise ConfigError(f"{what} must be a flat list")
    return v


def _parse_flow_id(value, model_name: str):
    if model_name == "gaudin":
        if isinstance(value, (list, tuple)) and len(value) == 2:
            k, r = int(value[0]), int(value[1])
            return (k, r)
        raise ConfigError(f"gaudin flow ids are [level, site] pairs, got {value!r}")
    if isinstance(value, (int, float)) and int(value) in (1, 2):
        return int(value)
    raise ConfigError(f"Toda flow ids are 1 or 2, got {value!r}")


def _build_toda(doc: dict, seed: int):
    name = doc["model"]
    size = int(doc.get("size", 2))
    if size < 1:
        raise ConfigError(f"size must be >= 1, got {size}")
    default_chart = "ub" if name == "toda-aks" else "wz"
    chart = doc.get("chart", default_chart)
    try:
        model = (TodaAksModel if name == "toda-aks" else TodaCartanModel)(size, chart)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    initial = doc.get("initial")
    try:
        if initial is None:
            rng = np.random.default_rng(seed)
            pt = sample_ub(rng, size) if name == "toda-aks" else sample_wz(rng, size)
            if chart == "flaschka":
                pt = aks.ub_to_flaschka(pt) if name == "toda-aks" else car.wz_to_flaschka(pt)
        elif chart == "ub":
            pt = aks.CanonicalUB(_float_vector(initial["u"], "u"), _float_vector(initial["b"], "b"))
        elif chart == "wz":
            pt = car.WZPoint(_float_vector(initial["w"], "w"), _float_vector(initial["z"], "z"))
        else:
            pt = aks.FlaschkaPoint(_float_vector(initial["a"], "a"), _float_vector(initial["b"], "b"))
    except KeyError as exc:
        raise ConfigError(f"initial point is missing coordinate {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid initial point: {exc}") from exc
    y0 = model.pack(pt)
    if y0.size != model.dim:
        raise ConfigError(f"initial point size {y0.size} does not match chart dim {model.dim}")
    return model, y0


def _build_gaudin(doc: dict, seed: int):
    sites = int(doc.get("sites", doc.get("size", 3)))
    n = int(doc.get("n", doc.get("matrix_dim", 2)))
    chart = doc.get("chart", "residues")
    rng = np.random.default_rng(seed)
    if "poles" in doc:
        poles = np.array([_as_complex(z, "pole") for z in doc["poles"]])
    else:
        poles = sample_gaudin_orbit(rng, sites, n).poles
    if "lambda_matrices" in doc:
        seeds = np.stack([_complex_matrix(m, n, "lambda matrix") for m in doc["lambda_matrices"]])
    else:
        seeds = np.stack([sample_traceless(rng, n) for _ in range(sites)])
    for i, s in enumerate(seeds):
        if abs(np.trace(s)) > 1e-10 * max(1.0, float(np.linalg.norm(s))):
            raise ConfigError(f"seed matrix {i} is not traceless")
    if "phi_matrices" in doc:
        groups = np.stack([_complex_matrix(m, n, "phi matrix") for m in doc["phi_matrices"]])
    else:
        groups = np.stack([expm(0.4 * sample_traceless(rng, n)) for _ in range(sites)])
    if "omega_matrix" in doc:
        constant = _complex_matrix(doc["omega_matrix"], n, "omega matrix")
    else:
        constant = 0.5 * sample_traceless(rng, n)
    try:
        orbit = gd.GaudinOrbit(poles, seeds, groups, constant)
        model = GaudinModel(orbit, chart)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return model, model.initial_state()


def _build_model(doc: dict, seed: int):
    name = doc.get("model")
    if name in ("toda-aks", "toda-cartan"):
        return _build_toda(doc, seed)
    if name == "gaudin":
        return _build_gaudin(doc, seed)
    raise ConfigError(f"unknown or missing model {name!r}")


# ----------------------------------------------------------------------
# CSV helpers
# ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _header_and_row_builder(model):
    """Column names and a row-formatting closure for the model's CSV layout."""
    complex_values = model.dtype is complex
    names = model.coordinate_names()

    def expand(labels):
        if not complex_values:
            return list(labels)
        return [f"{name}_{part}" for name in labels for part in ("re", "im")]

    n_dim = (
        model.n_sites + 1
        if isinstance(model, (TodaAksModel, TodaCartanModel))
        else model.matrix_dim
    )
    header = (
        ["t"]
        + expand(names)
        + expand(["H1", "H2"])
        + expand([f"charpoly_c{i}" for i in range(1, n_dim + 1)])
    )

    def row(t, state, h1, h2, cp):
        values = [t]
        scalars = list(state) + [h1, h2] + list(cp)
        for v in scalars:
            if complex_values:
                values.extend([complex(v).real, complex(v).imag])
            else:
                values.append(float(np.real_if_close(v)))
        return ",".join(_fmt(v) for v in values)

    return header, row


def _flow_file_label(model_name: str, fid) -> str:
    if model_name == "gaudin":
        k, r = fid
        return f"{model_name}-t{k}-site{r}.csv"
    return f"{model_name}-t{fid}.csv"


def _simulate_flow(model, fid, y0, T: float, h: float):
    if T == 0.0:
        times = np.zeros(1)
        states = y0[np.newaxis, :]
    else:
        traj = integrate_flow(model, fid, y0, T, h)
        times, states = traj.times, traj.states
    if isinstance(model, GaudinModel):
        lam0 = gd.charpoly_sample_points(model.orbit.lax)[0]
        spectral = lambda y: model._lax_from_state(y)
        charpoly = lambda y: charpoly_coeffs(gd.eval_lax(spectral(y), lam0))[1:]
        _, r = fid
        hams = lambda y: (
            model.hamiltonian((1, r), y),
            model.hamiltonian((2, r), y),
        )
    else:
        charpoly = lambda y: charpoly_coeffs(model.lax_matrix(y))[1:]
        hams = lambda y: (model.hamiltonian(1, y), model.hamiltonian(2, y))
    rows = []
    for t, y in zip(times, states):
        h1, h2 = hams(y)
        rows.append((float(t), y, h1, h2, charpoly(y)))
    return rows


def cmd_simulate(doc: dict, out_dir: Path, seed: int) -> int:
    model, y0 = _build_model(doc, seed)
    if "flows" not in doc:
        raise ConfigError("simulate config needs a 'flows' list")
    flows = [_parse_flow_id(f, doc["model"]) for f in doc["flows"]]
    for fid in flows:
        if fid not in tuple(model.flow_ids):
            raise ConfigError(f"flow {fid!r} not available for this model instance")
    T = float(doc.get("T", 1.0))
    h = float(doc.get("h", 1e-3))
    if T < 0 or h <= 0:
        raise ConfigError("need T >= 0 and h > 0")
    header, row = _header_and_row_builder(model)
    for fid in flows:
        rows = _simulate_flow(model, fid, y0, T, h)
        target = out_dir / _flow_file_label(doc["model"], fid)
        lines = [",".join(header)] + [row(*r) for r in rows]
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {target} ({len(rows)} rows)")
    return 0


def cmd_verify(doc: dict, out_dir: Path, seed: int, tolerance_scale: float) -> int:
    try:
        config = CampaignConfig(
            model=doc.get("model", ""),
            size=int(doc.get("size", doc.get("sites", 2 if doc.get("model") != "gaudin" else 3))),
            matrix_dim=int(doc.get("matrix_dim", doc.get("n", 2))),
            seed=seed,
            samples=int(doc.get("samples", 100)),
            checks=tuple(doc["checks"]) if "checks" in doc else None,
            tolerance_scale=tolerance_scale,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    reports = run_suite(config)
    payload = {
        "model": config.model,
        "checks": [
            {
                "id": r.check,
                "samples": r.samples,
                "max_residual": r.max_residual,
                "tolerance": r.tolerance,
                "pass": r.passed,
                "elapsed_s": r.elapsed_s,
            }
            for r in reports
        ],
        "seed": config.seed,
    }
    target = out_dir / "report.json"
    target.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    all_pass = True
    for r in reports:
        flag = "pass" if r.passed else "FAIL"
        print(f"{flag:4s} {r.check:22s} max_residual={r.max_residual:.3e} tolerance={r.tolerance:.1e}")
        all_pass &= r.passed
    print(f"report written to {target}")
    return 0 if all_pass else 1


def cmd_action(doc: dict, seed: int, tolerance_scale: float) -> int:
    model, y0 = _build_model(doc, seed)
    if doc.get("model") == "gaudin" and model.chart != "group":
        raise ConfigError("action evaluation needs the gaudin 'group' chart")
    paths_doc = doc.get("paths")
    if not isinstance(paths_doc, list) or len(paths_doc) != 2:
        raise ConfigError("action config needs exactly two paths")
    h = float(doc.get("h", 1e-3))
    if h <= 0:
        raise ConfigError("need h > 0")
    paths = []
    for p in paths_doc:
        segments = tuple(
            (_parse_flow_id(fid, doc["model"]), float(duration)) for fid, duration in p
        )
        paths.append(MultiTimePath(segments, step=h))
    tolerance = float(doc.get("tolerance", 1e-6)) * tolerance_scale
    endpoint_tol = float(doc.get("endpoint_tolerance", 1e-6))
    ends = [path_endpoint(model, p, y0) for p in paths]
    actions = [action(model, p, y0) for p in paths]
    difference = abs(actions[0] - actions[1])
    for i, s in enumerate(actions):
        value = complex(s) if np.iscomplexobj(s) else float(s)
        print(f"action[{i}] = {value!r}")
    print(f"|difference| = {difference:.6e}")
    endpoint_gap = float(np.linalg.norm(ends[0] - ends[1]))
    if endpoint_gap > endpoint_tol:
        print(
            f"endpoints differ (gap {endpoint_gap:.3e} > {endpoint_tol:.1e}); "
            "skipping the pass/fail judgment"
        )
        return 0
    print(f"endpoints agree (gap {endpoint_gap:.3e}); tolerance {tolerance:.1e}")
    return 0 if difference <= tolerance else 1


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitforms",
        description="Lax flows and Lagrangian multiforms on coadjoint orbits: "
        "simulate trajectories, verify structural identities, compare actions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "verify", "action"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, default=None, help="override the config RNG seed")
        p.add_argument(
            "--tolerance-scale",
            type=float,
            default=1.0,
            help="multiply all pass/fail tolerances by this factor",
        )
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        doc = _load_config(args.config)
        seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
        if args.tolerance_scale < 0:
            raise ConfigError("--tolerance-scale must be nonnegative")
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return 4
        if args.command == "simulate":
            return cmd_simulate(doc, out_dir, seed)
        if args.command == "verify":
            return cmd_verify(doc, out_dir, seed, args.tolerance_scale)
        return cmd_action(doc, seed, args.tolerance_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    except (RuntimeError, OverflowError, ValueError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
