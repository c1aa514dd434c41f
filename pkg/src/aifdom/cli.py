"""Experiment driver: configuration-file-driven commands with machine-readable
outputs.

Each experiment is one YAML file describing the model, an optional
simulation, a certification region, and analysis settings; each subcommand
runs one stage of the workflow (simulate -> region -> diagnostics ->
certificate -> verification) and writes CSV/JSON files atomically into the
output directory. Outputs embed the config hash and tool version, and are
byte-identical across repeated runs of the same config.

Exit codes: 0 success, 1 usage/config error, 2 numerical fault,
3 certification infeasible or verification failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .circuit_models import (
    AllSeqPlantParams,
    BistableParams,
    ControllerParams,
    DomainError,
    FopPlantParams,
    HillParams,
    SystemModel,
    all_seq_closed_loop,
    bistable_model,
    fop_closed_loop,
    hill_value_and_derivative,
)
from .dominance import (
    CertificateInvalidError,
    DegenerateCertificateError,
    InfeasibilityError,
    load_certificate,
    solve_with_margin_fallback,
    verify_certificate,
)
from .ode_sim import (
    AttractorReport,
    InsufficientData,
    IntegratorFault,
    StiffnessError,
    Trajectory,
    classify_trajectory,
    integrate,
)
from .regions import (
    Region,
    RegionError,
    hull_of_points,
    interior_grid,
    relative_margin,
    vertices,
)
from .spectral import (
    BoundarySplitError,
    ContourError,
    DegenerateLocusError,
    MarginalWindingError,
    PoleError,
    nyquist_locus,
    root_locus,
    spectrum,
)

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_CERTIFICATION = 3

NUMERICAL_ERRORS = (
    StiffnessError,
    IntegratorFault,
    InsufficientData,
    BoundarySplitError,
    PoleError,
    ContourError,
    MarginalWindingError,
    DegenerateLocusError,
    DomainError,
    ArithmeticError,
)
CERTIFICATION_ERRORS = (InfeasibilityError, DegenerateCertificateError, CertificateInvalidError)


class ConfigError(ValueError):
    """Malformed experiment configuration; message names the offending key."""


# ---------------------------------------------------------------------------
# config loading and validation


def _check_keys(d: dict, allowed: set, path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _get(d: dict, key: str, path: str, default=None, required: bool = False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}: missing required key")
        return default
    return d[key]


def _num(d: dict, key: str, path: str, default=None, required: bool = False, positive: bool = False):
    v = _get(d, key, path, default, required)
    if v is None:
        return None
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: must be a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}: must be > 0, got {v}")
    return float(v)


@dataclass
class Experiment:
    """Parsed configuration plus the file hash embedded in every output."""

    raw: dict
    config_sha256: str
    seed: int = 0

    # -- model ---------------------------------------------------------------

    def model_kind(self) -> str:
        return self.raw["model"]["kind"]

    def controller_params(self) -> ControllerParams:
        c = self.raw["model"]["controller"]
        return ControllerParams(mu=c["mu"], eta=c["eta"])

    def hill_params(self) -> Optional[HillParams]:
        h = self.raw["model"].get("hill")
        if h is None:
            return None
        return HillParams(k1=h["k1"], k2=h["k2"], n_exp=h["n_exp"])

    def uncertainty(self) -> dict:
        return {k: tuple(v) for k, v in self.raw["model"].get("uncertainty", {}).items()}

    def build_model(self, overrides: Optional[dict] = None) -> SystemModel:
        kind = self.model_kind()
        raw_model = self.raw["model"]
        overrides = overrides or {}
        if kind == "fop":
            cp = self.controller_params()
            if "eta" in overrides:
                cp = ControllerParams(mu=cp.mu, eta=overrides["eta"])
            p = raw_model["plant"]
            pp = FopPlantParams(theta1=p["theta1"], theta2=p["theta2"], k=p["k"], gamma=p["gamma"])
            return fop_closed_loop(cp, pp, self.hill_params())
        if kind == "all_seq":
            cp = self.controller_params()
            if "eta" in overrides:
                cp = ControllerParams(mu=cp.mu, eta=overrides["eta"])
            p = raw_model["plant"]
            pp = AllSeqPlantParams(phi1=p["phi1"], phi2=p["phi2"], theta1=p["theta1"], k=p["k"])
            return all_seq_closed_loop(cp, pp, p["theta2"])
        if kind == "bistable":
            p = raw_model["params"]
            bp = BistableParams(
                mu1=p["mu1"], mu2=p["mu2"], theta1=p["theta1"],
                eta=overrides.get("eta", p["eta"]), gamma=p["gamma"],
            )
            return bistable_model(bp)
        raise ConfigError(f"model.kind: unknown kind {kind!r}")

    def fop_params(self) -> tuple[ControllerParams, FopPlantParams]:
        if self.model_kind() != "fop":
            raise ConfigError("model.kind: frequency diagnostics need kind 'fop'")
        p = self.raw["model"]["plant"]
        return self.controller_params(), FopPlantParams(
            theta1=p["theta1"], theta2=p["theta2"], k=p["k"], gamma=p["gamma"]
        )

    def loop_gain_at(self, z1: float) -> float:
        g = self.raw.get("analysis", {}).get("loop_gain")
        if g is not None:
            return float(g)
        cp, pp = self.fop_params()
        hill = self.hill_params()
        slope = pp.theta1 if hill is None else hill_value_and_derivative(z1, hill)[1]
        return slope * pp.theta2 * pp.k

    # -- simulation -----------------------------------------------------------

    def simulate_runs(self) -> list[tuple[str, dict]]:
        """(label, parameter overrides) for the nominal run or a sweep."""
        sim = self.raw.get("simulate")
        if sim is None:
            raise ConfigError("simulate: block required for this command")
        sweep = sim.get("sweep")
        if sweep is None:
            return [("", {})]
        param, values = sweep["param"], sweep["values"]
        return [(f"_{param}{v:g}", {param: float(v)}) for v in values]

    def run_simulation(self, overrides: Optional[dict] = None) -> tuple[Trajectory, AttractorReport]:
        sim = self.raw["simulate"]
        model = self.build_model(overrides)
        traj = integrate(
            model,
            np.asarray(sim["x0"], dtype=float),
            t_end=sim["t_end"],
            rel_tol=sim.get("rel_tol", 1e-8),
            abs_tol=sim.get("abs_tol", 1e-10),
            max_step=sim.get("max_step"),
        )
        traj.meta["_model"] = model
        report = classify_trajectory(traj, sim.get("transient_fraction", 0.5))
        return traj, report

    # -- region ---------------------------------------------------------------

    def region_factory(self) -> tuple:
        """(factory margin->Region, base_margin, max_halvings).

        Explicit-vertex regions ignore the margin (factory is constant).
        """
        reg = self.raw.get("region")
        if reg is None:
            raise ConfigError("region: block required for this command")
        model = self.build_model()
        param_box = self.uncertainty()
        coords = tuple(reg.get("coords", (0, 1)))

        if "vertices" in reg:
            explicit = np.asarray(reg["vertices"], dtype=float)
            x_box = {int(i): tuple(v) for i, v in reg.get("x_box", {}).items()} if isinstance(reg.get("x_box"), dict) else {}
            region = Region(
                dim=model.dim,
                z_polytope=explicit,
                poly_coords=coords,
                x_box=x_box,
                param_box=param_box,
                degenerate=len(explicit) < 3,
            )
            return (lambda m: region), 0.0, 0

        if reg.get("hull_of") != "simulate":
            raise ConfigError("region.hull_of: must be 'simulate' (or supply region.vertices)")
        tf = reg.get("transient_fraction", 0.5)
        pool = []
        for _, overrides in self.simulate_runs():
            traj, _ = self.run_simulation(overrides)
            _, sts = traj.post_transient(tf)
            pool.append(sts)
        states = np.vstack(pool)
        pts = states[:, list(coords)]

        base_margin = reg.get("margin_abs")
        if base_margin is None:
            base_margin = relative_margin(pts, reg.get("margin_fraction", 0.25))

        x_box_cfg = reg.get("x_box")
        box_coords = [i for i in range(model.dim) if i not in coords]

        def factory(margin: float) -> Region:
            x_box = None
            if x_box_cfg == "auto":
                x_box = {
                    i: (max(0.0, float(states[:, i].min()) - margin), float(states[:, i].max()) + margin)
                    for i in box_coords
                }
            elif isinstance(x_box_cfg, dict):
                x_box = {int(i): tuple(v) for i, v in x_box_cfg.items()}
            return hull_of_points(
                model.dim, pts, margin=margin, poly_coords=coords, x_box=x_box, param_box=param_box
            )

        return factory, float(base_margin), int(reg.get("max_halvings", 3))

    def analysis(self) -> dict:
        return self.raw.get("analysis", {})


_TOP_KEYS = {"model", "simulate", "region", "analysis", "output"}
_MODEL_KEYS = {"kind", "controller", "plant", "params", "hill", "uncertainty"}
_SIM_KEYS = {"x0", "t_end", "rel_tol", "abs_tol", "max_step", "transient_fraction", "sweep"}
_REGION_KEYS = {
    "hull_of", "vertices", "coords", "margin_fraction", "margin_abs",
    "transient_fraction", "x_box", "max_halvings",
}
_ANALYSIS_KEYS = {
    "lambda", "epsilon", "p_target", "loop_gain", "omega_max",
    "n_samples", "gain_grid", "sample_density",
}


def load_experiment(path: str, seed: int = 0) -> Experiment:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(blob)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: top level must be a mapping")
    _check_keys(raw, _TOP_KEYS, "config")
    model = _get(raw, "model", "config", required=True)
    _check_keys(model, _MODEL_KEYS, "model")
    kind = _get(model, "kind", "model", required=True)
    if kind not in ("fop", "all_seq", "bistable"):
        raise ConfigError(f"model.kind: must be fop, all_seq, or bistable, got {kind!r}")
    if kind in ("fop", "all_seq"):
        ctrl = _get(model, "controller", "model", required=True)
        _num(ctrl, "mu", "model.controller", required=True)
        _num(ctrl, "eta", "model.controller", required=True, positive=True)
        plant = _get(model, "plant", "model", required=True)
        needed = ("theta1", "theta2", "k", "gamma") if kind == "fop" else ("phi1", "phi2", "theta1", "k", "theta2")
        for key in needed:
            _num(plant, key, "model.plant", required=True, positive=True)
    else:
        params = _get(model, "params", "model", required=True)
        for key in ("mu1", "mu2", "theta1", "eta", "gamma"):
            _num(params, key, "model.params", required=True)
    hill = model.get("hill")
    if hill is not None:
        if kind != "fop":
            raise ConfigError("model.hill: saturating actuation applies to the fop plant only")
        _num(hill, "k1", "model.hill", required=True, positive=True)
        _num(hill, "k2", "model.hill", required=True)
        n_exp = _get(hill, "n_exp", "model.hill", required=True)
        if not isinstance(n_exp, int) or n_exp < 1:
            raise ConfigError(f"model.hill.n_exp: must be an integer >= 1, got {n_exp!r}")
    unc = model.get("uncertainty", {})
    if not isinstance(unc, dict):
        raise ConfigError("model.uncertainty: must be a mapping of parameter -> [lo, hi]")
    for name, iv in unc.items():
        if name not in ("eta",):
            raise ConfigError(f"model.uncertainty.{name}: only 'eta' intervals are supported")
        if not (isinstance(iv, (list, tuple)) and len(iv) == 2 and iv[0] <= iv[1]):
            raise ConfigError(f"model.uncertainty.{name}: must be [lo, hi] with lo <= hi")

    sim = raw.get("simulate")
    if sim is not None:
        _check_keys(sim, _SIM_KEYS, "simulate")
        x0 = _get(sim, "x0", "simulate", required=True)
        dim = 2 if kind == "bistable" else 4
        if not (isinstance(x0, list) and len(x0) == dim):
            raise ConfigError(f"simulate.x0: must be a list of {dim} numbers for kind {kind!r}")
        if any(not isinstance(v, (int, float)) or v < 0 for v in x0):
            raise ConfigError("simulate.x0: entries must be nonnegative numbers")
        _num(sim, "t_end", "simulate", required=True, positive=True)
        sweep = sim.get("sweep")
        if sweep is not None:
            _check_keys(sweep, {"param", "values"}, "simulate.sweep")
            if sweep.get("param") != "eta":
                raise ConfigError("simulate.sweep.param: only 'eta' sweeps are supported")
            if not isinstance(sweep.get("values"), list) or not sweep["values"]:
                raise ConfigError("simulate.sweep.values: must be a nonempty list")

    reg = raw.get("region")
    if reg is not None:
        _check_keys(reg, _REGION_KEYS, "region")
        if "vertices" not in reg and reg.get("hull_of") != "simulate":
            raise ConfigError("region: needs either explicit 'vertices' or hull_of: simulate")

    ana = raw.get("analysis")
    if ana is not None:
        _check_keys(ana, _ANALYSIS_KEYS, "analysis")
        lam = _num(ana, "lambda", "analysis")
        if lam is not None and lam < 0:
            raise ConfigError(f"analysis.lambda: must be >= 0, got {lam}")

    out = raw.get("output")
    if out is not None:
        _check_keys(out, {"directory"}, "output")

    return Experiment(raw=raw, config_sha256=hashlib.sha256(blob).hexdigest(), seed=seed)


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(exp: Experiment, payload: dict) -> str:
    doc = {"tool_version": __version__, "config_sha256": exp.config_sha256, "seed": exp.seed}
    doc.update(payload)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _out_dir(exp: Experiment, args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(exp.raw.get("output", {}).get("directory", "out"))


def _region_json(exp: Experiment, region: Region, margin: float, halvings: int) -> str:
    return _json_text(
        exp,
        {"region": region.to_jsonable(), "margin": margin, "halvings": halvings},
    )


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(exp: Experiment, args) -> int:
    out = _out_dir(exp, args)
    for label, overrides in exp.simulate_runs():
        traj, report = exp.run_simulation(overrides)
        if "csv" in args.formats:
            _atomic_write(out / f"trajectory{label}.csv", traj.to_csv())
        if "json" in args.formats:
            meta = {k: v for k, v in traj.meta.items() if not k.startswith("_")}
            _atomic_write(
                out / f"attractor{label}.json",
                _json_text(exp, {"attractor": report.to_jsonable(), "integrator": meta}),
            )
    return 0


def _region_for_diagnostics(exp: Experiment) -> tuple[Region, float]:
    factory, base_margin, _ = exp.region_factory()
    return factory(base_margin), base_margin


def cmd_spectrum(exp: Experiment, args) -> int:
    out = _out_dir(exp, args)
    model = exp.build_model()
    region, margin = _region_for_diagnostics(exp)
    lam = exp.analysis().get("lambda", 0.0)
    density = exp.analysis().get("sample_density", 10)

    states = [v.state for v in vertices(region, state_deps=model.jacobian_state_deps)]
    n_vertex = len(states)
    base = np.zeros(model.dim)
    for i, (lo, hi) in dict(region.x_box).items():
        base[i] = 0.5 * (lo + hi)
    for zpt in interior_grid(region, density):
        st = base.copy()
        st[list(region.poly_coords)] = zpt
        states.append(st)
    if not states:
        raise ConfigError("region: produced no sample states")

    samples = [spectrum(model, st, lam) for st in states]
    lines = ["which_vertex," + ",".join(f"re_{i+1},im_{i+1}" for i in range(model.dim))]
    for idx, s in enumerate(samples):
        ev = s.eigenvalues
        lines.append(f"{idx}," + ",".join(f"{_fmt(ev[i].real)},{_fmt(ev[i].imag)}" for i in range(model.dim)))
    if "csv" in args.formats:
        _atomic_write(out / "spectrum.csv", "\n".join(lines) + "\n")
    if "json" in args.formats:
        _atomic_write(
            out / "spectrum.json",
            _json_text(
                exp,
                {
                    "lambda": lam,
                    "n_vertex_samples": n_vertex,
                    "splits": [list(s.split) for s in samples],
                    "states": [[float(v) for v in s.xi] for s in samples],
                },
            ),
        )
        _atomic_write(out / "region.json", _region_json(exp, region, margin, 0))
    return 0


def cmd_nyquist(exp: Experiment, args) -> int:
    out = _out_dir(exp, args)
    cp, pp = exp.fop_params()
    model = exp.build_model()
    region, margin = _region_for_diagnostics(exp)
    ana = exp.analysis()
    lam = ana.get("lambda", 0.0)
    omega_max = ana.get("omega_max", 100.0)
    n_samples = int(ana.get("n_samples", 2001))

    sidecar = []
    for idx, v in enumerate(vertices(region, state_deps=model.jacobian_state_deps)):
        z = v.state[list(region.poly_coords)]
        gain = exp.loop_gain_at(float(z[0]))
        locus = nyquist_locus(z, lam, gain, cp, pp, omega_max=omega_max, n_samples=n_samples)
        if "csv" in args.formats:
            rows = ["omega,re,im"] + [
                f"{_fmt(w)},{_fmt(val.real)},{_fmt(val.imag)}"
                for w, val in zip(locus.omega_grid, locus.values)
            ]
            _atomic_write(out / f"nyquist_{idx:03d}.csv", "\n".join(rows) + "\n")
        sidecar.append(
            {
                "index": idx,
                "z": [float(x) for x in z],
                "lambda": lam,
                "loop_gain": gain,
                "critical_point": [locus.critical_point.real, locus.critical_point.imag],
                "encirclements": locus.encirclements,
                "q_xi": locus.q_xi,
                "indented_poles": [[p.real, p.imag] for p in locus.indented_poles],
            }
        )
    if "json" in args.formats:
        _atomic_write(out / "nyquist.json", _json_text(exp, {"loci": sidecar}))
        _atomic_write(out / "region.json", _region_json(exp, region, margin, 0))
    return 0


def cmd_rootlocus(exp: Experiment, args) -> int:
    out = _out_dir(exp, args)
    cp, pp = exp.fop_params()
    model = exp.build_model()
    region, margin = _region_for_diagnostics(exp)
    ana = exp.analysis()
    lam = ana.get("lambda", 0.0)
    grid_cfg = ana.get("gain_grid", {"start": 0.01, "stop": 100.0, "num": 200, "spacing": "log"})
    if isinstance(grid_cfg, dict):
        if grid_cfg.get("spacing", "log") == "log":
            gains = np.geomspace(grid_cfg["start"], grid_cfg["stop"], int(grid_cfg["num"]))
        else:
            gains = np.linspace(grid_cfg["start"], grid_cfg["stop"], int(grid_cfg["num"]))
    else:
        gains = np.asarray(grid_cfg, dtype=float)

    sidecar = []
    for idx, v in enumerate(vertices(region, state_deps=model.jacobian_state_deps)):
        z = v.state[list(region.poly_coords)]
        rl = root_locus(z, gains, lam, cp, pp)
        if "csv" in args.formats:
            n = rl.traces.shape[1]
            head = "gain," + ",".join(f"re_{i+1},im_{i+1}" for i in range(n))
            rows = [head]
            for g, roots in zip(rl.gains, rl.traces):
                rows.append(
                    f"{_fmt(g)}," + ",".join(f"{_fmt(r.real)},{_fmt(r.imag)}" for r in roots)
                )
            _atomic_write(out / f"rootlocus_{idx:03d}.csv", "\n".join(rows) + "\n")
        sidecar.append({"index": idx, "z": [float(x) for x in z], "splits": [list(s) for s in rl.splits]})
    if "json" in args.formats:
        _atomic_write(out / "rootlocus.json", _json_text(exp, {"lambda": lam, "traces": sidecar}))
        _atomic_write(out / "region.json", _region_json(exp, region, margin, 0))
    return 0


def _certify(exp: Experiment, args, robust: bool) -> int:
    out = _out_dir(exp, args)
    model = exp.build_model()
    factory, base_margin, max_halvings = exp.region_factory()
    ana = exp.analysis()
    lam = ana.get("lambda", 0.0)
    cert, margin, halvings = solve_with_margin_fallback(
        model,
        factory,
        base_margin,
        lam,
        epsilon=ana.get("epsilon"),
        robust=robust,
        max_halvings=max_halvings,
        sample_density=int(ana.get("sample_density", 10)),
    )
    p_target = ana.get("p_target")
    if p_target is not None and cert.p_degree != int(p_target):
        raise CertificateInvalidError(
            f"certificate degree {cert.p_degree} differs from analysis.p_target {p_target}"
        )
    payload = cert.to_jsonable()
    payload["margin_used"] = margin
    payload["halvings"] = halvings
    payload["robust"] = robust
    _atomic_write(out / "certificate.json", _json_text(exp, {"certificate": payload}))
    _atomic_write(out / "region.json", _region_json(exp, cert.region, margin, halvings))
    return 0


def cmd_certify(exp: Experiment, args) -> int:
    return _certify(exp, args, robust=False)


def cmd_robust_certify(exp: Experiment, args) -> int:
    return _certify(exp, args, robust=True)


def cmd_verify(exp: Experiment, args) -> int:
    out = _out_dir(exp, args)
    model = exp.build_model()
    cert = load_certificate(args.certificate)
    report = verify_certificate(
        model,
        cert.region,
        cert.P,
        cert.lam,
        cert.p_degree,
        sample_density=int(exp.analysis().get("sample_density", 10)),
    )
    _atomic_write(
        out / "verification.json",
        _json_text(exp, {"verification": report.to_jsonable(), "certificate_path": str(args.certificate)}),
    )
    return 0 if report.passed else EXIT_CERTIFICATION


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aifdom",
        description="Dominance certification workflow for sequestration feedback circuits",
    )
    parser.add_argument("--version", action="version", version=f"aifdom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "simulate": cmd_simulate,
        "spectrum": cmd_spectrum,
        "nyquist": cmd_nyquist,
        "rootlocus": cmd_rootlocus,
        "certify": cmd_certify,
        "robust-certify": cmd_robust_certify,
        "verify": cmd_verify,
    }
    for name, fn in specs.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment YAML file")
        p.add_argument("--out", default=None, help="output directory (default: output.directory)")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in outputs")
        p.add_argument(
            "--format",
            dest="formats",
            choices=("csv", "json"),
            action="append",
            default=None,
            help="restrict output formats (default: both)",
        )
        if name == "verify":
            p.add_argument("--certificate", required=True, help="certificate JSON to verify")
        p.set_defaults(fn=fn)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.formats is None:
        args.formats = ["csv", "json"]
    try:
        exp = load_experiment(args.config, seed=args.seed)
        return args.fn(exp, args)
    except (ConfigError, RegionError, KeyError, ValueError) as exc:
        if isinstance(exc, NUMERICAL_ERRORS):
            print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
            return EXIT_NUMERICAL
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except CERTIFICATION_ERRORS as exc:
        print(json.dumps({"error": "certification", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CERTIFICATION
    except NUMERICAL_ERRORS as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
