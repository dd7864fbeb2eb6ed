"""Batch experiment runner.

``mflab run config.json`` executes one named experiment from a strict JSON
config; each experiment also has a direct subcommand whose flags mirror
the config fields.  Outputs are CSV/JSON artifacts plus a manifest, and a
given config+seed pair always reproduces byte-identical CSVs.

Angles in configs may be raw radians (numbers) or strings like "pi/16",
"3pi/8", "-pi/4".  Exit codes: 0 ok, 1 config error, 2 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__, braid, discriminator, ffsim, spectro, svsim
from .errors import CapacityError, ConfigError
from .model import ChainSpec, MajoranaLabel, build_trivial_testbed, majorana_probe

EXPERIMENTS = ("spectrum_sweep", "mode_tomography", "density_map", "discriminate",
               "braid", "braid_optimize", "phase_diagram", "oracle_check")

_ANGLE_RE = re.compile(r"^\s*(-?)(\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_angle(value) -> float:
    """Radians from a number or a pi-rational string such as '3pi/8'."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE_RE.match(value)
        if m:
            sign = -1.0 if m.group(1) else 1.0
            num = float(m.group(2)) if m.group(2) else 1.0
            den = float(m.group(3)) if m.group(3) else 1.0
            return sign * num * np.pi / den
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"cannot parse angle {value!r}")


def _angle_field(value, path: str):
    if isinstance(value, list):
        return tuple(parse_angle(v) for v in value)
    try:
        return parse_angle(value)
    except ConfigError:
        raise ConfigError(f"{path}: cannot parse angle {value!r}") from None


@dataclass
class ExperimentConfig:
    experiment: str
    spec: ChainSpec
    depth: int = 11
    engine: str = "auto"
    shots: int | None = None
    seed: int = 0
    noise_gamma: float | None = None
    output_dir: str = "out"
    params: dict = field(default_factory=dict)

    def resolved_engine(self) -> str:
        if self.engine != "auto":
            return self.engine
        return "ffsim" if self.spec.is_free else "svsim"


_TOP_KEYS = {"experiment", "spec", "depth", "engine", "shots", "seed",
             "noise_gamma", "output_dir", "params"}

_PARAM_KEYS = {
    "spectrum_sweep": {"phi_start", "phi_stop", "phi_steps", "omega_points"},
    "mode_tomography": {"omega"},
    "density_map": {"omega_points"},
    "discriminate": {"a", "realizations", "threshold", "trivial_testbed"},
    "braid": {"alpha", "repetitions"},
    "braid_optimize": {"alpha_start", "alpha_stop", "alpha_points"},
    "phase_diagram": {"theta_start", "theta_stop", "theta_steps",
                      "phi_start", "phi_stop", "phi_steps", "n_probe"},
    "oracle_check": {"n_specs", "max_sites", "series_depth"},
}


def load_config(data: dict) -> ExperimentConfig:
    """Validate a raw config dict; unknown keys are rejected with their path."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    for key in ("experiment", "spec"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    experiment = data["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown experiment {experiment!r}; "
                          f"choose from {list(EXPERIMENTS)}")
    raw_spec = data["spec"]
    if not isinstance(raw_spec, dict):
        raise ConfigError("spec: must be an object")
    extra = set(raw_spec) - {"n", "z_angle", "xx_angle", "zz_angle"}
    if extra:
        raise ConfigError(f"spec: unknown keys {sorted(extra)}")
    if "n" not in raw_spec:
        raise ConfigError("spec.n: required")
    try:
        spec = ChainSpec(
            n_sites=int(raw_spec["n"]),
            z_angle=_angle_field(raw_spec.get("z_angle", 0.0), "spec.z_angle"),
            xx_angle=_angle_field(raw_spec.get("xx_angle", 0.0), "spec.xx_angle"),
            zz_angle=_angle_field(raw_spec.get("zz_angle", 0.0), "spec.zz_angle"),
        )
    except ValueError as exc:
        raise ConfigError(f"spec: {exc}") from None
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: must be an object")
    extra = set(params) - _PARAM_KEYS[experiment]
    if extra:
        raise ConfigError(f"params: unknown keys for {experiment}: {sorted(extra)}")
    depth = int(data.get("depth", 11))
    if depth < 0:
        raise ConfigError("depth: must be >= 1 (0 selects the exact-depth braid channel)")
    engine = data.get("engine", "auto")
    if engine not in ("auto", "ffsim", "svsim"):
        raise ConfigError(f"engine: unknown engine {engine!r}")
    shots = data.get("shots")
    if shots is not None:
        shots = int(shots)
        if shots < 1:
            raise ConfigError("shots: must be >= 1")
    noise_gamma = data.get("noise_gamma")
    if noise_gamma is not None:
        noise_gamma = float(noise_gamma)
        if noise_gamma < 0:
            raise ConfigError("noise_gamma: must be >= 0")
    cfg = ExperimentConfig(
        experiment=experiment, spec=spec, depth=depth, engine=engine,
        shots=shots, seed=int(data.get("seed", 0)), noise_gamma=noise_gamma,
        output_dir=str(data.get("output_dir", "out")), params=params,
    )
    if cfg.shots is not None and cfg.resolved_engine() != "svsim":
        raise ConfigError("shots: shot sampling requires the svsim engine")
    if cfg.resolved_engine() == "ffsim" and not cfg.spec.is_free:
        raise ConfigError("engine: ffsim cannot run interacting specs")
    if cfg.depth == 0 and not (experiment == "braid" and cfg.resolved_engine() == "ffsim"):
        raise ConfigError("depth: 0 (exact) is only valid for the braid experiment on ffsim")
    if cfg.resolved_engine() == "svsim" and spec.n_sites > svsim.MAX_STATEVECTOR_SITES:
        raise CapacityError(
            f"svsim is capped at {svsim.MAX_STATEVECTOR_SITES} sites, got {spec.n_sites}")
    return cfg


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("MFLAB_WORKERS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = _workers()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# experiment bodies

def _majorana_fourier(cfg: ExperimentConfig, omegas: np.ndarray):
    """FourierSeries for both encodings with the configured engine/noise."""
    spec, depth = cfg.spec, cfg.depth
    engine = cfg.resolved_engine()
    noise = None if cfg.noise_gamma is None else svsim.NoiseModel(cfg.noise_gamma)
    out = {}
    for rep in ("L", "R"):
        if engine == "ffsim":
            u = ffsim.build_single_particle_unitary(spec)
            series = ffsim.heisenberg_series(
                u, ffsim.initial_majorana_expectations(rep, spec.n_sites), depth)
            if noise is not None:
                series = series * np.exp(-noise.gamma * np.arange(depth))[:, None]
        else:
            psi0 = svsim.prepare_state("plus_product", spec.n_sites)
            if cfg.shots is None:
                series = svsim.majorana_series(spec, psi0, rep, depth, noise)
            else:
                series = _sampled_series(cfg, rep)
                if noise is not None:
                    series = series * np.exp(-noise.gamma * np.arange(depth))[:, None]
        if cfg.noise_gamma is not None:
            series = spectro.compensate_decay(series, cfg.noise_gamma)
        out[rep] = spectro.FourierSeries.from_series(rep, series, omegas, source=engine)
    return out["L"], out["R"]


def _sampled_series(cfg: ExperimentConfig, rep: str) -> np.ndarray:
    spec, depth = cfg.spec, cfg.depth
    n = spec.n_sites
    probes = [majorana_probe(MajoranaLabel(mu, rep), n) for mu in range(1, 2 * n + 1)]
    seeds = iter(np.random.SeedSequence([cfg.seed, 0 if rep == "L" else 1]).spawn(depth * 2 * n))
    series = np.empty((depth, 2 * n))
    psi = svsim.prepare_state("plus_product", n)
    for cycle in range(depth):
        if cycle > 0:
            psi = svsim.apply_floquet_cycle(psi, spec)
        for j, probe in enumerate(probes):
            series[cycle, j] = svsim.sample_shots(psi, probe, cfg.shots, next(seeds))
    return series


def run_spectrum_sweep(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    phi_start = parse_angle(p.get("phi_start", 0.0))
    phi_stop = parse_angle(p.get("phi_stop", "pi/2"))
    steps = int(p.get("phi_steps", 64))
    omegas = spectro.default_omega_grid(int(p.get("omega_points", spectro.OMEGA_GRID_POINTS)))
    phis = np.linspace(phi_start, phi_stop, steps)

    def one(phi: float):
        spec = ChainSpec(cfg.spec.n_sites, z_angle=float(phi), xx_angle=cfg.spec.xx_angle)
        u = ffsim.build_single_particle_unitary(spec)
        series = ffsim.heisenberg_series(
            u, ffsim.initial_majorana_expectations("L", spec.n_sites), cfg.depth)
        f = spectro.FourierSeries.from_series("L", series, omegas, source="ffsim")
        return np.abs(f.values[0])

    rows = []
    for phi, absf in zip(phis, _parallel_map(one, list(phis))):
        for omega, value in zip(omegas, absf):
            rows.append((phi, omega, value))
    _write_csv(outdir / "spectra.csv", ("phi", "omega", "absF"), rows)
    return ["spectra.csv"]


def run_mode_tomography(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    omega = 0.0 if str(cfg.params.get("omega", "0")) in ("0", "0.0") else np.pi
    omegas = np.array([0.0, np.pi])
    f_left, f_right = _majorana_fourier(cfg, omegas)
    mode_l = spectro.reconstruct_wavefunction(f_left, omega)
    mode_r = spectro.reconstruct_wavefunction(f_right, omega)
    free_spec = ChainSpec(cfg.spec.n_sites, z_angle=cfg.spec.z_angle, xx_angle=cfg.spec.xx_angle)
    modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(free_spec))
    try:
        theory_l, theory_r = modes.majorana_pair(omega)
        th_l, th_r = theory_l.psi, theory_r.psi
    except LookupError:
        th_l = th_r = np.full(2 * cfg.spec.n_sites, np.nan)
    rows = [
        (mu + 1, mode_l.psi[mu], mode_r.psi[mu], th_l[mu], th_r[mu])
        for mu in range(2 * cfg.spec.n_sites)
    ]
    _write_csv(outdir / "wavefunctions.csv",
               ("mu", "psi_L", "psi_R", "psi_theory_L", "psi_theory_R"), rows)
    return ["wavefunctions.csv"]


def run_density_map(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    omegas = spectro.default_omega_grid(
        int(cfg.params.get("omega_points", spectro.OMEGA_GRID_POINTS)))
    f_left, f_right = _majorana_fourier(cfg, omegas)
    dmap = spectro.mode_density_map(f_left, f_right)
    rows = []
    for i, x in enumerate(dmap.x):
        for j, omega in enumerate(dmap.omegas):
            rows.append((int(x), omega, dmap.g[i, j]))
    _write_csv(outdir / "density.csv", ("x", "omega", "g"), rows)
    return ["density.csv"]


def run_discriminate(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    a = parse_angle(p.get("a", "pi/8"))
    realizations = int(p.get("realizations", 10))
    threshold = float(p.get("threshold", discriminator.PEAK_THRESHOLD))
    spec = cfg.spec
    if p.get("trivial_testbed"):
        tb = p["trivial_testbed"]
        if tb is True:
            tb = {}
        extra = set(tb) - {"bulk_xx", "bulk_z"}
        if extra:
            raise ConfigError(f"params.trivial_testbed: unknown keys {sorted(extra)}")
        spec = build_trivial_testbed(cfg.spec.n_sites,
                                     parse_angle(tb.get("bulk_xx", "pi/16")),
                                     parse_angle(tb.get("bulk_z", "pi/4")))
    profile = discriminator.scan_T_profile(
        spec, a=a, n_realizations=realizations, depth=cfg.depth,
        seed=cfg.seed, engine=cfg.resolved_engine())
    verdict = discriminator.classify_modes(profile, threshold)
    rows = [(int(x), m, s, profile.n_realizations, profile.engine)
            for x, m, s in zip(profile.x, profile.mean, profile.std)]
    _write_csv(outdir / "discriminator.csv",
               ("x", "mean_absT", "std_absT", "n_realizations", "engine"), rows)
    _write_json(outdir / "verdict.json", {
        "verdict": verdict,
        "threshold": threshold,
        "evidence": {
            "left_peak": float(profile.mean[:2].max()),
            "right_peak": float(profile.mean[-2:].max()),
            "mid_mean": float(profile.mean[len(profile.mean) // 3: 2 * len(profile.mean) // 3].mean()),
            "a": a, "depth": cfg.depth, "realizations": realizations,
        },
    })
    return ["discriminator.csv", "verdict.json"]


def run_braid(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    alpha_raw = p.get("alpha", "auto")
    alpha = None if alpha_raw == "auto" else parse_angle(alpha_raw)
    repetitions = int(p.get("repetitions", 1))
    engine = cfg.resolved_engine()
    depth = braid.EXACT if (cfg.depth == 0 and engine == "ffsim") else cfg.depth
    seeds = np.random.SeedSequence(cfg.seed).spawn(repetitions)
    runs = [braid.fas_braided_wavefunction(
        cfg.spec, alpha=alpha, depth=depth, engine=engine,
        shots=cfg.shots, seed=seeds[r]) for r in range(repetitions)]
    stacks = {name: np.stack([getattr(r, name) for r in runs]) for name in
              ("psi_left", "psi_right", "psi_tilde_left", "psi_tilde_right")}
    mean = {k: v.mean(axis=0) for k, v in stacks.items()}
    std = {k: (v.std(axis=0, ddof=1) if repetitions > 1 else np.zeros(v.shape[1]))
           for k, v in stacks.items()}
    theory = {}
    if cfg.spec.is_free:
        modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(cfg.spec))
        left, right = modes.majorana_pair(0.0)
        theory = {"psi_left": left.psi, "psi_right": right.psi,
                  "psi_tilde_left": right.psi, "psi_tilde_right": -left.psi}
    else:
        nanv = np.full(2 * cfg.spec.n_sites, np.nan)
        theory = {k: nanv for k in stacks}
    rows = []
    for mu in range(2 * cfg.spec.n_sites):
        rows.append((
            mu + 1,
            mean["psi_left"][mu], mean["psi_right"][mu],
            mean["psi_tilde_left"][mu], mean["psi_tilde_right"][mu],
            std["psi_left"][mu], std["psi_right"][mu],
            std["psi_tilde_left"][mu], std["psi_tilde_right"][mu],
            theory["psi_left"][mu], theory["psi_right"][mu],
            theory["psi_tilde_left"][mu], theory["psi_tilde_right"][mu],
        ))
    _write_csv(outdir / "braid.csv",
               ("mu", "psi_L", "psi_R", "psi_tilde_L", "psi_tilde_R",
                "psi_L_std", "psi_R_std", "psi_tilde_L_std", "psi_tilde_R_std",
                "theory_L", "theory_R", "theory_tilde_L", "theory_tilde_R"), rows)
    _write_json(outdir / "braid_result.json", {
        "alpha": runs[0].alpha, "alpha0": runs[0].alpha0, "xi": runs[0].xi,
        "p": runs[0].p, "sign": runs[0].sign,
        "residual_left": float(np.mean([r.residual_left for r in runs])),
        "residual_right": float(np.mean([r.residual_right for r in runs])),
        "engine": engine, "repetitions": repetitions,
    })
    return ["braid.csv", "braid_result.json"]


def run_braid_optimize(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    start = parse_angle(p.get("alpha_start", 0.15 * np.pi))
    stop = parse_angle(p.get("alpha_stop", 0.40 * np.pi))
    points = int(p.get("alpha_points", 9))
    grid = np.linspace(start, stop, points)
    alpha_star, report = braid.optimize_alpha(
        cfg.spec, alpha_grid=grid, depth=cfg.depth, engine=cfg.resolved_engine(),
        shots=cfg.shots, seed=cfg.seed)
    rows = [(a, c, s, f) for a, c, s, f in
            zip(report.alphas, report.costs, report.cost_std, report.fitted_costs)]
    _write_csv(outdir / "alpha_trace.csv", ("alpha", "cost", "cost_std", "fit"), rows)
    _write_json(outdir / "alpha_result.json", {
        "alpha_star": alpha_star,
        "curvature_ok": report.curvature_ok,
        "message": report.message,
        "fit_coefficients": [float(c) for c in report.fit_coeffs],
    })
    return ["alpha_trace.csv", "alpha_result.json"]


def run_phase_diagram(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    thetas = np.linspace(parse_angle(p.get("theta_start", 0.05)),
                         parse_angle(p.get("theta_stop", "pi/2")),
                         int(p.get("theta_steps", 11)))
    phis = np.linspace(parse_angle(p.get("phi_start", 0.05)),
                       parse_angle(p.get("phi_stop", "pi/2")),
                       int(p.get("phi_steps", 11)))
    n_probe = int(p.get("n_probe", 100))

    def one(pair):
        theta, phi = pair
        label = spectro.classify_phase(
            ChainSpec(cfg.spec.n_sites, z_angle=float(phi), xx_angle=float(theta)),
            n_probe=n_probe)
        return theta, phi, label.label

    grid = [(t, ph) for t in thetas for ph in phis]
    rows = _parallel_map(one, grid)
    _write_csv(outdir / "phase_diagram.csv", ("theta", "phi", "label"), rows)
    return ["phase_diagram.csv"]


def run_oracle_check(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    p = cfg.params
    n_specs = int(p.get("n_specs", 10))
    max_sites = int(p.get("max_sites", 5))
    depth = int(p.get("series_depth", 8))
    rng = np.random.default_rng(cfg.seed)
    worst_single = worst_pair = 0.0
    for _ in range(n_specs):
        n = int(rng.integers(2, max_sites + 1))
        spec = ChainSpec(n, z_angle=tuple(rng.uniform(-1.5, 1.5, n)),
                         xx_angle=tuple(rng.uniform(-1.5, 1.5, n - 1)))
        u = ffsim.build_single_particle_unitary(spec)
        psi0 = svsim.prepare_state("plus_product", n)
        for rep in ("L", "R"):
            got = svsim.majorana_series(spec, psi0, rep, depth).real
            want = ffsim.heisenberg_series(
                u, ffsim.initial_majorana_expectations(rep, n), depth)
            worst_single = max(worst_single, float(np.abs(got - want).max()))
        a = rng.uniform(0, np.pi)
        bits = rng.integers(0, 2, n - 2)
        m0 = ffsim.initial_two_point_matrix(n, a, bits)
        pairs = [(mu, nu) for mu in range(1, 2 * n + 1) for nu in range(1, 2 * n + 1)]
        want_pairs = ffsim.two_point_series(u, m0, pairs, depth)
        state = svsim.prepare_state("correlator", n, a=a, bits=bits)
        from .model import majorana_pair_string
        obs = [majorana_pair_string(mu, nu, n) for mu, nu in pairs]
        got_pairs = svsim.observable_series(spec, state, obs, depth)
        worst_pair = max(worst_pair, float(np.abs(got_pairs - want_pairs).max()))
    ptm_spec = ChainSpec(2, z_angle=float(rng.uniform(0, 1)),
                         xx_angle=float(rng.uniform(0, 1)),
                         zz_angle=float(rng.uniform(0, 1)))
    _, report = svsim.pauli_transfer_matrix(ptm_spec)
    passed = worst_single <= 1e-10 and worst_pair <= 1e-10 and report.ok
    _write_json(outdir / "oracle_report.json", {
        "pass": bool(passed),
        "worst_single_gamma_gap": worst_single,
        "worst_pair_gap": worst_pair,
        "transfer_matrix_ok": report.ok,
        "n_specs": n_specs, "max_sites": max_sites, "series_depth": depth,
    })
    if not passed:
        raise RuntimeError("oracle check failed; see oracle_report.json")
    return ["oracle_report.json"]


_RUNNERS = {
    "spectrum_sweep": run_spectrum_sweep,
    "mode_tomography": run_mode_tomography,
    "density_map": run_density_map,
    "discriminate": run_discriminate,
    "braid": run_braid,
    "braid_optimize": run_braid_optimize,
    "phase_diagram": run_phase_diagram,
    "oracle_check": run_oracle_check,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; writes artifacts plus manifest.json."""
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    artifacts = _RUNNERS[cfg.experiment](cfg, outdir)
    manifest = {
        "experiment": cfg.experiment,
        "config": {
            "experiment": cfg.experiment,
            "spec": json.loads(cfg.spec.to_json()),
            "depth": cfg.depth, "engine": cfg.engine, "shots": cfg.shots,
            "seed": cfg.seed, "noise_gamma": cfg.noise_gamma,
            "params": cfg.params,
        },
        "artifacts": artifacts,
        "version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }
    _write_json(outdir / "manifest.json", manifest)
    return 0


def _spec_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="number of sites")
    parser.add_argument("--z-angle", default="0", help="Z angle (radians or 'pi/16')")
    parser.add_argument("--xx-angle", default="0", help="XX bond angle")
    parser.add_argument("--zz-angle", default="0", help="ZZ interaction angle")
    parser.add_argument("--depth", type=int, default=11)
    parser.add_argument("--engine", default="auto", choices=["auto", "ffsim", "svsim"])
    parser.add_argument("--shots", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise-gamma", type=float, default=None)
    parser.add_argument("--output-dir", default="out")


def _config_from_args(args, experiment: str, params: dict) -> ExperimentConfig:
    return load_config({
        "experiment": experiment,
        "spec": {"n": args.n, "z_angle": args.z_angle,
                 "xx_angle": args.xx_angle, "zz_angle": args.zz_angle},
        "depth": args.depth, "engine": args.engine, "shots": args.shots,
        "seed": args.seed, "noise_gamma": args.noise_gamma,
        "output_dir": args.output_dir,
        "params": {k: v for k, v in params.items() if v is not None},
    })


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mflab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", help="path to config.json")

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment from flags")
        _spec_args(p)
        if name == "spectrum_sweep":
            p.add_argument("--phi-start", default="0")
            p.add_argument("--phi-stop", default="pi/2")
            p.add_argument("--phi-steps", type=int, default=64)
        elif name == "mode_tomography":
            p.add_argument("--omega", default="0", choices=["0", "pi"])
        elif name == "discriminate":
            p.add_argument("--a", default="pi/8")
            p.add_argument("--realizations", type=int, default=10)
            p.add_argument("--threshold", type=float, default=discriminator.PEAK_THRESHOLD)
            p.add_argument("--trivial-testbed", action="store_true",
                           help="decouple the edge qubits; spec angles set the bulk")
        elif name == "braid":
            p.add_argument("--alpha", default="auto")
            p.add_argument("--repetitions", type=int, default=1)
        elif name == "braid_optimize":
            p.add_argument("--alpha-start", default=repr(0.15 * np.pi))
            p.add_argument("--alpha-stop", default=repr(0.40 * np.pi))
            p.add_argument("--alpha-points", type=int, default=9)
        elif name == "phase_diagram":
            p.add_argument("--theta-steps", type=int, default=11)
            p.add_argument("--phi-steps", type=int, default=11)
            p.add_argument("--n-probe", type=int, default=100)
        elif name == "oracle_check":
            p.add_argument("--n-specs", type=int, default=10)
            p.add_argument("--max-sites", type=int, default=5)
            p.add_argument("--series-depth", type=int, default=8)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
            cfg = load_config(data)
        else:
            name = args.command
            params: dict[str, Any] = {}
            if name == "spectrum_sweep":
                params = {"phi_start": args.phi_start, "phi_stop": args.phi_stop,
                          "phi_steps": args.phi_steps}
            elif name == "mode_tomography":
                params = {"omega": args.omega}
            elif name == "discriminate":
                params = {"a": args.a, "realizations": args.realizations,
                          "threshold": args.threshold}
                if args.trivial_testbed:
                    params["trivial_testbed"] = {"bulk_xx": args.xx_angle,
                                                 "bulk_z": args.z_angle}
            elif name == "braid":
                params = {"alpha": args.alpha, "repetitions": args.repetitions}
            elif name == "braid_optimize":
                params = {"alpha_start": args.alpha_start, "alpha_stop": args.alpha_stop,
                          "alpha_points": args.alpha_points}
            elif name == "phase_diagram":
                params = {"theta_steps": args.theta_steps, "phi_steps": args.phi_steps,
                          "n_probe": args.n_probe}
            elif name == "oracle_check":
                params = {"n_specs": args.n_specs, "max_sites": args.max_sites,
                          "series_depth": args.series_depth}
            cfg = _config_from_args(args, name, params)
        return run(cfg)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
