"""Command-line front end: experiment configs, sweeps and figure presets.

    qdemon simulate   --config cfg.json --out DIR
    qdemon tomography --config cfg.json --out DIR
    qdemon calibrate  --config cfg.json --out DIR
    qdemon presets [NAME] --out DIR

Exit codes: 0 ok, 2 config error, 3 physics error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import sequences as seqs
from .device import DeviceParams, stark_dephasing_response
from .errors import ParameterError, QDemonError
from .operators import shannon_binary_nats
from .protocol import DEMON_ALPHA, DemonSimulator
from .thermo import GainModel, calibrate_gain, rabi_amplitudes
from .tomography import ReconstructionConfig, TomographyGrid, build_effects, entropy_sensitivity_sweep, maxlike_reconstruct, simulate_tomography

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3
KINDS = ("sequential", "continuous")
OUTPUTS = ("power", "summary", "grid", "reconstruction", "entropy", "calibration")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- configuration

def expand_sweep(sweep) -> list[float]:
    """Explicit list, scalar, or ``{"start", "stop", "count"}`` triple."""
    if sweep is None:
        return []
    if isinstance(sweep, (int, float)) and not isinstance(sweep, bool):
        return [float(sweep)]
    if isinstance(sweep, list):
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in sweep):
            raise ConfigError("sweep lists must contain numbers only")
        vals = [float(x) for x in sweep]
    elif isinstance(sweep, dict):
        if set(sweep) != {"start", "stop", "count"}:
            raise ConfigError("a sweep triple needs exactly the keys start, stop, count")
        count = sweep["count"]
        if not isinstance(count, int) or count < 0:
            raise ConfigError("sweep count must be a non-negative integer")
        vals = np.linspace(float(sweep["start"]), float(sweep["stop"]), count).tolist()
    else:
        raise ConfigError(f"cannot read sweep {sweep!r}")
    if not all(np.isfinite(vals)):
        raise ConfigError("sweep values must be finite")
    return vals


@dataclass
class ExperimentConfig:
    device: DeviceParams = field(default_factory=DeviceParams)
    sequence_kind: str = "sequential"
    prep: list = field(default_factory=lambda: ["superposition"])
    alpha_in: object = 0.0
    outputs: list = field(default_factory=lambda: ["power", "summary"])
    seed: int = 0
    fast_mode: bool = False
    n_trunc: int | None = None
    tol: float = 1e-8
    fixed_step: float | None = None
    tomography: dict = field(default_factory=dict)
    preset: str | None = None

    def __post_init__(self):
        if self.sequence_kind not in KINDS:
            raise ConfigError(f"sequence_kind must be one of {KINDS}")
        if not isinstance(self.prep, list):
            self.prep = [self.prep]
        for p in self.prep:
            if not isinstance(p, (str, int, float)) or isinstance(p, bool):
                raise ConfigError(f"bad prep {p!r}: use a tag or a temperature in K")
        bad = set(self.outputs) - set(OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}")
        self.alphas()  # validates the sweep
        if self.fixed_step is not None and not self.fixed_step > 0:
            raise ConfigError("fixed_step must be positive")

    def alphas(self) -> list[float]:
        vals = expand_sweep(self.alpha_in)
        if any(v < 0 for v in vals):
            raise ConfigError("alpha_in must be >= 0")
        return vals

    @property
    def cutoff(self) -> int:
        if self.n_trunc is not None:
            return int(self.n_trunc)
        return 20 if self.fast_mode else 30

    def to_dict(self) -> dict:
        d = asdict(self)
        d["device"] = self.device.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            dev = d.pop("device", {})
            d["device"] = dev if isinstance(dev, DeviceParams) else DeviceParams.from_dict(dev)
            return cls(**d)
        except (ParameterError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)


# ---------------------------------------------------------------- output helpers

def header(cfg: ExperimentConfig) -> dict:
    return {"code_version": __version__, "config": cfg.to_dict()}


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_csv(path: str, cfg: ExperimentConfig, columns: list[str], rows) -> None:
    with open(path, "w") as fh:
        for line in json.dumps(header(cfg), sort_keys=True, indent=1, default=_json_default).splitlines():
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path: str, cfg: ExperimentConfig, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump({"header": header(cfg), **payload}, fh, indent=1, sort_keys=True, default=_json_default)
        fh.write("\n")


def _tag(prep) -> str:
    return str(prep).replace("=", "").replace(".", "p")


# ---------------------------------------------------------------- sweeps

def _run_group(task):
    """One worker: every prep at one alpha, sharing a simulator (branch cache)."""
    device, kind, preps, alpha, n_trunc, tol, fixed_step = task
    sim = DemonSimulator(DeviceParams.from_dict(device), n_trunc, tol=tol, fixed_step=fixed_step)
    out = []
    for prep in preps:
        run = sim.run(kind, prep, alpha)
        rec = run.record
        out.append({
            "summary": run.summary(),
            "series": np.column_stack([rec.t_grid, rec.power_over_hfs, rec.work_power, rec.heat_power]),
        })
    return out


def run_sweep(cfg: ExperimentConfig, kind: str, preps, alphas, jobs: int = 1) -> list[list[dict]]:
    """Results indexed ``[alpha][prep]``; workers share nothing, merge is by sweep index."""
    tasks = [(cfg.device.to_dict(), kind, list(preps), a, cfg.cutoff, cfg.tol, cfg.fixed_step) for a in alphas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_group, tasks))
    return [_run_group(t) for t in tasks]


# ---------------------------------------------------------------- commands

def cmd_simulate(cfg: ExperimentConfig, out: str, jobs: int = 1) -> dict:
    alphas = cfg.alphas()
    if not alphas:
        warnings.warn("empty alpha_in sweep: nothing to simulate")
        return {"runs": []}
    results = run_sweep(cfg, cfg.sequence_kind, cfg.prep, alphas, jobs)
    runs = []
    for a, group in zip(alphas, results):
        for prep, res in zip(cfg.prep, group):
            runs.append(res["summary"])
            if "power" in cfg.outputs:
                name = f"power_{cfg.sequence_kind}_{_tag(prep)}_a{a:.4f}.csv"
                write_csv(os.path.join(out, name), cfg, ["t_s", "p_total", "p_work", "p_heat"], res["series"])
    payload = {"runs": runs}
    if "summary" in cfg.outputs:
        write_json(os.path.join(out, "summary.json"), cfg, payload)
    return payload


def tomography_settings(cfg: ExperimentConfig) -> tuple[TomographyGrid, ReconstructionConfig, float, dict]:
    t = dict(cfg.tomography)
    if cfg.fast_mode:
        grid = TomographyGrid.desk()
        recon = ReconstructionConfig().replace(n_trunc_recon=10)
    else:
        grid = TomographyGrid.square(t.pop("n_side", 21), t.pop("extent", 5.95), t.pop("n_max", 5))
        recon = ReconstructionConfig()
    for k in ("n_side", "extent", "n_max"):
        t.pop(k, None)
    noise = float(t.pop("record_noise", 0.0))
    sweep = t.pop("sensitivity", {})
    try:
        recon = recon.replace(**t)
    except TypeError as exc:
        raise ConfigError(f"bad tomography settings: {exc}") from None
    return grid, recon, noise, sweep


def cmd_tomography(cfg: ExperimentConfig, out: str, jobs: int = 1) -> dict:
    alphas = cfg.alphas()
    if not alphas:
        warnings.warn("empty alpha_in sweep: nothing to reconstruct")
        return {"scenarios": []}
    grid, recon, noise, sweep = tomography_settings(cfg)
    rng = np.random.default_rng(cfg.seed)
    sim = DemonSimulator(cfg.device, cfg.cutoff, tol=cfg.tol, fixed_step=cfg.fixed_step)
    effects = build_effects(grid, cfg.device, recon, n_rows=cfg.cutoff + 1)
    report = []
    for a in alphas:
        for prep in cfg.prep:
            run = sim.run("sequential", prep, a)
            # the qubit population after the cycle enters the likelihood, as measured independently
            p_g = float(np.real(run.qubit(3)[0, 0]))
            rc = recon.replace(p_g=p_g) if "p_g" not in cfg.tomography else recon
            g = simulate_tomography(run.states.rho_3, effects)
            if noise > 0:
                g = g.with_records(np.clip(g.p_e + noise * rng.standard_normal(g.p_e.shape), 0.0, 1.0))
            rec = maxlike_reconstruct(g, effects, rc)
            entry = {
                "prep": str(prep), "alpha_in": a, "p_g": rc.p_g,
                "S_D_true": run.S_D(3), "S_D_reconstructed": rec.entropy,
                "converged": rec.converged, "residual_rms": rec.residual_rms,
                "delta_S_S": run.S_S(3) - run.S_S(1),
            }
            if sweep:
                entry["sensitivity"] = entropy_sensitivity_sweep(g, effects, rc, sweep)
            report.append(entry)
            stem = f"{_tag(prep)}_a{a:.4f}"
            if "grid" in cfg.outputs:
                write_json(os.path.join(out, f"grid_{stem}.json"), cfg, {"records": g.to_records()})
            if "reconstruction" in cfg.outputs:
                write_json(os.path.join(out, f"reconstruction_{stem}.json"), cfg, rec.to_dict())
    payload = {"scenarios": report}
    if "entropy" in cfg.outputs:
        write_json(os.path.join(out, "entropy_report.json"), cfg, payload)
    return payload


def cmd_calibrate(cfg: ExperimentConfig, out: str, jobs: int = 1) -> dict:
    p = cfg.device
    amp = seqs.calibrate_pi_amplitude(p, "gaussian")
    ideal = seqs.calibrate_pi_amplitude(p.without_decoherence(), "gaussian")
    area = seqs.ideal_calibration().gaussian_pi_amplitude
    alphas = cfg.alphas()
    table = []
    for a in alphas:
        nbar = seqs.alpha_to_nbar(a, p, cfg.cutoff, "continuous" if cfg.sequence_kind == "continuous" else "sequential")
        table.append({"alpha_in": a, "sqrt_nbar": float(np.sqrt(max(nbar, 0.0))), "nbar": nbar})
    # gain model round trip on synthetic Rabi amplitudes
    g = dict(cfg.tomography.get("gain", {"g0": 2.5, "omega_inf": 2 * np.pi * 40e6}))
    truth = GainModel.from_dict(g)
    omegas = np.linspace(0.05, 0.5, 8) * min(truth.omega_inf, 2 * np.pi * 40e6)
    sz0, gb = -1.0, p.gamma_b
    a_i, a_p = rabi_amplitudes(omegas, truth, sz0, gb)
    noise = float(cfg.tomography.get("gain_noise", 0.0))
    if noise > 0:
        rng = np.random.default_rng(cfg.seed)
        a_i = a_i * (1 + noise * rng.standard_normal(a_i.shape))
    fit = calibrate_gain(np.column_stack([omegas, a_i, a_p]), sz0, gb)
    payload = {
        "pi_amplitude": amp,
        "pi_amplitude_decoherence_free": ideal,
        "pi_amplitude_area_theorem": area,
        "alpha_table": table,
        "gain_model_true": truth.to_dict(),
        "gain_model_fit": fit.model.to_dict(),
        "gain_fit_residual_rms": fit.residual_rms,
    }
    write_json(os.path.join(out, "calibration.json"), cfg, payload)
    return payload


# ---------------------------------------------------------------- presets

def _continuous_demon_alpha(cfg, nbar=9.0):
    return seqs.nbar_to_alpha(nbar, cfg.device, cfg.cutoff, "continuous")


def preset_fig2(cfg, out, jobs):
    """Continuous sequence, nbar in {0, 9}: power traces for the four preparations."""
    preps = ["T=0.17", "T=0.40", "T=inf", "superposition"]
    alphas = [0.0, _continuous_demon_alpha(cfg)]
    results = run_sweep(cfg, "continuous", preps, alphas, jobs)
    rows = []
    for a, group in zip(alphas, results):
        for prep, res in zip(preps, group):
            s = res["summary"]
            rows.append([prep, a, s["nbar2"], s["work_hfs"], s["net_heat_hfs"], s["delta_U_hfs"], s["balance_residual"]])
            write_csv(os.path.join(out, f"fig2_power_{_tag(prep)}_a{a:.4f}.csv"), cfg,
                      ["t_s", "p_total", "p_work", "p_heat"], res["series"])
    write_csv(os.path.join(out, "fig2_work.csv"), cfg,
              ["prep", "alpha_in", "nbar", "work_hfs", "heat_hfs", "delta_U_hfs", "balance_residual"], rows)
    return {"rows": rows}


def preset_fig3(cfg, out, jobs):
    """Work vs sqrt(nbar) (continuous) and final U_S vs alpha (sequential)."""
    alphas = cfg.alphas() or np.linspace(0.0, 2 * DEMON_ALPHA, 3 if cfg.fast_mode else 9).tolist()
    cont = ["excited", "superposition", "equilibrium"]
    res_c = run_sweep(cfg, "continuous", cont, alphas, jobs)
    rows_w = [[p, a, float(np.sqrt(max(r["summary"]["nbar2"], 0.0))), r["summary"]["work_hfs"]]
              for a, g in zip(alphas, res_c) for p, r in zip(cont, g)]
    write_csv(os.path.join(out, "fig3_work_vs_sqrt_nbar.csv"), cfg, ["prep", "alpha_in", "sqrt_nbar", "work_hfs"], rows_w)
    seq = ["ground", "excited", "superposition", "T=inf"]
    res_s = run_sweep(cfg, "sequential", seq, alphas, jobs)
    rows_u = [[p, a, r["summary"]["p_e"][3]] for a, g in zip(alphas, res_s) for p, r in zip(seq, g)]
    write_csv(os.path.join(out, "fig3_energy_vs_alpha.csv"), cfg, ["prep", "alpha_in", "U_S_hfs"], rows_u)
    return {"work": rows_w, "energy": rows_u}


def preset_fig4(cfg, out, jobs):
    """Demon tomography for the four preparations at the working displacement."""
    t = dict(cfg.tomography)
    t.setdefault("sensitivity", {"n_trunc_recon": [13, 15, 17], "p_g": [0.95, 0.97, 0.99]} if not cfg.fast_mode else {})
    c = ExperimentConfig.from_dict({**cfg.to_dict(), "sequence_kind": "sequential", "alpha_in": DEMON_ALPHA,
                                    "prep": ["equilibrium", "superposition", "excited", "T=inf"], "tomography": t,
                                    "outputs": ["grid", "reconstruction", "entropy"]})
    return cmd_tomography(c, out, jobs)


def preset_figS1(cfg, out, jobs):
    """System entropy after the cycle vs alpha, cold and infinite-temperature starts."""
    alphas = cfg.alphas() or np.linspace(0.0, 2 * DEMON_ALPHA, 5 if cfg.fast_mode else 17).tolist()
    preps = ["ground", "T=inf"]
    res = run_sweep(cfg, "sequential", preps, alphas, jobs)
    rows = []
    for a, g in zip(alphas, res):
        nf = cfg.cutoff + 1
        p0 = float(np.real(np.diagonal(seqs.encoded_state(a, cfg.device, cfg.cutoff))).reshape(2, nf).sum(axis=0)[0])
        rows.append([a, g[0]["summary"]["S_S"][3], g[1]["summary"]["S_S"][3], p0, shannon_binary_nats(p0)])
    write_csv(os.path.join(out, "figS1_entropy.csv"), cfg, ["alpha_in", "S_S_cold", "S_S_hot", "p_vacuum", "binary_entropy_ref"], rows)
    return {"rows": rows}


def preset_figS3(cfg, out, jobs):
    """Steady-state ac-Stark shift and measurement-induced dephasing vs cavity detuning."""
    p = cfg.device
    deltas = np.linspace(-60e6, 30e6, 31 if cfg.fast_mode else 181)
    eps = 0.5 * p.kappa_rate / 2  # keeps |alpha| near 0.5 at resonance
    t = np.array([0.0, 40.0 / p.kappa_rate])
    rows = []
    for d in deltas:
        ag, ae, f_st, g_d = stark_dephasing_response(p, d, eps, t)
        rows.append([d, abs(ag[-1]) ** 2, abs(ae[-1]) ** 2, f_st[-1], g_d[-1]])
    write_csv(os.path.join(out, "figS3_stark.csv"), cfg, ["delta_Hz", "n_g", "n_e", "f_stark_Hz", "gamma_d"], rows)
    return {"rows": rows}


def preset_figS4(cfg, out, jobs):
    """Vacuum population of the encoded cavity vs alpha (nonlinear Rabi-like oscillation)."""
    alphas = cfg.alphas() or np.linspace(0.0, 2 * DEMON_ALPHA, 11 if cfg.fast_mode else 41).tolist()
    n = cfg.cutoff
    rows = []
    for a in alphas:
        rho = seqs.encoded_state(a, cfg.device, n)
        nf = n + 1
        pops = np.real(np.diagonal(rho)).reshape(2, nf).sum(axis=0)
        rows.append([a, pops[0], float(np.arange(nf) @ pops)])
    write_csv(os.path.join(out, "figS4_vacuum.csv"), cfg, ["alpha_in", "p_vacuum", "nbar"], rows)
    return {"rows": rows}


PRESETS = {
    "fig2": preset_fig2,
    "fig3": preset_fig3,
    "fig4": preset_fig4,
    "figS1": preset_figS1,
    "figS3": preset_figS3,
    "figS4": preset_figS4,
}


def run_preset(name: str, cfg: ExperimentConfig | None = None, out: str = ".", jobs: int = 1) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfg = cfg or ExperimentConfig()
    cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "preset": name})
    os.makedirs(out, exist_ok=True)
    return PRESETS[name](cfg, out, jobs)


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdemon", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"qdemon {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "tomography", "calibrate", "presets"):
        sp = sub.add_parser(name)
        if name == "presets":
            sp.add_argument("name", nargs="?", help="preset to run; omit to list them")
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--out", metavar="DIR", default=".")
        sp.add_argument("--fast", action="store_true", help="desk-scale grids and truncations")
        sp.add_argument("--jobs", type=int, default=1, metavar="N")
        sp.add_argument("--seed", type=int, default=None, metavar="K")
        sp.add_argument("--fixed-step", type=float, default=None, metavar="DT")
    return ap


def load_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        data = ExperimentConfig.from_json(text).to_dict()
    if args.fast:
        data["fast_mode"] = True
    if args.seed is not None:
        data["seed"] = args.seed
    if args.fixed_step is not None:
        data["fixed_step"] = args.fixed_step
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.command == "presets" and not args.name:
            for name, fn in PRESETS.items():
                print(f"{name:6s} {fn.__doc__.strip().splitlines()[0]}")
            return EXIT_OK
        cfg = load_config(args)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "presets":
            run_preset(args.name, cfg, args.out, args.jobs)
        else:
            {"simulate": cmd_simulate, "tomography": cmd_tomography, "calibrate": cmd_calibrate}[args.command](cfg, args.out, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QDemonError, FloatingPointError) as exc:
        print(f"physics error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
