"""Configuration-driven experiments with deterministic reports.

Each experiment is a pure function of (config, artifact version): the
same TOML config always produces byte-identical CSV and JSON output.
Wall-clock time is reported on the terminal only and never written to
the output files, so reruns can be compared bytewise.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as VERSION
from .diagnostics import (SeriesRecord, _series_to_csv, cesaro_trace,
                          dissipative_partial_sums, ev_sequence,
                          lattes_density_sampler, mixing_correlation)
from .errors import ConfigError, UnknownExperiment
from .fields import Field, gamma
from .holspec import eigen_spectrum, spectrum_to_json, transfer_matrix
from .julia import postcritical_approx
from .lattes import (LattesParams, lattes_invariants, lattes_map,
                     lattes_residuals, normalized_lattes)
from .operators import (lp_pull, lp_push, normalized_pullback, ruelle_apply)
from .quadrature import (Annulus, Disk, WholePlane, duality_residual,
                         l1_norm)
from .ratmap import RationalMap
from .rng import RandomStream


def max_threads() -> int:
    """Worker cap from the LAB_THREADS environment variable."""
    try:
        return max(1, int(os.environ.get("LAB_THREADS", "1")))
    except ValueError:
        return 1


# -- config ---------------------------------------------------------------

_COMMON_KEYS = {"experiment", "seed", "budget", "out", "format"}
_EXPERIMENT_KEYS = {
    "duality": {"map", "region"},
    "lattes-residuals": {"map", "n_points"},
    "cesaro-trace": {"map", "v", "n_list", "region"},
    "hol-spectrum": {"map"},
    "ev-seq": {"map", "v", "n_max"},
    "mixing": {"map", "region", "region_b", "n_list"},
    "dissipative": {"map", "n_terms", "n_points", "radius_range"},
    "lp-duality": {"map", "p_list", "n_points"},
    "chiA": {"map", "region"},
}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    budget: int
    raw: dict = field(default_factory=dict)
    out: str = "."
    format: str = "csv"

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        if "experiment" not in data:
            raise ConfigError("missing key: experiment")
        name = data["experiment"]
        if name not in _EXPERIMENT_KEYS:
            raise UnknownExperiment(f"unknown experiment {name!r}")
        for key in ("seed", "budget"):
            if key not in data:
                raise ConfigError(f"missing mandatory key: {key}")
        allowed = _COMMON_KEYS | _EXPERIMENT_KEYS[name]
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(
                f"unknown keys for {name}: {sorted(unknown)}")
        fmt = data.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}")
        return ExperimentConfig(
            experiment=name,
            seed=int(data["seed"]),
            budget=int(data["budget"]),
            raw=dict(data),
            out=str(data.get("out", ".")),
            format=fmt,
        )

    @staticmethod
    def from_toml(path: str) -> "ExperimentConfig":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib

        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {path}: {exc}") from exc
        return ExperimentConfig.from_dict(data)

    def inputs_hash(self) -> str:
        # output path and format are delivery options, not inputs
        payload = {k: v for k, v in self.raw.items()
                   if k not in ("out", "format")}
        blob = json.dumps(payload, sort_keys=True, default=str)
        h = hashlib.sha256()
        h.update(blob.encode())
        h.update(VERSION.encode())
        return h.hexdigest()[:16]


def _complex_of(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex values are [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def map_from_config(section) -> RationalMap | LattesParams:
    if not isinstance(section, dict):
        raise ConfigError("[map] must be a table")
    kind = section.get("type", "rational")
    if kind == "lattes":
        extra = set(section) - {"type", "g2", "g3"}
        if extra:
            raise ConfigError(f"unknown [map] keys: {sorted(extra)}")
        return LattesParams(_complex_of(section.get("g2", 0.0)),
                            _complex_of(section.get("g3", 0.0)))
    if kind == "rational":
        extra = set(section) - {"type", "num", "den"}
        if extra:
            raise ConfigError(f"unknown [map] keys: {sorted(extra)}")
        num = [_complex_of(c) for c in section["num"]]
        den = [_complex_of(c) for c in section.get("den", [1.0])]
        return RationalMap(num, den)
    raise ConfigError(f"unknown map type {kind!r}")


def _as_map(spec) -> RationalMap:
    return lattes_map(spec) if isinstance(spec, LattesParams) else spec


def region_from_config(section):
    if section is None:
        return WholePlane()
    if not isinstance(section, dict):
        raise ConfigError("[region] must be a table")
    kind = section.get("kind", "plane")
    if kind == "plane":
        extra = set(section) - {"kind"}
        if extra:
            raise ConfigError(f"unknown [region] keys: {sorted(extra)}")
        return WholePlane()
    if kind == "disk":
        extra = set(section) - {"kind", "center", "radius"}
        if extra:
            raise ConfigError(f"unknown [region] keys: {sorted(extra)}")
        return Disk(_complex_of(section.get("center", 0.0)),
                    float(section["radius"]))
    if kind == "annulus":
        extra = set(section) - {"kind", "center", "r_inner", "r_outer"}
        if extra:
            raise ConfigError(f"unknown [region] keys: {sorted(extra)}")
        return Annulus(_complex_of(section.get("center", 0.0)),
                       float(section["r_inner"]), float(section["r_outer"]))
    raise ConfigError(f"unknown region kind {kind!r}")


# -- result record --------------------------------------------------------

@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str


@dataclass
class ResultRecord:
    experiment: str
    inputs_hash: str
    scalars: dict
    series: dict  # name -> list of SeriesRecord
    assertions: list
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def summary_dict(self) -> dict:
        # wall time deliberately excluded: outputs must be
        # byte-identical across reruns of the same config
        return {
            "experiment": self.experiment,
            "inputs_hash": self.inputs_hash,
            "version": VERSION,
            "scalars": self.scalars,
            "series": {
                name: [{"n": r.n, "value": [r.value.real, r.value.imag],
                        "stderr": r.stderr, "tag": r.tag}
                       for r in recs]
                for name, recs in sorted(self.series.items())
            },
            "assertions": [
                {"name": a.name, "passed": a.passed, "detail": a.detail}
                for a in self.assertions
            ],
            "passed": self.passed,
        }


def _c2(v: complex):
    v = complex(v)
    return [v.real, v.imag]


# -- experiment implementations ------------------------------------------

def _exp_duality(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    A = region_from_config(cfg.raw.get("region",
                                       {"kind": "disk", "radius": 2.0}))
    mu = Field(lambda z: np.conj(z) / (1 + np.abs(z) ** 2),
               poles=(), decay_order=0)
    if isinstance(spec, LattesParams):
        phi = lattes_invariants(spec)[0]
    else:
        phi = gamma(-1.0)

    def one_part(part):
        return duality_residual(R, mu, phi, A, cfg.budget,
                                rng.split(part), part=part)

    workers = max_threads()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(workers, 2)) as pool:
            res = list(pool.map(one_part, (1, 2)))
    else:
        res = [one_part(1), one_part(2)]

    scalars, assertions = {}, []
    for part, r in zip((1, 2), res):
        scalars[f"part{part}_lhs"] = _c2(r["lhs"].value)
        scalars[f"part{part}_rhs"] = _c2(r["rhs"].value)
        scalars[f"part{part}_residual"] = r["residual"]
        scalars[f"part{part}_stderr"] = r["combined_stderr"]
        assertions.append(Assertion(
            f"part{part}_residual_3sigma",
            r["residual"] <= 3 * r["combined_stderr"],
            f"residual {r['residual']:.3e} vs 3*stderr "
            f"{3 * r['combined_stderr']:.3e}"))
        lhs = abs(r["lhs"].value)
        rel_ok = (r["combined_stderr"] <= 1e-2 * lhs if lhs > 3 * r["combined_stderr"]
                  else r["combined_stderr"] <= 1e-2)
        assertions.append(Assertion(
            f"part{part}_stderr_resolution", rel_ok,
            f"stderr {r['combined_stderr']:.3e}, |lhs| {lhs:.3e}"))
    return scalars, {}, assertions


def _exp_lattes_residuals(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    if not isinstance(spec, LattesParams):
        raise ConfigError("lattes-residuals needs a lattes map")
    n_points = int(cfg.raw.get("n_points", 200))
    res = lattes_residuals(spec, n_points, rng)
    scalars = {
        "ruelle": res["ruelle"],
        "ruelle_modulus": res["ruelle_modulus"],
        "beltrami": res["beltrami"],
        "lp_2": res["lp"][2],
        "lp_3": res["lp"][3],
    }
    assertions = [
        Assertion(f"fixed_point_{k}", v <= 1e-7, f"sup residual {v:.3e}")
        for k, v in scalars.items()
    ]
    return scalars, {}, assertions


def _exp_cesaro_trace(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    v = _complex_of(cfg.raw.get("v", [-1.0 / 3.0, 0.0]))
    n_list = [int(n) for n in cfg.raw.get("n_list", [1, 2, 4, 8, 16, 32])]
    region = region_from_config(cfg.raw.get("region"))
    recs = cesaro_trace(R, v, n_list, region, cfg.budget, rng)
    base = abs(recs[0].value) if recs and recs[0].n == 1 else None
    assertions = []
    if base is not None:
        for r in recs:
            bound = base + 3 * (r.stderr + recs[0].stderr)
            assertions.append(Assertion(
                f"contraction_n{r.n}", abs(r.value) <= bound,
                f"|A_n| {abs(r.value):.4f} <= {bound:.4f}"))
    return {}, {"cesaro_trace": recs}, assertions


def _exp_hol_spectrum(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    if isinstance(spec, LattesParams):
        R, _ = normalized_lattes(spec)
    else:
        R = spec
    M = transfer_matrix(R)
    vals, vecs = eigen_spectrum(M)
    rho = float(np.max(np.abs(vals)))
    scalars = {
        "dimension": len(M.basis),
        "matrix": M.to_json(),
        "spectrum": spectrum_to_json(vals, vecs),
        "spectral_radius": rho,
    }
    assertions = [Assertion("spectral_radius_contraction",
                            rho <= 1 + 1e-6, f"rho {rho:.8f}")]
    return scalars, {}, assertions


def _exp_ev_seq(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    if isinstance(spec, LattesParams):
        psi = lattes_invariants(spec)[1]
        default_v = None
    else:
        psi = Field(lambda z: np.ones(z.shape, dtype=complex))
        default_v = None
    vs = cfg.raw.get("v")
    if vs is None:
        finite = [p for p in R.critical_data().critical_values
                  if np.isfinite(complex(p).real)
                  and np.isfinite(complex(p).imag)]
        if not finite:
            raise ConfigError("map has no finite critical value")
        v = complex(sorted(finite, key=lambda z: (z.real, z.imag))[0])
    else:
        v = _complex_of(vs)
    del default_v
    n_max = int(cfg.raw.get("n_max", 8))
    K = postcritical_approx(R)
    recs = ev_sequence(R, v, psi, n_max, K, cfg.budget, rng)
    return {"v": _c2(v)}, {"ev_sequence": recs}, []


def _exp_mixing(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    if not isinstance(spec, LattesParams):
        raise ConfigError("mixing needs a lattes map (known density)")
    R = lattes_map(spec)
    A = region_from_config(cfg.raw.get(
        "region", {"kind": "disk", "center": [0.9, 0.9], "radius": 0.5}))
    B = region_from_config(cfg.raw.get(
        "region_b", {"kind": "disk", "center": [-1.2, -0.8], "radius": 0.5}))
    n_list = [int(n) for n in cfg.raw.get("n_list", [0, 1, 2, 4, 6])]
    sampler, mass = lattes_density_sampler(spec)
    recs = mixing_correlation(R, sampler, A, B, n_list, cfg.budget, rng)
    last = recs[-1]
    assertions = [Assertion(
        f"decorrelated_n{last.n}",
        abs(last.value) <= 0.05 + 3 * last.stderr,
        f"|corr| {abs(last.value):.3e} vs 0.05 + {3 * last.stderr:.3e}")]
    return {"mass": mass}, {"mixing_correlation": recs}, assertions


def _exp_dissipative(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    n_terms = int(cfg.raw.get("n_terms", 12))
    n_points = int(cfg.raw.get("n_points", 20))
    r_lo, r_hi = cfg.raw.get("radius_range", [400.0, 700.0])
    gen = rng.split(0).generator
    z = ((r_lo + (r_hi - r_lo) * gen.random(n_points))
         * np.exp(2j * np.pi * gen.random(n_points)))
    rows = dissipative_partial_sums(R, gamma(-1.0).abs(), z, n_terms)
    recs = [SeriesRecord(n=i, value=complex(row["tail"]), stderr=0.0,
                         tag="asserted")
            for i, row in enumerate(rows)]
    all_cauchy = all(row["cauchy"] for row in rows)
    worst = max(row["tail"] for row in rows)
    assertions = [Assertion("cauchy_by_N", all_cauchy,
                            f"worst tail {worst:.3e}")]
    return {"worst_tail": worst}, {"dissipative_tails": recs}, assertions


def _exp_lp_duality(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    p_list = [float(p) for p in cfg.raw.get("p_list", [2.0, 3.0])]
    n_points = int(cfg.raw.get("n_points", 200))
    gen = rng.split(0).generator
    z = (gen.random(4 * n_points) * 6 - 3) \
        + 1j * (gen.random(4 * n_points) * 6 - 3)
    # keep clear of critical values where fiber phases degenerate
    bad = [complex(v) for v in R.critical_data().critical_values
           if np.isfinite(complex(v).real) and np.isfinite(complex(v).imag)]
    if bad:
        b = np.asarray(bad, dtype=complex)
        z = z[np.min(np.abs(z[:, None] - b[None, :]), axis=1) > 0.1]
    z = z[:n_points]
    phi = gamma(2.0 + 0.5j)
    ref = phi(z)
    scalars, assertions = {}, []
    comp = ruelle_apply(R, normalized_pullback(R, phi))(z)
    err0 = float(np.max(np.abs(comp - ref)))
    scalars["push_pull_id"] = err0
    assertions.append(Assertion("push_pull_identity", err0 <= 1e-9,
                                f"sup error {err0:.3e}"))
    for p in p_list:
        comp = lp_push(R, p, lp_pull(R, p, phi))(z)
        err = float(np.max(np.abs(comp - ref)))
        scalars[f"lp_id_p{p:g}"] = err
        assertions.append(Assertion(f"lp_identity_p{p:g}", err <= 1e-9,
                                    f"sup error {err:.3e}"))
    return scalars, {}, assertions


def _exp_chiA(cfg: ExperimentConfig, rng: RandomStream):
    spec = map_from_config(cfg.raw["map"])
    R = _as_map(spec)
    A = region_from_config(cfg.raw.get(
        "region", {"kind": "disk", "radius": 1.0}))
    chi = Field(lambda z: A.contains(z).astype(complex),
                poles=(), decay_order=99)
    moved = ruelle_apply(R, chi) - chi
    est = l1_norm(moved, WholePlane(), cfg.budget, rng.split(3))
    gap = abs(est.value) - 3 * est.stderr
    assertions = [Assertion(
        "indicator_not_fixed", gap >= 0.1,
        f"||R*chi - chi||_1 {abs(est.value):.4f} - 3*{est.stderr:.4f}")]
    return {"l1_distance": abs(est.value), "stderr": est.stderr}, {}, \
        assertions


_EXPERIMENTS = {
    "duality": _exp_duality,
    "lattes-residuals": _exp_lattes_residuals,
    "cesaro-trace": _exp_cesaro_trace,
    "hol-spectrum": _exp_hol_spectrum,
    "ev-seq": _exp_ev_seq,
    "mixing": _exp_mixing,
    "dissipative": _exp_dissipative,
    "lp-duality": _exp_lp_duality,
    "chiA": _exp_chiA,
}

EXPERIMENT_DESCRIPTIONS = {
    "duality": "Two-sided push/pull duality residual over a region.",
    "lattes-residuals": "Sup residuals of the Lattes fixed-point identities.",
    "cesaro-trace": "L1 norms of Cesaro averages of a gamma test function.",
    "hol-spectrum": "Transfer matrix and spectrum on the gamma basis.",
    "ev-seq": "Distance-weighted pairing sequence against Cesaro averages.",
    "mixing": "Correlation decay under the invariant Lattes measure.",
    "dissipative": "Partial sums of modulus powers at basin points.",
    "lp-duality": "Pointwise inverse identities of the L_p operator family.",
    "chiA": "L1 distance between an indicator and its push-forward.",
}


def run_experiment(cfg: ExperimentConfig) -> ResultRecord:
    if cfg.experiment not in _EXPERIMENTS:
        raise UnknownExperiment(cfg.experiment)
    rng = RandomStream(cfg.seed)
    t0 = time.perf_counter()
    scalars, series, assertions = _EXPERIMENTS[cfg.experiment](cfg, rng)
    wall = time.perf_counter() - t0
    return ResultRecord(
        experiment=cfg.experiment,
        inputs_hash=cfg.inputs_hash(),
        scalars=scalars,
        series=series,
        assertions=assertions,
        wall_time=wall,
    )


def emit_report(record: ResultRecord, out_dir: str,
                fmt: str = "csv") -> list:
    """Write series CSVs (or JSON) plus the JSON summary; returns paths.

    Outputs are a pure function of (config, version): wall time is not
    written, reduction orders are fixed, floats are serialized by repr.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if fmt == "csv":
        for name, recs in sorted(record.series.items()):
            path = os.path.join(out_dir, f"{name}.csv")
            _series_to_csv(recs, path)
            paths.append(path)
    summary = os.path.join(out_dir, "summary.json")
    with open(summary, "w") as fh:
        json.dump(record.summary_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths.append(summary)
    return paths
