"""Experiment orchestration: parameter sweeps, spectrum dumps, empirical runs.

Every runner is deterministic for a fixed config: per-run seeds derive from
(master seed, grid index, repetition) and outputs are written as CSV/JSON
with stable formatting, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .bp import BpConfig, bp_run
from .detectability import snr_report, switching_rho
from .hsbm import (
    SymmetricHsbmSpec,
    order_experiment_spec,
    sample_planted,
    sample_symmetric,
    shape_experiment_spec,
)
from .hypergraph import Partition, load_hyperedge_list, load_partition, save_partition
from .metrics import ami, confusion, hyperedge_composition
from .nonbacktracking import nonbacktracking_matrix
from .spectral import SpectralConfig, SpectralError, bethe_hessian, bulk_radius, spectral_cluster


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str  # eps-sweep | shape-sweep | order-sweep | spectrum | empirical
    n: int = 3000
    q: int = 2
    orders: tuple = (2, 3)
    d: float = 10.0
    grid: tuple = ()
    reps: int = 20
    methods: tuple = ("bh",)
    seed: int = 0
    out: str = "results"
    fixed_q: int | None = None
    shape_order: int = 4
    low_order: int = 2
    high_order: int = 3
    bp: BpConfig = BpConfig()
    eta_grid: tuple = ()
    dataset: str | None = None
    labels: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        object.__setattr__(self, "orders", tuple(int(k) for k in self.orders))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.reps < 1:
            raise ExperimentError("repetitions must be >= 1")
        if self.experiment in ("eps-sweep", "shape-sweep", "order-sweep") and not self.grid:
            raise ExperimentError("sweep experiments need a nonempty grid")

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        doc = dict(doc)
        if "bp" in doc:
            doc["bp"] = BpConfig(**doc["bp"])
        for key in ("grid", "orders", "methods", "eta_grid"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


def _run_seed(master, point, rep):
    return int(np.random.SeedSequence([int(master), int(point), int(rep)]).generate_state(1)[0])


def _fmt(x):
    if x is None:
        return ""
    return f"{x:.12g}"


def _mean_stderr(values):
    if not values:
        return None, None
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_json(path, doc):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def transition_point(grid, means, level=0.02):
    """Smallest grid value whose mean stays below `level` from there on.

    Returns None when the curve never settles below the level.
    """
    grid = list(grid)
    means = list(means)
    last_above = -1
    for i, v in enumerate(means):
        if v is None or v >= level:
            last_above = i
    if last_above == len(grid) - 1:
        return None
    return grid[last_above + 1]


def crossing_points(grid, a, b):
    """Linear-interpolation crossings of two mean curves over the grid."""
    out = []
    for i in range(len(grid) - 1):
        if None in (a[i], a[i + 1], b[i], b[i + 1]):
            continue
        d0 = a[i] - b[i]
        d1 = a[i + 1] - b[i + 1]
        if d0 == d1:
            continue
        if d0 == 0.0:
            out.append(grid[i])
        elif d0 * d1 < 0.0:
            out.append(grid[i] + (grid[i + 1] - grid[i]) * d0 / (d0 - d1))
    return out


def _detect_bh(h, q):
    return spectral_cluster(h, num_communities=q, config=SpectralConfig(seed=0)).partition


def run_eps_sweep(cfg: ExperimentConfig):
    """Phase-transition sweep over the mixing ratio eps = c_out/c_in.

    Per grid point and repetition: sample, detect with the requested
    methods, score AMI against the planted partition.  Spectral detection
    estimates the community count from the negative eigenvalues unless
    fixed_q is set; finding no structure scores 0.
    """
    rows = []
    curves = {m: [] for m in cfg.methods}
    for p_idx, eps in enumerate(cfg.grid):
        scores = {m: [] for m in cfg.methods}
        for rep in range(cfg.reps):
            seed = _run_seed(cfg.seed, p_idx, rep)
            spec = SymmetricHsbmSpec(
                n=cfg.n, q=cfg.q, orders=cfg.orders, d=cfg.d, eps=eps, seed=seed
            )
            h, planted = sample_symmetric(spec)
            if "bh" in cfg.methods:
                try:
                    part = _detect_bh(h, cfg.fixed_q)
                    scores["bh"].append(ami(part, planted))
                except SpectralError:
                    scores["bh"].append(0.0)
                except Exception:
                    pass
            if "bp" in cfg.methods:
                try:
                    bp_cfg = replace(cfg.bp, seed=seed)
                    res = bp_run(h, cfg.q, spec.rates(), bp_cfg, planted=planted)
                    scores["bp"].append(ami(res.partition, planted))
                except Exception:
                    pass
        row = [_fmt(eps)]
        for m in ("bh", "bp"):
            if m in cfg.methods:
                mean, stderr = _mean_stderr(scores[m])
                curves[m].append(mean)
                row += [_fmt(mean), _fmt(stderr)]
            else:
                row += ["", ""]
        rows.append(row)
    csv_path = write_csv(
        os.path.join(cfg.out, "eps_sweep.csv"),
        ["eps", "ami_bh_mean", "ami_bh_stderr", "ami_bp_mean", "ami_bp_stderr"],
        rows,
    )
    report = snr_report(cfg.q, cfg.orders, d=cfg.d, eps=0.0, with_roots=True)
    doc = {
        "experiment": "eps-sweep",
        "n": cfg.n,
        "q": cfg.q,
        "orders": list(cfg.orders),
        "d": cfg.d,
        "grid": list(cfg.grid),
        "reps": cfg.reps,
        "eps_bh_star": report.eps_bh,
        "eps_bp_star": report.eps_bp,
        "transition_bh": transition_point(cfg.grid, curves.get("bh", [])) if "bh" in curves else None,
        "transition_bp": transition_point(cfg.grid, curves.get("bp", [])) if "bp" in curves else None,
    }
    json_path = write_json(os.path.join(cfg.out, "eps_sweep.json"), doc)
    return csv_path, json_path, curves


def _coarse_labels(planted, merge):
    lut = np.empty(4, dtype=np.int64)
    for g, group in enumerate(merge):
        for c in group:
            lut[c] = g
    return lut[planted.labels]


def _run_competition(cfg: ExperimentConfig, kind):
    """Shared driver of the shape and order sweeps: detect 2 communities and
    score against both coarse plantings."""
    rows = []
    curve_a, curve_b = [], []
    for p_idx, rho in enumerate(cfg.grid):
        s_a, s_b = [], []
        for rep in range(cfg.reps):
            seed = _run_seed(cfg.seed, p_idx, rep)
            if kind == "shape":
                spec = shape_experiment_spec(cfg.n, cfg.d, rho, order=cfg.shape_order, seed=seed)
            else:
                spec = order_experiment_spec(
                    cfg.n, cfg.d, rho, cfg.low_order, cfg.high_order, seed=seed
                )
            h, planted = sample_planted(spec)
            try:
                part = _detect_bh(h, 2)
            except Exception:
                continue
            lab_a = Partition(_coarse_labels(planted, ((0, 1), (2, 3))), 2)
            lab_b = Partition(_coarse_labels(planted, ((0, 2), (1, 3))), 2)
            s_a.append(ami(part, lab_a))
            s_b.append(ami(part, lab_b))
        mean_a, se_a = _mean_stderr(s_a)
        mean_b, se_b = _mean_stderr(s_b)
        curve_a.append(mean_a)
        curve_b.append(mean_b)
        rows.append([_fmt(rho), _fmt(mean_a), _fmt(se_a), _fmt(mean_b), _fmt(se_b)])
    return rows, curve_a, curve_b


def run_shape_sweep(cfg: ExperimentConfig):
    """Balanced-vs-imbalanced hyperedge shape competition at one order."""
    kind = f"shape{cfg.shape_order}"
    rows, curve_a, curve_b = _run_competition(cfg, "shape")
    csv_path = write_csv(
        os.path.join(cfg.out, "shape_sweep.csv"),
        ["rho", "ami_0123_mean", "ami_0123_stderr", "ami_0213_mean", "ami_0213_stderr"],
        rows,
    )
    doc = {
        "experiment": "shape-sweep",
        "order": cfg.shape_order,
        "n": cfg.n,
        "d": cfg.d,
        "grid": list(cfg.grid),
        "reps": cfg.reps,
        "rho_star_raw": switching_rho(kind),
        "rho_star_adjusted": switching_rho(kind, adjusted=True, d=cfg.d),
        "crossings": crossing_points(cfg.grid, curve_a, curve_b),
    }
    json_path = write_json(os.path.join(cfg.out, "shape_sweep.json"), doc)
    return csv_path, json_path, (curve_a, curve_b)


def run_order_sweep(cfg: ExperimentConfig):
    """Low-order vs high-order boundary hyperedge competition."""
    rows, curve_a, curve_b = _run_competition(cfg, "order")
    csv_path = write_csv(
        os.path.join(cfg.out, "order_sweep.csv"),
        ["rho", "ami_0123_mean", "ami_0123_stderr", "ami_0213_mean", "ami_0213_stderr"],
        rows,
    )
    doc = {
        "experiment": "order-sweep",
        "low_order": cfg.low_order,
        "high_order": cfg.high_order,
        "n": cfg.n,
        "d": cfg.d,
        "grid": list(cfg.grid),
        "reps": cfg.reps,
        "rho_star_raw": switching_rho(
            "order", low_order=cfg.low_order, high_order=cfg.high_order
        ),
        "rho_star_adjusted": switching_rho(
            "order", low_order=cfg.low_order, high_order=cfg.high_order, adjusted=True, d=cfg.d
        ),
        "crossings": crossing_points(cfg.grid, curve_a, curve_b),
    }
    json_path = write_json(os.path.join(cfg.out, "order_sweep.json"), doc)
    return csv_path, json_path, (curve_a, curve_b)


def run_spectrum(cfg: ExperimentConfig):
    """Dump non-backtracking eigenvalues and Bethe Hessian spectra vs eta."""
    if cfg.n > 300:
        raise ExperimentError("spectrum dumps are limited to n <= 300")
    spec = SymmetricHsbmSpec(
        n=cfg.n, q=cfg.q, orders=cfg.orders, d=cfg.d,
        eps=cfg.grid[0] if cfg.grid else 0.1, seed=cfg.seed,
    )
    h, _ = sample_symmetric(spec)
    radius = bulk_radius(h)
    nb = nonbacktracking_matrix(h, guard=50000)
    w = np.linalg.eigvals(nb.matrix.toarray())
    etas = cfg.eta_grid or tuple(np.linspace(1.05, 1.5 * radius, 10))
    bh_spectra = []
    for eta in etas:
        B = bethe_hessian(h, float(eta))
        bh_spectra.append(sorted(float(x) for x in np.linalg.eigvalsh(B.matrix.to_dense())))
    doc = {
        "experiment": "spectrum",
        "n": cfg.n,
        "bulk_radius": radius,
        "nb_eigenvalues": [[float(z.real), float(z.imag)] for z in w],
        "eta_grid": [float(e) for e in etas],
        "bh_eigenvalues": bh_spectra,
    }
    return write_json(os.path.join(cfg.out, "spectrum.json"), doc)


def run_empirical(cfg: ExperimentConfig):
    """Cluster a hyperedge-list file; score against labels when provided."""
    if not cfg.dataset:
        raise ExperimentError("empirical runs need a dataset path")
    h, names = load_hyperedge_list(cfg.dataset)
    truth = load_partition(cfg.labels, names) if cfg.labels else None
    detect_q = cfg.fixed_q if cfg.fixed_q else (truth.q if truth else None)
    result = spectral_cluster(h, num_communities=detect_q, config=SpectralConfig(seed=cfg.seed))
    os.makedirs(cfg.out, exist_ok=True)
    save_partition(result.partition, os.path.join(cfg.out, "partition.txt"), names)
    write_json(
        os.path.join(cfg.out, "clustering.json"),
        {
            "eta": result.eta,
            "num_negative": result.num_negative,
            "q": result.partition.q,
            "eigenvalues": [float(x) for x in result.eigenvalues],
            "ami": ami(result.partition, truth) if truth else None,
        },
    )
    max_same, order_freq = hyperedge_composition(h, result.partition)
    write_csv(
        os.path.join(cfg.out, "composition_detected.csv"),
        ["order", "max_same_community", "count"],
        [[k, s, c] for (k, s), c in sorted(max_same.items())],
    )
    write_csv(
        os.path.join(cfg.out, "order_frequency.csv"),
        ["order", "count"],
        [[k, c] for k, c in sorted(order_freq.items())],
    )
    if truth is not None:
        mat = confusion(truth, result.partition, row_normalize=True)
        write_csv(
            os.path.join(cfg.out, "confusion.csv"),
            ["class"] + [f"community_{j}" for j in range(mat.shape[1])],
            [[i] + [_fmt(x) for x in mat[i]] for i in range(mat.shape[0])],
        )
        max_same_t, _ = hyperedge_composition(h, truth)
        write_csv(
            os.path.join(cfg.out, "composition_labels.csv"),
            ["order", "max_same_community", "count"],
            [[k, s, c] for (k, s), c in sorted(max_same_t.items())],
        )
    return cfg.out


def run(cfg: ExperimentConfig):
    runner = {
        "eps-sweep": run_eps_sweep,
        "shape-sweep": run_shape_sweep,
        "order-sweep": run_order_sweep,
        "spectrum": run_spectrum,
        "empirical": run_empirical,
    }.get(cfg.experiment)
    if runner is None:
        raise ExperimentError(f"unknown experiment {cfg.experiment!r}")
    return runner(cfg)
