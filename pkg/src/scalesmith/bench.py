"""Benchmark runs: spread tables, scale-selection sweeps and renderings.

Outputs are CSV with shortest round-trip float formatting, a ``config.json``
sidecar that reproduces the run, and a ``manifest.txt`` with checksums.
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .diffops import BoundaryPolicy
from .grid2d import Detector, ScaleSpace, write_pgm
from .kernels1d import ALL_METHODS, MethodId
from .measures import spread_report
from .scalesel import NoExtremumError, ScaleGrid, relative_error, scale_signature, select_scale, signature_of
from .signals import ModelKind, ModelSpec, make_model, model_size

OUT_ENV = "SCALESMITH_OUT"
DEFAULT_OUT = "scalesmith-out"

SCALESEL_HEADER = ("method", "detector", "sigma0", "sigma_hat", "rel_error", "endpoint_flag")
SPREAD_HEADER = ("method", "order", "sigma", "spread", "offset")


def default_out() -> str:
    return os.environ.get(OUT_ENV, DEFAULT_OUT)


@dataclass
class BenchConfig:
    sigma0_min: float = 1.0 / 3.0
    sigma0_max: float = 3.0
    sigma0_steps: int = 50
    grid_min: float = 0.1
    grid_max: float = 5.0
    grid_levels: int = 80
    spread_min: float = 0.1
    spread_max: float = 2.0
    spread_steps: int = 100
    orders: tuple[int, ...] = (1, 2, 3, 4)
    methods: tuple[MethodId, ...] = ALL_METHODS
    detectors: tuple[Detector, ...] = tuple(Detector)
    out: str = field(default_factory=default_out)
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def sigma0_values(self) -> np.ndarray:
        return np.geomspace(self.sigma0_min, self.sigma0_max, self.sigma0_steps)

    def grid(self) -> ScaleGrid:
        return ScaleGrid(self.grid_min, self.grid_max, self.grid_levels)

    def spread_sigmas(self) -> np.ndarray:
        return np.geomspace(self.spread_min, self.spread_max, self.spread_steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["methods"] = [m.value for m in self.methods]
        d["detectors"] = [x.value for x in self.detectors]
        d["orders"] = list(self.orders)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "methods" in d:
            d["methods"] = tuple(MethodId.parse(m) for m in d["methods"])
        if "detectors" in d:
            d["detectors"] = tuple(Detector.parse(x) for x in d["detectors"])
        if "orders" in d:
            d["orders"] = tuple(int(o) for o in d["orders"])
        return cls(**d)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "BenchConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class BenchRecord:
    method: MethodId
    detector: Detector
    sigma0: float
    sigma_hat: float
    rel_error: float
    endpoint_flag: bool

    def row(self) -> tuple[str, ...]:
        return (self.method.value, self.detector.value, fmt(self.sigma0),
                fmt(self.sigma_hat), fmt(self.rel_error), "1" if self.endpoint_flag else "0")


def fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return path


def _scalesel_cell(args) -> list[BenchRecord]:
    method_name, sigma0, detector_names, grid_args = args
    method = MethodId(method_name)
    grid = ScaleGrid(*grid_args)
    size = model_size(sigma0, method, grid.sigma_max)
    engines: dict[ModelKind, ScaleSpace] = {}
    out = []
    for name in detector_names:
        detector = Detector(name)
        kind = ModelKind(detector.model)
        if kind not in engines:
            engines[kind] = ScaleSpace(make_model(ModelSpec(kind, sigma0, method, size)), len(grid))
        signature = signature_of(engines[kind], detector, method, grid)
        try:
            est = select_scale(signature, detector.polarity)
        except NoExtremumError:
            out.append(BenchRecord(method, detector, sigma0, float("nan"), float("nan"), True))
            continue
        out.append(BenchRecord(method, detector, sigma0, est.sigma_hat,
                               relative_error(est.sigma_hat, sigma0), not est.interpolated))
    return out


def run_scalesel(config: BenchConfig) -> list[BenchRecord]:
    """All (method, detector, sigma0) records in canonical order.

    Cells are independent (method, sigma0) pairs; with more than one worker
    they run in a process pool and are re-sorted before returning.
    """
    grid_args = (config.grid_min, config.grid_max, config.grid_levels)
    detector_names = tuple(d.value for d in config.detectors)
    cells = [(m.value, float(s0), detector_names, grid_args)
             for m in config.methods for s0 in config.sigma0_values()]
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_scalesel_cell, cells, chunksize=max(1, len(cells) // (4 * config.workers))))
    else:
        results = [_scalesel_cell(c) for c in cells]
    records = [r for cell in results for r in cell]
    method_rank = {m: i for i, m in enumerate(config.methods)}
    detector_rank = {d: i for i, d in enumerate(config.detectors)}
    records.sort(key=lambda r: (method_rank[r.method], detector_rank[r.detector], r.sigma0))
    return records


def run_spread(config: BenchConfig) -> list[tuple[str, ...]]:
    rows = []
    for method in config.methods:
        for order in config.orders:
            for sigma in config.spread_sigmas():
                rep = spread_report(method, order, float(sigma) ** 2)
                rows.append((method.value, str(order), fmt(sigma), fmt(rep.spread), fmt(rep.offset)))
    return rows


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, config: BenchConfig) -> Path:
    """Record tool version, config and checksums of every output in ``out_dir``."""
    out_dir = Path(out_dir)
    lines = [f"tool scalesmith {__version__}",
             "config " + json.dumps(config.to_dict(), sort_keys=True)]
    for p in sorted(out_dir.iterdir()):
        if p.name != "manifest.txt" and p.is_file():
            lines.append(f"sha256 {sha256(p)} {p.name}")
    path = out_dir / "manifest.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def _prepare(config: BenchConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    config.save(out / "config.json")
    return out


def cmd_spread(config: BenchConfig) -> Path:
    out = _prepare(config)
    path = write_csv(out / "spread.csv", SPREAD_HEADER, run_spread(config))
    write_manifest(out, config)
    return path


def cmd_scalesel(config: BenchConfig) -> tuple[Path, list[BenchRecord]]:
    out = _prepare(config)
    records = run_scalesel(config)
    path = write_csv(out / "scalesel.csv", SCALESEL_HEADER, (r.row() for r in records))
    write_manifest(out, config)
    return path, records


def cmd_render(kind: ModelKind, method: MethodId, sigma0: float, detector: Detector,
               sigma: float, config: BenchConfig) -> list[Path]:
    """Model image, detector response at ``sigma`` and the centre signature."""
    out = _prepare(config)
    grid = config.grid()
    spec = ModelSpec(kind, sigma0, method, model_size(sigma0, method, grid.sigma_max))
    image = make_model(spec)
    engine = ScaleSpace(image, len(grid))
    stem = f"{kind.value}_{method.value}_{detector.value}_s0-{sigma0:g}"
    note = f"model={kind.value} method={method.value} sigma0={sigma0!r}"
    model_path = write_pgm(out / f"{stem}_model.pgm", image.data, "minmax", note)
    response = engine.detector_map(detector, method, sigma * sigma, BoundaryPolicy.REPLICATE)
    response_path = write_pgm(out / f"{stem}_response.pgm", response, "signfold",
                              note + f" detector={detector.value} sigma={sigma!r}")
    if kind is ModelKind(detector.model):
        signature = scale_signature(spec, detector, grid)
    else:
        signature = signature_of(engine, detector, method, grid)
    sig_path = write_csv(out / f"{stem}_signature.csv", ("sigma", "value"),
                         ((fmt(g), fmt(v)) for g, v in zip(grid.values, signature.values)))
    write_manifest(out, config)
    return [model_path, response_path, sig_path]
