"""Command-line entry point.

Every command writes into ``--out`` (one directory per run) a
``manifest.json`` with the configuration, versions and tolerances, plus its
own JSON/CSV outputs. Exit codes: 0 success, 2 usage or domain error,
3 validation failure or anomaly, 4 invalid distribution, 5 file format error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, linalg
from ._config import DEFAULT, Tolerances
from .charfun import coincidence_scan, random_tgrid
from .errors import (DimensionMismatch, InvalidDistribution, NotPrimePower,
                     UnboundedRegion)
from .geometry import (centroid_tangency, edge_adjacency, enumerate_vertices,
                       h_polytope, insphere_radius, mub_vertices)
from .io import write_json
from .mub import MubFamily, build_mubs, prime_power_decompose, unbiasedness_report
from .operator_basis import (OperatorBasis, from_mubs, gell_mann_basis, pauli_basis,
                             qutrit_builtin, validate)
from .povm import critical_eta, global_povm, joint_distribution
from .sampler import counts_to_csv, goodness_of_fit, sample
from .states import (bloch_from_density, density_from_bloch, load_state,
                     maximally_mixed, random_state)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_DIST, EXIT_IO = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    builtin: str | None = None
    gellmann: bool = False
    load: str | None = None
    eta: float | None = None
    state: str = "mixed"
    out: str = "jointmeas-out"
    seed: int = 0
    grid: int = 50
    shots: int = 100_000
    workers: int = 1
    bisection: bool = True
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise CliError(f"unknown configuration keys: {sorted(unknown)}", EXIT_USAGE)
        return cls(**data)

    def check(self) -> None:
        if self.eta is not None and not 0.0 <= self.eta <= 1.0:
            raise CliError(f"--eta must lie in [0, 1], got {self.eta}", EXIT_USAGE)
        if self.n is not None and not 2 <= self.n <= 16:
            raise CliError(f"dimension must lie in [2, 16], got {self.n}", EXIT_USAGE)
        for name, minimum in (("grid", 1), ("shots", 1), ("workers", 1)):
            if getattr(self, name) < minimum:
                raise CliError(f"--{name} must be >= {minimum}", EXIT_USAGE)

    def tol(self) -> Tolerances:
        try:
            return DEFAULT.override(**self.tolerances)
        except (KeyError, TypeError) as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc


# -- shared helpers -----------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def resolve_basis(cfg: RunConfig) -> tuple[OperatorBasis, dict]:
    """Return the basis and any extra report entries (e.g. MUB unbiasedness)."""
    extra: dict = {}
    if cfg.load:
        data = _read_json(cfg.load)
        try:
            if "ops" in data:
                return OperatorBasis.from_json(data), extra
            mubs = MubFamily.from_json(data)
        except (KeyError, TypeError, ValueError, DimensionMismatch) as exc:
            raise CliError(f"malformed basis file {cfg.load}: {exc}", EXIT_IO) from exc
        extra["mub_report"] = unbiasedness_report(mubs).to_json()
        return from_mubs(mubs, name=f"loaded-{mubs.n}"), extra
    if cfg.gellmann:
        return gell_mann_basis(), extra
    if cfg.builtin == "qutrit":
        if cfg.n not in (None, 3):
            raise CliError("--builtin qutrit requires n = 3", EXIT_USAGE)
        return qutrit_builtin(), extra
    if cfg.builtin == "pauli":
        if cfg.n not in (None, 2):
            raise CliError("--builtin pauli requires n = 2", EXIT_USAGE)
        return pauli_basis(), extra
    if cfg.n is None:
        raise CliError("give a dimension n, --builtin, --gellmann or --load", EXIT_USAGE)
    if cfg.n == 2:
        return pauli_basis(), extra
    try:
        pp = prime_power_decompose(cfg.n)
    except NotPrimePower as exc:
        raise CliError(f"{exc} Pass it with --load FILE.", EXIT_USAGE) from exc
    mubs = build_mubs(pp)
    extra["mub_report"] = unbiasedness_report(mubs).to_json()
    return from_mubs(mubs), extra


def resolve_state(cfg: RunConfig, b: OperatorBasis) -> np.ndarray:
    choice = cfg.state
    if choice in ("mixed", "maximally-mixed"):
        return maximally_mixed(b.n)
    if choice == "random":
        return random_state(b.n, "mixed", cfg.seed)
    if choice == "pure":
        return random_state(b.n, "pure", cfg.seed)
    try:
        return load_state(choice, b)
    except OSError as exc:
        raise CliError(f"unknown state preset or unreadable file {choice!r}: {exc}", EXIT_IO) from exc
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CliError(f"malformed state file {choice}: {exc}", EXIT_IO) from exc


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(cfg: RunConfig, out: Path, tol: Tolerances) -> None:
    write_json(out / "manifest.json", {
        "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
        "versions": {"jointmeas": __version__, "numpy": np.__version__},
        "backend": linalg.BACKEND,
        "tolerances": tol.as_dict(),
    })


# -- commands -----------------------------------------------------------------

def cmd_basis(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, extra = resolve_basis(cfg)
    out = _outdir(cfg)
    report = validate(b, atol=tol.basis_pass)
    b.save(out / "basis.json")
    write_json(out / "validation.json", {"basis": b.name, **report.to_json(), **extra})
    _manifest(cfg, out, tol)
    print(f"basis {b.name}: n={b.n}, {b.dim} operators, {b.num_families} families, "
          f"validation {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_certify(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, _ = resolve_basis(cfg)
    out = _outdir(cfg)
    crit = critical_eta(b, bisection=cfg.bisection, tol=tol)
    rep = {"basis": b.name, "n": b.n, "critical_eta": crit.to_json(),
           "inverse_sqrt_dim": 1.0 / np.sqrt(b.dim)}
    if crit.bisection is not None and abs(crit.bisection - crit.analytic) > 1e-10:
        rep["anomaly"] = "analytic and bisection thresholds disagree"
    print(f"critical eta: analytic {crit.analytic:.12g}"
          + (f", bisection {crit.bisection:.12g}" if crit.bisection is not None else ""))
    if cfg.eta is not None:
        g = global_povm(b, cfg.eta, tol)
        verdict = "jointly measurable" if g.psd else "NOT jointly measurable"
        rep["requested"] = {**g.to_json(), "verdict": verdict}
        print(f"eta={cfg.eta:.12g}: min eigenvalue {g.min_eigs.min():.12g} -> {verdict}")
    write_json(out / "certify.json", rep)
    _manifest(cfg, out, tol)
    return EXIT_INVALID if "anomaly" in rep else EXIT_OK


def cmd_geometry(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, _ = resolve_basis(cfg)
    out = _outdir(cfg)
    try:
        h = h_polytope(b)
    except UnboundedRegion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    v = mub_vertices(b)
    edges = edge_adjacency(v, h, tol.boundary, tol.rank)
    cent = centroid_tangency(h, v, tol.boundary)
    rep = {
        "basis": b.name, "n": b.n, "dim": b.dim,
        "faces": h.num_faces,
        "mub_vertices": v.num_vertices,
        "edges": edges.to_json(),
        "insphere_radius": insphere_radius(h),
        "centroids": cent.to_json(),
        "vertex_norms": sorted(set(np.round(np.linalg.norm(v.vertices, axis=1), 12).tolist())),
    }
    if b.dim <= 14:
        rep["enumeration"] = enumerate_vertices(h, v, tol.dedup, tol.rank).to_json()
    v.to_csv(out / "vertices.csv")
    write_json(out / "geometry.json", rep)
    _manifest(cfg, out, tol)
    msg = (f"{h.num_faces} faces, {v.num_vertices} MUB vertices, {edges.count} edges, "
           f"insphere radius {rep['insphere_radius']:.12g}")
    if "enumeration" in rep:
        msg += f", {rep['enumeration']['count']} enumerated vertices"
    print(msg)
    return EXIT_OK if cent.passed else EXIT_INVALID


def cmd_dist(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, _ = resolve_basis(cfg)
    out = _outdir(cfg)
    rho = resolve_state(cfg, b)
    eta = 1.0 if cfg.eta is None else cfg.eta
    theta = bloch_from_density(rho, b)
    dist = joint_distribution(theta, b, eta)
    dist.to_csv(out / "distribution.csv")
    _, physical = density_from_bloch(theta, b)
    write_json(out / "dist.json", {
        "basis": b.name, "eta": eta, "num_outcomes": len(dist.p),
        "sum": float(dist.p.sum()), "min": float(dist.p.min()),
        "valid": dist.valid, "physical_state": physical, "theta": theta,
    })
    _manifest(cfg, out, tol)
    print(f"{len(dist.p)} outcomes, sum {dist.p.sum():.15g}, min {dist.p.min():.6g}, "
          f"{'valid' if dist.valid else 'INVALID (signed)'}")
    return EXIT_OK if dist.valid else EXIT_DIST


def cmd_charfun(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, _ = resolve_basis(cfg)
    out = _outdir(cfg)
    rho = resolve_state(cfg, b)
    grid = random_tgrid(b.dim, cfg.grid, cfg.seed)
    rep = coincidence_scan(rho, b, grid)
    rep.to_csv(out / "charfun.csv")
    write_json(out / "charfun.json", {
        "basis": b.name, "num_points": rep.num_points,
        "max_deviation": rep.max_deviation,
        "coincide": rep.max_deviation < 1e-9,
    })
    _manifest(cfg, out, tol)
    print(f"max |phi_MH - phi_classical| over {rep.num_points} points: {rep.max_deviation:.3e}")
    return EXIT_OK


def cmd_sample(cfg: RunConfig) -> int:
    tol = cfg.tol()
    b, _ = resolve_basis(cfg)
    out = _outdir(cfg)
    rho = resolve_state(cfg, b)
    eta = 1.0 if cfg.eta is None else cfg.eta
    dist = joint_distribution(bloch_from_density(rho, b), b, eta)
    try:
        counts = sample(dist, cfg.shots, cfg.seed, cfg.workers)
    except InvalidDistribution as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIST
    fit = goodness_of_fit(counts, dist)
    counts_to_csv(counts, dist, out / "sample.csv")
    write_json(out / "sample.json", {
        "basis": b.name, "eta": eta, "shots": cfg.shots, "seed": cfg.seed,
        "chi2": fit.chi2, "df": fit.df, "chi2_quantile_999": fit.quantile_999,
        "tv": fit.tv, "rejected": fit.rejected,
    })
    _manifest(cfg, out, tol)
    print(f"{cfg.shots} shots: chi2 {fit.chi2:.4f} (df {fit.df}, 99.9% {fit.quantile_999:.4f}), "
          f"tv {fit.tv:.5f}")
    return EXIT_OK


def cmd_suite(cfg: RunConfig) -> int:
    """Fixed battery of runs covering every command, each in its own subdirectory."""
    root = Path(cfg.out)
    runs = [
        ("basis-qubit", cmd_basis, dict(n=2)),
        ("basis-qutrit", cmd_basis, dict(builtin="qutrit")),
        ("basis-4", cmd_basis, dict(n=4)),
        ("certify-qubit", cmd_certify, dict(n=2, eta=1 / np.sqrt(3))),
        ("certify-qutrit", cmd_certify, dict(builtin="qutrit", eta=0.4)),
        ("certify-4", cmd_certify, dict(n=4)),
        ("geometry-qubit", cmd_geometry, dict(n=2)),
        ("geometry-qutrit", cmd_geometry, dict(builtin="qutrit")),
        ("geometry-4", cmd_geometry, dict(n=4)),
        ("dist-qutrit", cmd_dist, dict(builtin="qutrit", state="mixed", eta=0.2)),
        ("charfun-qubit", cmd_charfun, dict(n=2, state="random")),
        ("charfun-qutrit", cmd_charfun, dict(builtin="qutrit", state="random")),
        ("sample-qutrit", cmd_sample, dict(builtin="qutrit", state="mixed")),
    ]
    codes = {}
    for name, fn, overrides in runs:
        sub = RunConfig(command=fn.__name__[4:], out=str(root / name), seed=cfg.seed,
                        grid=cfg.grid, shots=cfg.shots, tolerances=cfg.tolerances, **overrides)
        print(f"[{name}] ", end="")
        codes[name] = fn(sub)
    write_json(root / "suite.json", {"seed": cfg.seed, "exit_codes": codes})
    return EXIT_OK if all(c == EXIT_OK for c in codes.values()) else EXIT_INVALID


COMMANDS = {
    "basis": cmd_basis,
    "certify": cmd_certify,
    "geometry": cmd_geometry,
    "dist": cmd_dist,
    "charfun": cmd_charfun,
    "sample": cmd_sample,
    "suite": cmd_suite,
}


# -- argument parsing ---------------------------------------------------------

def _tolerance_pair(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    try:
        return name, (int(value) if name == "jacobi_max_sweeps" else float(value))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jointmeas", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="jointmeas-out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", action="append", type=_tolerance_pair, default=[],
                        metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--config", help="JSON file with RunConfig keys")

    basis_args = argparse.ArgumentParser(add_help=False)
    basis_args.add_argument("n", nargs="?", type=int, help="dimension (prime power)")
    src = basis_args.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=["qutrit", "pauli"])
    src.add_argument("--gellmann", action="store_true")
    src.add_argument("--load", metavar="FILE", help="basis or MUB-family JSON")

    state_args = argparse.ArgumentParser(add_help=False)
    state_args.add_argument("--state", default="mixed",
                            help="mixed | random | pure | path to a state JSON file")
    state_args.add_argument("--eta", type=float)

    sub.add_parser("basis", parents=[common, basis_args], help="build and validate a basis")
    p = sub.add_parser("certify", parents=[common, basis_args], help="joint-measurability threshold")
    p.add_argument("--eta", type=float)
    p.add_argument("--no-bisection", dest="bisection", action="store_false")
    sub.add_parser("geometry", parents=[common, basis_args], help="classicality polytope report")
    sub.add_parser("dist", parents=[common, basis_args, state_args], help="joint distribution CSV")
    p = sub.add_parser("charfun", parents=[common, basis_args, state_args],
                       help="characteristic-function coincidence scan")
    p.add_argument("--grid", type=int, default=50)
    p = sub.add_parser("sample", parents=[common, basis_args, state_args],
                       help="Monte-Carlo joint measurement")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("suite", parents=[common], help="run every command with fixed settings")
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--shots", type=int, default=100_000)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        loaded = _read_json(args.config)
        if not isinstance(loaded, dict):
            raise CliError("config file must hold a JSON object", EXIT_IO)
        data.update(loaded)
    known = {f.name for f in fields(RunConfig)}
    for key, value in vars(args).items():
        if key in known and value is not None:
            data[key] = value
    data["command"] = args.command
    data["tolerances"] = {**data.get("tolerances", {}), **dict(args.tol)}
    if not data["tolerances"] and "tolerances" in data:
        data["tolerances"] = {}
    cfg = RunConfig.from_dict(data)
    cfg.check()
    cfg.tol()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
