"""Command-line front end.

Subcommands:
  synth    build a ladder from a config, write orf.json + orf_table.csv
  arf      build the order-k associated ladder, write arf_k.json + mu_k.csv
  verify   run identity checks, write verify.json
  example  run the worked Lebesgue example against its closed forms

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical failure.
ORFKIT_GRID overrides the quadrature size (power of two >= 256).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .engine import (
    gram_schmidt_orf,
    lebesgue_arf,
    lebesgue_orf,
    synthesize,
)
from .errors import DomainError, OrfkitError
from .measure import boundary_grid, builtin_measure, measure_from_config
from .ratfun import PoleSequence
from .transforms import arf_explicit, arf_quad, arf_recurrence
from .verify import CHECK_NAMES, VerifyContext, run_verification

TABLE_POINTS = 256
ARF_AGREEMENT = 1e-8


class ConfigError(DomainError):
    pass


def _complex_pairs(raw, what):
    out = []
    for item in raw:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ConfigError(f"{what} entries must be [re, im] pairs")
        out.append(complex(float(item[0]), float(item[1])))
    return out


@dataclass
class JobConfig:
    """Validated run configuration (poles, source data, sizes, seed)."""

    poles: list
    lambdas: list | None
    measure_spec: dict | None
    n_max: int
    arf_order: int | None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    source: str = "measure"
    allow_poles_near_circle: bool = False
    grid: int | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if "poles" not in raw or not raw["poles"]:
            raise ConfigError("config needs a nonempty 'poles' list")
        poles = _complex_pairs(raw["poles"], "poles")
        if any(abs(b) >= 1.0 for b in poles):
            raise ConfigError("every pole must satisfy |beta| < 1")
        allow = bool(raw.get("allow_poles_near_circle", False))
        if not allow and any(abs(b) > 0.9 for b in poles):
            raise ConfigError("|beta| > 0.9 requires allow_poles_near_circle: true")
        lambdas = None
        if raw.get("lambdas") is not None:
            lambdas = _complex_pairs(raw["lambdas"], "lambdas")
            if any(abs(v) >= 1.0 for v in lambdas):
                raise ConfigError("every lambda must satisfy |lambda| < 1")
        measure_spec = raw.get("measure")
        if measure_spec is None and lambdas is None:
            raise ConfigError("config needs a measure, lambdas, or both")
        n_max = raw.get("n_max")
        if n_max is None:
            if lambdas is None:
                raise ConfigError("n_max is required for measure-only configs")
            n_max = len(lambdas)
        n_max = int(n_max)
        if n_max < 0:
            raise ConfigError("n_max must be >= 0")
        if lambdas is not None and len(lambdas) != n_max:
            raise ConfigError("lambdas must have exactly n_max entries")
        if n_max > len(poles) - 1:
            raise ConfigError("poles must list beta_0..beta_n_max")
        arf_order = raw.get("arf_order")
        if arf_order is not None:
            arf_order = int(arf_order)
            if not 0 <= arf_order <= n_max:
                raise ConfigError("arf_order must satisfy 0 <= k <= n_max")
        source = raw.get("source")
        if source is None:
            source = "measure" if measure_spec is not None else "lambdas"
        if source not in ("measure", "lambdas"):
            raise ConfigError("source must be 'measure' or 'lambdas'")
        if source == "measure" and measure_spec is None:
            raise ConfigError("source 'measure' without a measure spec")
        if source == "lambdas" and lambdas is None:
            raise ConfigError("source 'lambdas' without lambdas")
        tolerances = raw.get("tolerances") or {}
        if not isinstance(tolerances, dict):
            raise ConfigError("tolerances must be an object")
        grid = raw.get("grid")
        env = os.environ.get("ORFKIT_GRID")
        if env:
            try:
                grid = int(env)
            except ValueError as exc:
                raise ConfigError(f"ORFKIT_GRID must be an integer, got {env!r}") from exc
        if grid is not None:
            grid = int(grid)
            if grid < 256 or grid & (grid - 1):
                raise ConfigError("grid must be a power of two >= 256")
        return cls(
            poles=poles,
            lambdas=lambdas,
            measure_spec=measure_spec,
            n_max=n_max,
            arf_order=arf_order,
            tolerances=tolerances,
            seed=int(raw.get("seed", 0)),
            source=source,
            allow_poles_near_circle=allow,
            grid=grid,
        )

    @classmethod
    def from_file(cls, path) -> "JobConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def measure(self):
        if self.measure_spec is None:
            return None
        try:
            return measure_from_config(self.measure_spec)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


def build_system(cfg: JobConfig, cross_check: bool = True):
    """Build the configured ladder; when both sources are present, build both
    and require them to agree (phase-invariant comparison)."""
    poles = PoleSequence(cfg.poles)
    mu = cfg.measure()
    gs = synth = None
    if mu is not None:
        gs = gram_schmidt_orf(
            mu, poles, cfg.n_max, n_points=cfg.grid,
            allow_poles_near_circle=cfg.allow_poles_near_circle,
        )
    if cfg.lambdas is not None:
        synth = synthesize(
            cfg.lambdas, poles, allow_poles_near_circle=cfg.allow_poles_near_circle
        )
        if cfg.grid:
            synth.n_points = cfg.grid
    if cross_check and gs is not None and synth is not None:
        _, t = boundary_grid(TABLE_POINTS)
        worst = 0.0
        for n in range(cfg.n_max + 1):
            worst = max(
                worst,
                float(np.max(np.abs(np.abs(gs.level(n).phi(t)) - np.abs(synth.level(n).phi(t))))),
            )
            if n >= 1:
                worst = max(worst, abs(abs(gs.level(n).lam) - abs(synth.level(n).lam)))
        if worst > 1e-8:
            raise OrfkitError(
                f"measure and lambda routes disagree (max deviation {worst:.2e}); "
                "the config is inconsistent"
            )
    return gs if cfg.source == "measure" else synth


def _write_table(path, system, n_points=TABLE_POINTS):
    theta, t = boundary_grid(n_points)
    header = ["theta"]
    cols = [theta]
    for n in range(system.n_max + 1):
        vals = np.asarray(system.level(n).phi(t))
        header += [f"phi{n}_re", f"phi{n}_im"]
        cols += [vals.real, vals.imag]
    rows = np.stack(cols, axis=1)
    serialize.write_csv_atomic(path, header, rows)


def cmd_synth(args) -> int:
    cfg = JobConfig.from_file(args.config)
    if args.table_points < 2:
        raise ConfigError("--table-points must be >= 2")
    os.makedirs(args.out, exist_ok=True)
    system = build_system(cfg)
    serialize.write_json_atomic(os.path.join(args.out, "orf.json"), serialize.system_to_dict(system))
    _write_table(os.path.join(args.out, "orf_table.csv"), system, args.table_points)
    print(f"wrote {args.out}/orf.json and {args.out}/orf_table.csv (n_max={system.n_max})")
    return 0


def cmd_arf(args) -> int:
    cfg = JobConfig.from_file(args.config)
    k = args.order if args.order is not None else cfg.arf_order
    if k is None:
        raise ConfigError("give --order or set arf_order in the config")
    if not 0 <= k <= cfg.n_max:
        raise ConfigError("arf order must satisfy 0 <= k <= n_max")
    os.makedirs(args.out, exist_ok=True)
    system = build_system(cfg)
    arf = arf_recurrence(system, k)
    quad = arf_quad(system, k)
    _, t = boundary_grid(512)
    disc = 0.0
    for n in range(k, cfg.n_max + 1):
        phi_e, psi_e = arf_explicit(system, k, n, quad=quad)
        lv = arf.level(n)
        disc = max(disc, float(np.max(np.abs(phi_e(t) - lv.phi(t)))))
        disc = max(disc, float(np.max(np.abs(psi_e(t) - lv.psi(t)))))
    serialize.write_json_atomic(os.path.join(args.out, f"arf_{k}.json"), serialize.arf_to_dict(arf))
    theta = arf.mu_k.params["theta"]
    w = arf.mu_k.params["w"]
    serialize.write_csv_atomic(
        os.path.join(args.out, f"mu_{k}.csv"), ["theta", "weight"], np.stack([theta, w], axis=1)
    )
    print(f"explicit-vs-recurrence max discrepancy: {disc:.3e}")
    if disc >= ARF_AGREEMENT:
        print(f"FAIL: associated-ladder routes disagree by {disc:.3e} >= {ARF_AGREEMENT}", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args) -> int:
    cfg = JobConfig.from_file(args.config)
    checks = args.check or None
    if checks:
        unknown = [c for c in checks if c not in CHECK_NAMES]
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(unknown)}")
        if cfg.measure_spec is None and "roundtrip_measure" in checks:
            raise ConfigError("roundtrip_measure needs a measure in the config")
    elif cfg.measure_spec is None:
        checks = [c for c in CHECK_NAMES if c != "roundtrip_measure"]
    os.makedirs(args.out, exist_ok=True)
    system = build_system(cfg)
    ctx = VerifyContext(system=system, seed=cfg.seed, tolerances=cfg.tolerances)
    report = run_verification(ctx, checks)
    serialize.write_json_atomic(os.path.join(args.out, "verify.json"), report)
    ok = True
    for name, entry in report.items():
        status = "pass" if entry["pass"] else "FAIL"
        extra = f" ({entry['error']})" if "error" in entry else ""
        print(f"{status:4s} {name:20s} residual={entry['residual']:.3e} tol={entry['tolerance']:.1e}{extra}")
        ok = ok and entry["pass"]
    return 0 if ok else 1


def cmd_example(args) -> int:
    try:
        re, im = (float(v) for v in args.beta1.split(","))
    except ValueError as exc:
        raise ConfigError("--beta1 must be 're,im'") from exc
    beta1 = complex(re, im)
    if abs(beta1) > 0.9:
        raise ConfigError("|beta1| <= 0.9 required")
    n = args.n
    if n < 1:
        raise ConfigError("--n must be >= 1")
    poles = PoleSequence([0.0, beta1] + [0.0] * (n - 1))
    mu = builtin_measure("lebesgue")
    system = gram_schmidt_orf(mu, poles, n)
    _, t = boundary_grid(TABLE_POINTS)

    ok = True

    def line(label, value, tol):
        nonlocal ok
        good = value < tol
        ok = ok and good
        print(f"[{'PASS' if good else 'FAIL'}] {label}: {value:.3e} (tol {tol:.1e})")

    err = max(
        float(np.max(np.abs(system.level(m).phi(t) - lebesgue_orf(poles, m)(t))))
        for m in range(n + 1)
    )
    line("orthonormal functions vs closed form", err, 1e-10)
    lam = max(abs(system.level(m).lam) for m in range(1, n + 1))
    line("recurrence parameters vanish", lam, 1e-10)
    rng = np.random.default_rng(0)
    zs = 0.8 * np.sqrt(rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
    line("C-function is 1 on the disk", float(np.max(np.abs(system.caratheodory(zs) - 1.0))), 1e-10)
    quad = arf_quad(system, 1)
    err = 0.0
    for m in range(1, n + 1):
        phi_e, _ = arf_explicit(system, 1, m, quad=quad)
        err = max(err, float(np.max(np.abs(phi_e(t) - lebesgue_arf(poles, 1, m)(t)))))
    line("order-1 associated functions vs closed form", err, 1e-9)
    arf = arf_recurrence(system, 1)
    theta = arf.mu_k.params["theta"]
    target = (1.0 - abs(beta1) ** 2) / np.abs(np.exp(1j * theta) - beta1) ** 2
    line("recovered order-1 density vs closed form", float(np.max(np.abs(arf.mu_k.params["w"] - target))), 1e-8)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="orfkit",
        description="Orthogonal rational functions on the unit circle with "
        "prescribed poles: construction, associated ladders, and identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build a ladder and write orf.json / orf_table.csv")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--table-points", type=int, default=TABLE_POINTS)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("arf", help="build an associated ladder and write arf_k.json / mu_k.csv")
    p.add_argument("--config", required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_arf)

    p = sub.add_parser("verify", help="run identity checks and write verify.json")
    p.add_argument("--config", required=True)
    p.add_argument("--check", action="append", default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example", help="run the worked Lebesgue example")
    p.add_argument("which", choices=["lebesgue"])
    p.add_argument("--beta1", default="0.5,0")
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(func=cmd_example)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OrfkitError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
