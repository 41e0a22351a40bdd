"""Command-line entry point: ``ruledform {families,verify,sample,plot}``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors. Settings come from ``--config run.json`` and are
overridden by explicit flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .curves import (CATALOG, PARAMETER_RANGES, CurveFamily, FamilyKind, ParameterRangeError,
                     check_range)
from .ruled import evaluate_batch
from .svg import Panel, Series, render
from .verify import (SCHEMES, FdConfig, SampleBox, Tolerances, default_families,
                     default_s_box, default_w_box, run_suite)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

REFERENCE_A = {
    FamilyKind.CP2_CIRCLE: 0.3,
    FamilyKind.CH2_EQUIDISTANT: 0.0,
    FamilyKind.CH2_CIRCLE: 0.3,
    FamilyKind.CH2_HOROCYCLE: 0.0,
    FamilyKind.CH2_EXTERIOR_CIRCLE: 0.3,
}

CSV_COLUMNS = ["theta", "s", "w_re", "w_im", "sigma", "rho", "alpha", "beta_abs",
               "kappa_plus", "kappa_minus",
               "z0_re", "z0_im", "z1_re", "z1_im", "z2_re", "z2_im"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    kind: FamilyKind | None = None
    a: float | None = None
    r: float = 1.0
    box: SampleBox = field(default_factory=SampleBox)
    fd: FdConfig = field(default_factory=FdConfig)
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: str | None = None
    grid: tuple | None = None

    def families(self) -> list[CurveFamily]:
        if self.kind is None:
            return default_families(self.r)
        return [CurveFamily(self.kind, self.a, self.r)]

    def family(self) -> CurveFamily:
        kind = self.kind or FamilyKind.CH2_EQUIDISTANT
        a = self.a if self.a is not None else REFERENCE_A[kind]
        return CurveFamily(kind, a, self.r)


def parse_grid(text) -> tuple:
    """``"NxMxK"`` (or fewer factors) -> tuple of non-negative ints."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected e.g. 8x8x8") from None
    if not dims or len(dims) > 3 or any(d < 0 for d in dims):
        raise ConfigError(f"bad grid {text!r}; expected up to three non-negative counts")
    if math.prod(dims) == 0:
        raise ConfigError("empty grid")
    return dims


def _pair(value, name):
    try:
        lo, hi = (float(x) for x in value)
    except (TypeError, ValueError):
        raise ConfigError(f"box.{name} must be a [lo, hi] pair") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ConfigError(f"box.{name} must satisfy lo <= hi")
    return lo, hi


def build_config(args) -> RunConfig:
    """Merge the JSON file named by ``--config`` with explicit flags."""
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    known = {"family", "r", "box", "fd", "seed", "tolerances", "out", "grid"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")

    fam = raw.get("family") or {}
    if not isinstance(fam, dict):
        raise ConfigError("family must be an object {kind, a}")
    kind = args.family if args.family is not None else fam.get("kind")
    a = args.a if args.a is not None else fam.get("a")
    try:
        kind = FamilyKind.parse(kind) if kind is not None else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if kind is not None and a is None:
        a = REFERENCE_A[kind]
    if a is not None:
        a = float(a)
        if kind is None:
            raise ConfigError("--a needs --family")
        try:
            check_range(kind, a)
        except ParameterRangeError as exc:
            raise ConfigError(str(exc)) from None

    r = float(args.r if args.r is not None else raw.get("r", 1.0))
    if not (r > 0 and math.isfinite(r)):
        raise ConfigError("r must be positive")

    box_raw = raw.get("box") or {}
    box = SampleBox(
        theta=_pair(box_raw["theta"], "theta") if "theta" in box_raw else (0.0, 2 * math.pi),
        s=_pair(box_raw["s"], "s") if "s" in box_raw else None,
        w_abs=_pair(box_raw["w_abs"], "w_abs") if "w_abs" in box_raw else None,
    )
    if box.w_abs is not None and box.w_abs[0] < 0:
        raise ConfigError("box.w_abs must be non-negative")

    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer") from None

    fd_raw = raw.get("fd") or {}
    step = args.fd_step if args.fd_step is not None else fd_raw.get("step", 1e-5)
    scheme = fd_raw.get("scheme", "central-2")
    if scheme not in SCHEMES:
        raise ConfigError(f"fd.scheme must be one of {SCHEMES}")
    try:
        fd = FdConfig(step=float(step), scheme=scheme,
                      samples=int(fd_raw.get("samples", 100)), seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    tol_raw = dict(raw.get("tolerances") or {})
    if args.tol_fd is not None:
        tol_raw["fd"] = args.tol_fd
    if args.tol_alg is not None:
        tol_raw["alg"] = args.tol_alg
    try:
        tol = Tolerances.from_dict(tol_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    grid = args.grid if args.grid is not None else raw.get("grid")
    grid = parse_grid(grid) if grid is not None else None
    out = args.out if args.out is not None else raw.get("out")
    if out is not None:
        _check_writable(out)
    return RunConfig(kind=kind, a=a, r=r, box=box, fd=fd, seed=seed, tolerances=tol,
                     out=out, grid=grid)


def _check_writable(path: str) -> None:
    if os.path.isdir(path):
        raise ConfigError(f"output path {path!r} is a directory")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory {parent!r} does not exist")
    if not os.access(parent, os.W_OK) or (os.path.exists(path) and not os.access(path, os.W_OK)):
        raise ConfigError(f"output path {path!r} is not writable")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path!r}: {exc}") from None


# --- commands -----------------------------------------------------------------

def cmd_families(cfg: RunConfig | None = None) -> int:
    lines = []
    for kind in FamilyKind:
        info = CATALOG[kind]
        lines.append(f"{kind.value}")
        lines.append(f"  space            {info['space']}")
        lines.append(f"  parameter range  {info['range']}")
        lines.append(f"  speed lambda     {info['speed']}")
        lines.append(f"  alpha            {info['alpha']}")
        lines.append(f"  |beta|           {info['beta']}")
        lines.append(f"  spine curvature  {info['spine']}")
        lines.append(f"  rulings through  {info['extended_rulings_through']}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    families = cfg.families()
    suite = cfg.kind.value if cfg.kind is not None else "all-families"
    report = run_suite(families, fd=cfg.fd, tolerances=cfg.tolerances, suite=suite, box=cfg.box)
    text = report.to_json()
    if cfg.out is None:
        sys.stderr.write(report.to_table() + "\n")
    else:
        sys.stdout.write(report.to_table() + "\n")
    _write(cfg.out, text)
    return EXIT_OK if report.ok else EXIT_FAIL


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.array([lo]) if n == 1 else np.linspace(lo, hi, n)


def _sample_w_box(curve) -> tuple[float, float]:
    lo, hi = default_w_box(curve.cfg)
    # the spine is inside the model domain when eps_t = 1
    return (0.0, hi) if curve.cfg.epsilon_tilde == 1 else (lo, hi)


def sample_rows(curve, box: SampleBox, grid: tuple) -> list[list[float]]:
    """Grid over ``(theta, s, |w|)`` with ``arg w = 0``; one row per node."""
    dims = tuple(grid) + (1,) * (3 - len(grid))
    th = _axis(*box.theta, dims[0])
    s = _axis(*(box.s or default_s_box(curve)), dims[1])
    wa = _axis(*(box.w_abs or _sample_w_box(curve)), dims[2])
    T, S, W = np.meshgrid(th, s, wa, indexing="ij")
    T, S, W = T.reshape(-1), S.reshape(-1), W.reshape(-1).astype(complex)
    data = evaluate_batch(curve, T, S, W)
    alpha, beta = data["alpha"], np.abs(data["beta"])
    root = np.sqrt(alpha ** 2 + 4 * beta ** 2)
    kp, km = 0.5 * (alpha + root), 0.5 * (alpha - root)
    z = data["z"]
    rows = []
    for k in range(T.size):
        rows.append([T[k], S[k], W[k].real, W[k].imag, data["sigma"][k], data["rho"][k],
                     alpha[k], beta[k], kp[k], km[k],
                     z[k, 0].real, z[k, 0].imag, z[k, 1].real, z[k, 1].imag,
                     z[k, 2].real, z[k, 2].imag])
    return rows


def cmd_sample(cfg: RunConfig) -> int:
    curve = cfg.family()
    _check_box(curve, cfg.box)
    rows = sample_rows(curve, cfg.box, cfg.grid or (4, 8, 8))
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(_fmt17(v) for v in row) for row in rows)
    _write(cfg.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _check_box(curve, box: SampleBox) -> None:
    if box.w_abs is None:
        return
    lo, hi = box.w_abs
    c = curve.cfg
    bad = (c.epsilon == -1 and c.epsilon_tilde == 1 and hi >= 1) or \
          (c.epsilon == -1 and c.epsilon_tilde == -1 and lo <= 1)
    if bad:
        raise ConfigError(f"box.w_abs {box.w_abs} leaves the model domain of {curve.kind.value}")


def plot_svg(curve, theta: float, s: float, w_abs) -> str:
    """Principal curvatures and the ratio alpha^2/(beta^2+c) against |w|."""
    w_abs = np.asarray(w_abs, dtype=float)
    data = evaluate_batch(curve, np.full(w_abs.size, theta), np.full(w_abs.size, s),
                          w_abs.astype(complex))
    alpha, beta = data["alpha"], data["beta"]
    root = np.sqrt(alpha ** 2 + 4 * beta ** 2)
    kp, km = 0.5 * (alpha + root), 0.5 * (alpha - root)
    denom = beta ** 2 + curve.cfg.c
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(denom) >= 1e-12, alpha ** 2 / denom, np.nan)
    xs = w_abs.tolist()
    left = Panel("principal curvatures", "|w|", "curvature", [
        Series("kappa+", xs, kp.tolist()),
        Series("kappa-", xs, km.tolist()),
        Series("0", xs, [0.0] * len(xs), dashed=True),
    ])
    right = Panel("alpha^2 / (beta^2 + c)", "|w|", "ratio",
                  [Series("ratio", xs, ratio.tolist())])
    title = f"{curve.kind.value}  a = {curve.a:g}  r = {curve.r:g}  theta = {theta:g}  s = {s:g}"
    return render([left, right], title=title)


def cmd_plot(cfg: RunConfig) -> int:
    curve = cfg.family()
    _check_box(curve, cfg.box)
    n = (cfg.grid or (200,))[-1]
    lo, hi = cfg.box.w_abs or _sample_w_box(curve)
    s_lo, _ = cfg.box.s or (0.0, 0.0)
    svg = plot_svg(curve, cfg.box.theta[0], s_lo, _axis(lo, hi, n))
    _write(cfg.out, svg)
    return EXIT_OK


COMMANDS = {"families": cmd_families, "verify": cmd_verify, "sample": cmd_sample,
            "plot": cmd_plot}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="family kind, e.g. ch2-equidistant")
    p.add_argument("--a", type=float, help="family parameter")
    p.add_argument("--r", type=float, help="curvature radius (default 1)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.add_argument("--config", help="JSON run configuration; flags override it")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--tol-fd", type=float, dest="tol_fd", help="finite-difference tolerance")
    p.add_argument("--tol-alg", type=float, dest="tol_alg", help="algebraic tolerance")
    p.add_argument("--fd-step", type=float, dest="fd_step", help="finite-difference step")
    p.add_argument("--grid", help="grid counts NxMxK over (theta, s, |w|)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruledform",
                                     description="Ruled hypersurfaces in CP2 and CH2.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"families": "list the five families",
             "verify": "run the numerical verification suite",
             "sample": "write a CSV of geometry on a grid",
             "plot": "write an SVG of curvature profiles"}
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParameterRangeError) as exc:
        sys.stderr.write(f"ruledform: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
