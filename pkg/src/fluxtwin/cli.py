"""``fluxtwin`` command line.

Every subcommand reads an optional JSON config (``--config``), applies flag
overrides, validates, and writes one JSON document or one CSV table to
stdout or ``--out``. Exit status: 0 on success, 1 when a numerical check or
computation fails (a JSON report goes to stderr), 2 on bad configuration
or input.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, coords, gauge, kernel, output, spectral, twin, verify
from .config import RunConfig
from .errors import ConfigError, FluxTwinError, InvalidGeometryError, InvalidWordError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Result:
    """A command's JSON document plus its CSV table.

    ``meta`` is the CSV ``#`` header (defaults to the scalar part of
    ``doc``); a nonempty ``failures`` list turns the exit status to 1.
    """

    def __init__(self, doc: dict, columns=None, rows=None, meta=None, failures=None):
        self.doc = doc
        self.columns = columns
        self.rows = rows
        self.meta = meta
        self.failures = failures or []


# ---------------------------------------------------------------- parsing


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--alpha", type=float, help="uniform flux for every triple (overrides a config flux map)")
    g.add_argument("--masses", type=_floats, help="comma-separated particle masses")
    g.add_argument("--grid-n", type=int, dest="grid_n", help="ring grid size N")
    g.add_argument("--format", choices=("json", "csv"), help="output format")
    g.add_argument("--out", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="fluxtwin", description="Twisted boundary conditions and flux gauge fields for three-body contacts on the line.")
    ap.add_argument("--version", action="version", version=f"fluxtwin {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    p = add("reduce", "normal form of a twin-group word")
    p.add_argument("--word", required=True, help='comma-separated generator indices, e.g. "1,2,1"')
    p.add_argument("--n", type=int, help="strand count (default: inferred)")

    p = add("perm", "permutation induced by a twin-group word")
    p.add_argument("--word", required=True)
    p.add_argument("--n", type=int)

    p = add("winding", "triple winding numbers of a pure word")
    p.add_argument("--word", required=True)
    p.add_argument("--spacing", type=float, default=1.0)

    p = add("potential", "gauge potential at a configuration")
    p.add_argument("--point", type=_floats, required=True, help="x1,...,xn")

    for name, help_ in (("wilson", "Wilson line or loop value"), ("flux", "circulation of the gauge potential around a loop")):
        p = add(name, help_)
        p.add_argument("--loop", choices=("circle", "word", "path"), default="circle")
        p.add_argument("--turns", type=int, default=1, help="circle: signed number of turns")
        p.add_argument("--triple", type=_ints, default=[1, 2, 3], help="circle: triple whose plane holds the loop")
        p.add_argument("--center", type=_floats, default=[0.0, 0.0], help="circle: centre in the relative plane")
        p.add_argument("--radius", type=float, default=1.0, dest="loop_radius", help="circle: radius")
        p.add_argument("--points", type=int, default=64, help="circle: vertices per turn")
        p.add_argument("--word", help="word: pure twin word")
        p.add_argument("--path", help="path: trajectory CSV (open paths give a Wilson line)")

    p = add("kernel", "ring propagator table on a theta grid")
    p.add_argument("--method", choices=sorted(kernel.KERNEL_METHODS), default="covering")
    p.add_argument("--tau", type=float, help="evolution time")
    p.add_argument("--time-mode", choices=("imaginary", "real"), dest="time_mode")
    p.add_argument("--n-theta", type=int, dest="n_theta")
    p.add_argument("--strict", action="store_true", help="fail instead of warning on a large tail")

    p = add("spectrum", "ring or radial spectrum")
    p.add_argument("--geometry", choices=("ring", "radial"), default="ring")
    p.add_argument("--bc", choices=(spectral.TWISTED, spectral.GAUGE), default=spectral.TWISTED)
    p.add_argument("--levels", type=int)
    p.add_argument("--nu", type=float)

    p = add("verify", "run the invariant suite")
    p.add_argument("--suite", choices=("all", *verify.SUITES), default="all")

    p = add("sweep", "ring spectra over alpha x grid size")
    p.add_argument("--sweep-alpha", type=_floats, dest="sweep_alpha")
    p.add_argument("--sweep-grid", type=_ints, dest="sweep_grid")
    p.add_argument("--levels", type=int)
    return ap


def load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "alpha", None) is not None:
        cfg.alpha = args.alpha
        cfg.flux = None
    for name in ("masses", "grid_n", "format", "out", "tau", "time_mode", "n_theta", "levels", "nu",
                 "sweep_alpha", "sweep_grid"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    return cfg.validate()


def _system(cfg: RunConfig, n: int | None = None) -> coords.MassSystem:
    masses = cfg.masses
    if n is not None and n != len(masses):
        if cfg.masses == [1.0] * len(cfg.masses):
            masses = [1.0] * n  # unit masses stretch to the word's strand count
        else:
            raise ConfigError(f"{len(masses)} masses given for a {n}-particle problem")
    return coords.MassSystem(tuple(masses), cfg.mu0)


def _flux(cfg: RunConfig, n: int) -> gauge.FluxSet:
    if cfg.flux is None:
        return gauge.FluxSet.uniform(n, cfg.alpha)
    try:
        return gauge.FluxSet.from_mapping(cfg.flux, n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad flux map: {exc}") from exc


def _word(args, n=None) -> twin.TwinWord:
    return twin.TwinWord.parse(args.word, n)


# ---------------------------------------------------------------- commands


def cmd_reduce(args, cfg):
    w = _word(args, args.n)
    r = twin.reduce_word(w)
    doc = {"n": w.n, "word": str(w), "reduced": str(r), "letters": list(r.letters), "length": len(r)}
    return Result(doc, ("word", "reduced", "length"), [(str(w), str(r), len(r))])


def cmd_perm(args, cfg):
    w = _word(args, args.n)
    p = twin.induced_permutation(w)
    doc = {"n": w.n, "word": str(w), "images": list(p.images), "cycles": str(p), "pure": p.is_identity()}
    rows = [(i + 1, img) for i, img in enumerate(p.images)]
    return Result(doc, ("slot", "image"), rows)


def cmd_winding(args, cfg):
    n = len(cfg.masses)
    w = twin.TwinWord.parse(args.word, n)
    ms = _system(cfg, w.n)
    if not twin.is_pure(w):
        raise InvalidWordError(f"word {w} is not pure; it induces {twin.induced_permutation(w)}")
    wind = twin.word_windings(w, ms, args.spacing, eps=cfg.epsilon)
    doc = {"word": str(w), "masses": list(ms.m), "windings": {_tkey(t): k for t, k in wind.items()}}
    return Result(doc, ("triple", "winding"), [(_tkey(t), k) for t, k in wind.items()])


def cmd_potential(args, cfg):
    ms = _system(cfg, len(args.point))
    fs = _flux(cfg, ms.n)
    a = gauge.gauge_potential(ms, fs, args.point, cfg.hbar, cfg.epsilon)
    doc = {"point": args.point, "flux": _flux_doc(fs), "potential": a, "sum": math.fsum(a)}
    return Result(doc, ("component", "value"), [(i + 1, float(v)) for i, v in enumerate(a)])


def _loop(args, cfg):
    if args.loop == "circle":
        if len(args.center) != 2:
            raise ConfigError("--center takes two numbers")
        n = max(len(cfg.masses), max(args.triple))
        ms = _system(cfg, n)
        t = coords.check_triple(tuple(args.triple), ms.n)
        path = coords.relative_loop(ms, t, tuple(args.center), args.loop_radius, args.turns, args.points)
        return ms, path, {"loop": "circle", "triple": list(t), "turns": args.turns,
                          "center": args.center, "radius": args.loop_radius}
    if args.loop == "word":
        if not args.word:
            raise ConfigError("--loop word needs --word")
        w = twin.TwinWord.parse(args.word, len(cfg.masses))
        ms = _system(cfg, w.n)
        if not twin.is_pure(w):
            raise InvalidWordError(f"word {w} is not pure")
        return ms, twin.word_to_trajectory(w), {"loop": "word", "word": str(w)}
    if not args.path:
        raise ConfigError("--loop path needs --path")
    try:
        with open(args.path) as fh:
            path = coords.Trajectory.from_csv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.path}: {exc}") from exc
    return _system(cfg, path.n), path, {"loop": "path", "path": args.path}


def cmd_wilson(args, cfg):
    ms, path, info = _loop(args, cfg)
    fs = _flux(cfg, ms.n)
    doc = dict(info, flux=_flux_doc(fs))
    if path.is_closed():
        z = gauge.wilson_loop(ms, fs, path, cfg.epsilon)
        w = twin.winding_numbers(path, ms, eps=cfg.epsilon)
        doc["kind"] = "loop"
        doc["windings"] = {_tkey(t): k for t, k in w.items()}
        doc["representation"] = output.phase_record(gauge.rep_phase_value(fs, w))
    else:
        z = gauge.wilson_line(ms, fs, path, cfg.epsilon)
        doc["kind"] = "line"
    doc["value"] = output.phase_record(z)
    q = gauge.line_integral_quadrature(ms, fs, path, hbar=cfg.hbar, eps=cfg.epsilon) / cfg.hbar
    doc["quadrature"] = output.phase_record(complex(math.cos(q), math.sin(q)))
    rec = doc["value"]
    return Result(doc, ("re", "im", "abs", "phase_rad", "phase_turns"),
                  [tuple(rec[k] for k in ("re", "im", "abs", "phase_rad", "phase_turns"))])


def cmd_flux(args, cfg):
    ms, path, info = _loop(args, cfg)
    fs = _flux(cfg, ms.n)
    circ = gauge.loop_flux(ms, fs, path, cfg.hbar, cfg.epsilon)
    quad = gauge.line_integral_quadrature(ms, fs, path, hbar=cfg.hbar, eps=cfg.epsilon)
    unit = 2.0 * math.pi * cfg.hbar
    doc = dict(info, flux=_flux_doc(fs), circulation=circ, circulation_turns=circ / unit,
               quadrature=quad, quadrature_turns=quad / unit)
    return Result(doc, ("circulation", "circulation_turns", "quadrature", "quadrature_turns"),
                  [(circ, circ / unit, quad, quad / unit)])


def cmd_kernel(args, cfg):
    spec = kernel.KernelSpec(mu=cfg.mu, radius=cfg.radius, time=cfg.tau, mode=cfg.time_mode,
                             alpha=cfg.alpha, n_wind=cfg.n_wind, n_modes=cfg.n_modes,
                             hbar=cfg.hbar, strict=args.strict)
    table = kernel.kernel_table(spec, cfg.n_theta, args.method)
    doc = dict(table.metadata(), hermitian=table.is_hermitian(), thetas=table.thetas,
               re=table.values.real, im=table.values.imag)
    rows = [(th, thp, table.values[a, b].real, table.values[a, b].imag)
            for a, th in enumerate(table.thetas) for b, thp in enumerate(table.thetas)]
    return Result(doc, ("theta", "theta_prime", "re", "im"), rows, table.metadata())


def cmd_spectrum(args, cfg):
    k = cfg.levels
    if args.geometry == "ring":
        g = spectral.RingGrid(cfg.grid_n, cfg.radius, cfg.mu, cfg.alpha, args.bc, cfg.hbar)
        st = spectral.spectrum(spectral.build_ring_hamiltonian(g), k)
        exact = spectral.ring_levels_analytic(cfg.mu, cfg.radius, cfg.alpha, k + 1, cfg.hbar).energies[: st.k]
        meta = {"geometry": "ring", "N": g.N, "r": g.r, "mu": g.mu, "alpha": g.alpha, "bc": g.bc_kind,
                "hbar": g.hbar, "paired": st.is_paired()}
    else:
        g = spectral.RadialGrid(cfg.radial_m, cfg.radial_r, cfg.nu, cfg.mu, cfg.hbar)
        st = spectral.radial_spectrum(g, k)
        exact = spectral.disk_levels_analytic(cfg.mu, cfg.radial_r, cfg.nu, st.k, cfg.hbar).energies
        meta = {"geometry": "radial", "M": g.M, "R": g.R, "nu": g.nu, "mu": g.mu, "hbar": g.hbar,
                "inner": g.inner}
    doc = dict(meta, energies=st.energies, residuals=st.residuals, analytic=exact)
    rows = [(i, float(e), float(r), float(x)) for i, (e, r, x) in enumerate(zip(st.energies, st.residuals, exact))]
    return Result(doc, ("index", "energy", "residual", "analytic"), rows, meta)


def cmd_verify(args, cfg):
    checks = verify.run(args.suite)
    doc = {"suite": args.suite, "passed": all(c.passed for c in checks),
           "checks": [c.as_dict() for c in checks]}
    rows = [(c.suite, c.name, c.passed, c.value, c.tolerance) for c in checks]
    return Result(doc, ("suite", "name", "passed", "value", "tolerance"), rows,
                  {"suite": args.suite, "passed": doc["passed"]},
                  [c.as_dict() for c in checks if not c.passed])


SWEEP_COLUMNS = ("index", "alpha", "N", "status", "ground", "max_abs_error", "degenerate", "error")


def _sweep_task(cfg, alpha, N):
    try:
        g = spectral.RingGrid(N, cfg.radius, cfg.mu, alpha, spectral.TWISTED, cfg.hbar)
        st = spectral.spectrum(spectral.build_ring_hamiltonian(g), min(cfg.levels, N))
        exact = spectral.ring_levels_analytic(cfg.mu, cfg.radius, alpha, cfg.levels + 1, cfg.hbar).energies[: st.k]
        err = float(np.max(np.abs(st.energies - exact)))
        paired = bool(st.is_paired()) if st.k % 2 == 0 else bool(spectral.SpectrumTable(st.energies[:-1]).is_paired())
        return ("ok", float(st.energies[0]), err, paired, "")
    except Exception as exc:  # a failed task marks its row and the sweep carries on
        return ("failed", float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}")


def _threads() -> int:
    raw = os.environ.get("FLUXTWIN_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise ConfigError(f"FLUXTWIN_THREADS must be an integer, got {raw!r}") from None
    return max(1, cap)


def cmd_sweep(args, cfg):
    if not cfg.sweep_alpha or not cfg.sweep_grid:
        raise UsageError("sweep needs nonempty --sweep-alpha and --sweep-grid (or config sweep_alpha, sweep_grid)")
    tasks = [(a, N) for a in cfg.sweep_alpha for N in cfg.sweep_grid]
    with ThreadPoolExecutor(max_workers=min(_threads(), len(tasks))) as pool:
        results = list(pool.map(lambda t: _sweep_task(cfg, *t), tasks))
    rows = [(i, a, N, *r) for i, ((a, N), r) in enumerate(zip(tasks, results))]
    meta = {"r": cfg.radius, "mu": cfg.mu, "hbar": cfg.hbar, "levels": cfg.levels, "bc": spectral.TWISTED}
    doc = dict(meta, rows=[dict(zip(SWEEP_COLUMNS, r)) for r in rows])
    failures = [dict(zip(SWEEP_COLUMNS, r)) for r in rows if r[3] != "ok"]
    return Result(doc, SWEEP_COLUMNS, rows, meta, failures)


COMMANDS = {
    "reduce": cmd_reduce,
    "perm": cmd_perm,
    "winding": cmd_winding,
    "potential": cmd_potential,
    "wilson": cmd_wilson,
    "flux": cmd_flux,
    "kernel": cmd_kernel,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------- output


def _tkey(t) -> str:
    return "[" + ",".join(str(v) for v in t) + "]"


def _flux_doc(fs: gauge.FluxSet) -> dict:
    return {_tkey(t): a for t, a in fs.alpha.items()}


def render(res: Result, fmt: str) -> str:
    if fmt == "json":
        return output.dumps_json(res.doc)
    meta = res.meta
    if meta is None:
        meta = {k: v for k, v in res.doc.items() if not isinstance(v, (list, np.ndarray))}
    return output.dumps_csv(res.columns, res.rows, meta)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(command, kind, message, failures=None):
    doc = {"status": "failed", "command": command, "error": kind, "message": message}
    if failures is not None:
        doc["failures"] = failures
    sys.stderr.write(output.dumps_json(doc))


def run_subcommand(name: str, args, cfg: RunConfig) -> int:
    res = COMMANDS[name](args, cfg)
    _emit(render(res, cfg.format), cfg.out)
    if res.failures:
        _report(name, "CheckFailed", f"{len(res.failures)} check(s) failed", res.failures)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        return run_subcommand(args.command, args, cfg)
    except (ConfigError, UsageError, InvalidWordError, InvalidGeometryError) as exc:
        _report(args.command, type(exc).__name__, str(exc))
        return EXIT_USAGE
    except (FluxTwinError, ValueError, ArithmeticError) as exc:
        _report(args.command, type(exc).__name__, str(exc))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
