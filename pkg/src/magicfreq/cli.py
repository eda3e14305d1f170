"""Command-line front end: plot-ready CSV/JSON for every engine capability.

Subcommands
-----------
sweep       sublevel absorption rates vs detuning (CSV/JSON)
surface     normalized sublevel spread on a theta x detuning grid (CSV/JSON)
magic       locate magic detunings and report robustness figures (JSON/CSV)
moments     decompose a density-matrix JSON file into polarization moments
to-density  rebuild a density matrix from a moments JSON file

Frequencies are MHz on the command line and in all output files; the
engine works in Hz internally.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .absorption import Geometry, gamma_rel_profile, s_f, surface
from .angular import HalfInt
from .atomdata import SpeciesFileError, bundled_names, load_bundled, load_species
from .lineshape import BroadeningModel
from .magic import find_magic_frequencies
from .moments import (
    DensityMatrix,
    density_to_moments,
    moments_from_json,
    moments_to_density,
    moments_to_json,
)

MHZ = 1e6


class ConfigError(ValueError):
    """Bad command-line configuration; exits with status 2."""


def _fmt(x: float) -> str:
    """Fixed 12-significant-digit formatting for reproducible output."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".12g")


def _resolve_species(name: str):
    if name in bundled_names():
        return load_bundled(name)
    path = Path(name)
    if path.is_file():
        return load_species(path)
    raise ConfigError(
        f"--species: {name!r} is neither a bundled name "
        f"({', '.join(bundled_names())}) nor an existing file"
    )


def _parse_scan(text: str) -> tuple[float, float]:
    try:
        lo_text, _, hi_text = text.partition(":")
        lo, hi = float(lo_text), float(hi_text)
    except ValueError:
        raise ConfigError(f"--scan-mhz: expected lo:hi, got {text!r}") from None
    if not lo < hi:
        raise ConfigError(f"--scan-mhz: need lo < hi, got {text!r}")
    return lo * MHZ, hi * MHZ


def _broadening(args) -> BroadeningModel:
    if args.temp_k <= 0:
        raise ConfigError(f"--temp-k: must be positive, got {args.temp_k}")
    if args.broadening == "doppler":
        if args.gamma_mhz or args.shift_mhz:
            raise ConfigError(
                "--gamma-mhz/--shift-mhz: only meaningful with --broadening voigt"
            )
        return BroadeningModel.doppler(args.temp_k)
    if args.gamma_mhz < 0:
        raise ConfigError(f"--gamma-mhz: must be >= 0, got {args.gamma_mhz}")
    return BroadeningModel.voigt(args.temp_k, args.gamma_mhz * MHZ, args.shift_mhz * MHZ)


def _ground_f(args, line) -> HalfInt:
    try:
        F = HalfInt.of(args.f)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"--f: {exc}") from None
    if F not in line.ground_f_values():
        raise ConfigError(
            f"--f: {args.f} is not a ground level of {line.name} "
            f"(valid: {[str(v) for v in line.ground_f_values()]})"
        )
    return F


def _config_comment(args, line, fields: dict) -> str:
    entries = [f"species={line.name}", f"provenance={line.provenance}"]
    entries += [f"{key}={value}" for key, value in sorted(fields.items())]
    return "# config: " + " ".join(entries)


def _write(text: str, out_path: str | None) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _emit_table(header_comment, columns, rows, fmt, out_path):
    if fmt == "csv":
        lines = [header_comment, ",".join(columns)]
        lines += [",".join(_fmt(cell) for cell in row) for row in rows]
        _write("\n".join(lines) + "\n", out_path)
    else:
        payload = {
            "config": header_comment.removeprefix("# config: "),
            "columns": list(columns),
            "rows": [[float(_fmt(cell)) for cell in row] for row in rows],
        }
        _write(json.dumps(payload, indent=1, sort_keys=True) + "\n", out_path)


def _cmd_sweep(args) -> int:
    line = _resolve_species(args.species)
    model = _broadening(args)
    F = _ground_f(args, line)
    lo, hi = _parse_scan(args.scan_mhz)
    if args.grid_mhz <= 0:
        raise ConfigError(f"--grid-mhz: must be positive, got {args.grid_mhz}")
    grid = np.arange(lo, hi + args.grid_mhz * MHZ * 0.5, args.grid_mhz * MHZ)
    geometry = Geometry(args.theta, args.phi)
    profile = gamma_rel_profile(line, F, grid, geometry, model)
    sf = s_f(line, F, grid, model)

    columns = ["delta_l_mhz"]
    columns += [f"gamma_rel_m={str(m)}" for m in profile.m_values()]
    columns += ["s_f"]
    rows = [
        [grid[i] / MHZ, *profile.rates[:, i], sf[i]]
        for i in range(len(grid))
    ]
    comment = _config_comment(
        args,
        line,
        {
            "command": "sweep",
            "f": str(F),
            "temp_k": args.temp_k,
            "broadening": args.broadening,
            "gamma_mhz": args.gamma_mhz,
            "shift_mhz": args.shift_mhz,
            "scan_mhz": args.scan_mhz,
            "grid_mhz": args.grid_mhz,
            "theta": args.theta,
            "phi": args.phi,
        },
    )
    _emit_table(comment, columns, rows, args.format, args.out)
    return 0


def _cmd_surface(args) -> int:
    line = _resolve_species(args.species)
    model = _broadening(args)
    F = _ground_f(args, line)
    lo, hi = _parse_scan(args.scan_mhz)
    if args.grid_mhz <= 0:
        raise ConfigError(f"--grid-mhz: must be positive, got {args.grid_mhz}")
    if args.theta_points < 1:
        raise ConfigError(f"--theta-points: must be >= 1, got {args.theta_points}")
    deltas = np.arange(lo, hi + args.grid_mhz * MHZ * 0.5, args.grid_mhz * MHZ)
    thetas = np.linspace(0.0, math.pi, args.theta_points)
    if deltas.size == 0:
        raise ConfigError("--scan-mhz/--grid-mhz: empty detuning grid")
    dg, sf, _ = surface(line, F, thetas, deltas, args.phi, model)

    columns = ["theta_rad", "delta_l_mhz", "delta_gamma", "s_f"]
    rows = [
        [thetas[i], deltas[j] / MHZ, dg[i, j], sf[j]]
        for i in range(len(thetas))
        for j in range(len(deltas))
    ]
    comment = _config_comment(
        args,
        line,
        {
            "command": "surface",
            "f": str(F),
            "temp_k": args.temp_k,
            "broadening": args.broadening,
            "gamma_mhz": args.gamma_mhz,
            "shift_mhz": args.shift_mhz,
            "scan_mhz": args.scan_mhz,
            "grid_mhz": args.grid_mhz,
            "theta_points": args.theta_points,
            "phi": args.phi,
        },
    )
    _emit_table(comment, columns, rows, args.format, args.out)
    return 0


def _cmd_magic(args) -> int:
    line = _resolve_species(args.species)
    model = _broadening(args)
    F = _ground_f(args, line)
    scan = _parse_scan(args.scan_mhz)
    results = find_magic_frequencies(line, F, model, scan)
    entries = [
        {
            "delta_l_magic_mhz": float(_fmt(r.delta_l_magic_hz / MHZ)),
            "s_f": float(_fmt(r.s_f_at_magic)),
            "window_halfwidth_mhz": float(_fmt(r.window_halfwidth_hz / MHZ)),
            "temp_sensitivity_khz_per_k": float(_fmt(r.temp_sensitivity_hz_per_k / 1e3)),
            "bracket_mhz": [
                float(_fmt(r.bracket_hz[0] / MHZ)),
                float(_fmt(r.bracket_hz[1] / MHZ)),
            ],
        }
        for r in results
    ]
    config = {
        "command": "magic",
        "species": line.name,
        "provenance": line.provenance,
        "f": str(F),
        "temp_k": args.temp_k,
        "broadening": args.broadening,
        "gamma_mhz": args.gamma_mhz,
        "shift_mhz": args.shift_mhz,
        "scan_mhz": args.scan_mhz,
    }
    if args.format == "json":
        _write(
            json.dumps({"config": config, "results": entries}, indent=1, sort_keys=True)
            + "\n",
            args.out,
        )
    else:
        columns = [
            "delta_l_magic_mhz",
            "s_f",
            "window_halfwidth_mhz",
            "temp_sensitivity_khz_per_k",
            "bracket_lo_mhz",
            "bracket_hi_mhz",
        ]
        rows = [
            [
                e["delta_l_magic_mhz"],
                e["s_f"],
                e["window_halfwidth_mhz"],
                e["temp_sensitivity_khz_per_k"],
                e["bracket_mhz"][0],
                e["bracket_mhz"][1],
            ]
            for e in entries
        ]
        comment = "# config: " + " ".join(
            f"{k}={v}" for k, v in sorted(config.items())
        )
        _emit_table(comment, columns, rows, "csv", args.out)
    return 0


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"input file {path!r} does not exist")
    return file.read_text(encoding="utf-8")


def _cmd_moments(args) -> int:
    try:
        rho = DensityMatrix.from_json(_read_input(args.input))
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"input: {exc}") from None
    moments = density_to_moments(rho)
    _write(moments_to_json(rho.F, moments) + "\n", args.out)
    return 0


def _cmd_to_density(args) -> int:
    try:
        F, moments = moments_from_json(_read_input(args.input))
        rho = moments_to_density(moments, F)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"input: {exc}") from None
    _write(rho.to_json() + "\n", args.out)
    return 0


def _add_engine_options(parser, *, need_geometry: bool) -> None:
    parser.add_argument("--species", required=True,
                        help="bundled dataset name or path to a species file")
    parser.add_argument("--f", required=True, help='ground hyperfine level, e.g. "2"')
    parser.add_argument("--temp-k", type=float, default=295.0, help="vapor temperature [K]")
    parser.add_argument("--broadening", choices=("doppler", "voigt"), default="doppler")
    parser.add_argument("--gamma-mhz", type=float, default=0.0,
                        help="Lorentzian HWHM for voigt [MHz]")
    parser.add_argument("--shift-mhz", type=float, default=0.0,
                        help="uniform pressure shift for voigt [MHz]")
    parser.add_argument("--scan-mhz", default="-600:600", metavar="LO:HI",
                        help="detuning range [MHz]")
    if need_geometry:
        parser.add_argument("--theta", type=float, default=math.pi / 2,
                            help="angle between B and k [rad]")
        parser.add_argument("--phi", type=float, default=0.0,
                            help="angle between E and the B-k plane [rad]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magicfreq",
        description="Zeeman-sublevel-resolved alkali D-line absorption and "
        "magic-frequency search (frequencies in MHz; see FORMATS.md).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="sublevel rates vs detuning")
    _add_engine_options(p_sweep, need_geometry=True)
    p_sweep.add_argument("--grid-mhz", type=float, default=1.0)
    p_sweep.add_argument("--out", default=None, help="output path (default stdout)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_surface = sub.add_parser("surface", help="sublevel spread vs (theta, detuning)")
    _add_engine_options(p_surface, need_geometry=False)
    p_surface.add_argument("--phi", type=float, default=0.0)
    p_surface.add_argument("--grid-mhz", type=float, default=5.0)
    p_surface.add_argument("--theta-points", type=int, default=33)
    p_surface.add_argument("--out", default=None)
    p_surface.add_argument("--format", choices=("csv", "json"), default="csv")
    p_surface.set_defaults(func=_cmd_surface)

    p_magic = sub.add_parser("magic", help="locate magic detunings")
    _add_engine_options(p_magic, need_geometry=False)
    p_magic.add_argument("--out", default=None)
    p_magic.add_argument("--format", choices=("json", "csv"), default="json")
    p_magic.set_defaults(func=_cmd_magic)

    p_moments = sub.add_parser("moments", help="density matrix -> moments")
    p_moments.add_argument("input", help="density-matrix JSON file, or - for stdin")
    p_moments.add_argument("--out", default=None)
    p_moments.set_defaults(func=_cmd_moments)

    p_density = sub.add_parser("to-density", help="moments -> density matrix")
    p_density.add_argument("input", help="moments JSON file, or - for stdin")
    p_density.add_argument("--out", default=None)
    p_density.set_defaults(func=_cmd_to_density)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpeciesFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
