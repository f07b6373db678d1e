"""Command-line interface: point-set generation, autocorrelation and
spectrum estimation, coincidence checks, random tilings, and closed-form
versus estimated spectrum comparisons.

Exit codes: 0 success, 2 validation error (bad arguments, missing files),
3 numeric-check failure in `compare`, 64 unknown subcommand.  Identical
configuration and seed produce byte-identical output files; floats are
written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import autocorr as ac
from . import cps, randomtiling as rt, spectrum as sp
from .core import (
    TAU,
    AperiodicaError,
    ModuleElement,
    read_comb_csv,
)
from .substitution import (
    SubstitutionRule,
    dekking_coincidence,
    mfs_from_substitution,
    modular_coincidence,
)

USAGE = """\
usage: aperiodica <command> [options]

commands:
  generate               model set from a scheme/window file
  autocorr               autocorrelation coefficients of a comb
  spectrum               periodogram (and Bragg peaks) of a comb
  coincide               Dekking / modular coincidence of a rule file
  randomtiling           sample, spectrum or heights of a 1D random tiling
  paperfolding-spectrum  closed-form paperfolding diffraction
  compare                closed form vs estimate, exit 3 on failure
"""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


@dataclass
class RunConfig:
    """Parsed invocation: subcommand, paths, numeric knobs, output format."""

    subcommand: str
    options: dict = field(default_factory=dict)

    @property
    def fmt(self) -> str:
        return self.options.get("format", "csv")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_table(path, columns, rows, fmt) -> None:
    """CSV (or mirrored JSON) with LF endings and 17-digit floats."""
    lines = []
    if fmt == "csv":
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        body = ",\n".join(
            "    [" + ", ".join(_fmt(v) for v in row) + "]" for row in rows)
        text = ('{\n  "columns": ' + json.dumps(list(columns)) +
                ',\n  "rows": [\n' + body + "\n  ]\n}\n")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_length(token: str):
    """Interval length: a number, or the golden-ratio token `tau`."""
    from fractions import Fraction

    if token == "tau":
        return ModuleElement(1, 0)
    return Fraction(token)


def _parse_probability(token: str) -> float:
    if token == "1/tau":
        return 1.0 / TAU
    if token == "1/tau^2":
        return 1.0 / TAU ** 2
    return float(token)


def _load_scheme(path):
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise AperiodicaError(f"scheme file not found: {path}")
    except json.JSONDecodeError as exc:
        raise AperiodicaError(f"scheme file is not valid JSON: {exc}")
    kind = spec.get("kind")
    if kind == "euclidean":
        scheme = cps.fibonacci_scheme()
        window = cps.EuclideanWindow(tuple((lo, hi) for lo, hi in spec["window"]))
        return scheme, window
    if kind == "qadic":
        q = int(spec.get("q", 2))
        scheme = cps.qadic_scheme(q)
        if "paperfolding" in spec:
            pf = spec["paperfolding"]
            windows = cps.paperfolding_windows(pf.get("fixed_point", "w1"))
            letters = pf.get("letters", ["a", "b"])
            window = windows[letters[0]]
            for letter in letters[1:]:
                window = window.union(windows[letter])
            return scheme, window
        window = cps.QAdicWindow(
            tuple((r, mod) for r, mod in spec.get("classes", [])),
            added=frozenset(spec.get("added", [])),
            removed=frozenset(spec.get("removed", [])),
            complete_below=spec.get("complete_below"),
        )
        return scheme, window
    raise AperiodicaError(f"unknown scheme kind {kind!r}")


def _require_file(path) -> None:
    if not Path(path).is_file():
        raise AperiodicaError(f"input file not found: {path}")


# -- subcommands ---------------------------------------------------------------

def _write_comb(comb, opts) -> None:
    rows = [(x, w.real, w.imag) for x, w in zip(comb.positions, comb.weights)]
    _write_table(opts.get("output"), ["x", "re_weight", "im_weight"], rows,
                 opts.get("format", "csv"))


def _cmd_generate(opts) -> int:
    scheme, window = _load_scheme(opts["scheme"])
    lo, hi = (float(t) for t in opts["region"].split(","))
    comb = cps.generate_model_set(scheme, window, (lo, hi))
    _write_comb(comb, opts)
    return EXIT_OK


def _cmd_autocorr(opts) -> int:
    _require_file(opts["input"])
    comb = read_comb_csv(opts["input"], radius=opts.get("radius"))
    est = ac.estimate_autocorrelation(comb, opts["max_diff"])
    rows = [(z, e.real, e.imag) for z, e in zip(est.diffs, est.eta)]
    _write_table(opts.get("output"), ["z", "re_eta", "im_eta"], rows,
                 opts.get("format", "csv"))
    return EXIT_OK


def _cmd_spectrum(opts) -> int:
    _require_file(opts["input"])
    comb = read_comb_csv(opts["input"], radius=opts.get("radius"))
    pgram = sp.periodogram(comb, opts.get("kmin", 0.0), opts["kmax"], opts.get("dk"))
    if opts.get("bragg") is not None:
        atoms = sp.bragg_extract(pgram, opts["bragg"])
        _write_table(opts.get("output"), ["k", "intensity"], atoms,
                     opts.get("format", "csv"))
    else:
        rows = list(zip(pgram.ks, pgram.values))
        _write_table(opts.get("output"), ["k", "value"], rows,
                     opts.get("format", "csv"))
    return EXIT_OK


def _cmd_coincide(opts) -> int:
    _require_file(opts["rule"])
    rule = SubstitutionRule.from_text(Path(opts["rule"]).read_text(encoding="utf-8"))
    verdict = modular_coincidence(mfs_from_substitution(rule),
                                  max_power=opts.get("max_power", 20))
    dk = dekking_coincidence(rule)
    print(str(verdict))
    if verdict.status == "coincident" and dk != verdict.power:
        print(f"warning: Dekking power {dk} disagrees with modular power")
    return EXIT_OK


def _cmd_randomtiling(opts) -> int:
    spec = rt.RandomTilingSpec(_parse_length(opts["u"]), _parse_length(opts["v"]),
                               _parse_probability(opts["p"]))
    fmt = opts.get("format", "csv")
    if opts.get("spectrum"):
        k_max = opts.get("kmax", 2.0)
        pp = rt.pp_part(spec, k_max)
        out = opts.get("output")
        pp_rows = [(k, i) for k, i in pp.pp_atoms]
        _write_table(f"{out}.pp.csv" if out else None, ["k", "intensity"],
                     pp_rows, fmt)
        dk = opts.get("dk", 0.01)
        ks = np.arange(0.0, k_max + dk / 2, dk)
        rows = list(zip(ks, rt.ac_density_grid(spec, ks)))
        _write_table(f"{out}.ac.csv" if out else None, ["k", "g"], rows, fmt)
        return EXIT_OK
    samp = rt.sample(spec, opts["intervals"], opts.get("seed", 0))
    if opts.get("heights"):
        if samp.heights is None:
            raise AperiodicaError("heights need module interval lengths (u = tau)")
        rows = list(zip(samp.endpoints, samp.heights))
        _write_table(opts.get("output"), ["x", "height"], rows, fmt)
        return EXIT_OK
    _write_comb(samp.comb, opts)
    return EXIT_OK


def _cmd_paperfolding_spectrum(opts) -> int:
    weights = [complex(t) for t in opts["weights"].split(",")]
    if len(weights) != 4:
        raise AperiodicaError("exactly four weights A,B,C,D are required")
    measure = sp.paperfolding_spectrum(*weights, r_max=opts.get("rmax", 8),
                                       k_range=(opts.get("kmin", 0.0),
                                                opts.get("kmax", 2.0)))
    rows = [(k, i) for k, i in measure.pp_atoms]
    _write_table(opts.get("output"), ["k", "intensity"], rows,
                 opts.get("format", "csv"))
    return EXIT_OK


def _compare_paperfolding(opts):
    from .paperfolding import binary_comb

    n = 1 << opts.get("log2n", 12)
    comb = binary_comb(n)
    ks = np.array([1.0, 0.25, 0.125, 0.0625])
    est = sp.bragg_amplitudes(comb, ks, taper="boxcar")
    ref = np.array([sp.paperfolding_intensity(1, 1, 0, 0, k) for k in ks])
    dev = np.abs(est - ref)
    return float(np.max(dev)), float(np.mean(dev)), "absolute", "max"


def _compare_fibonacci(opts):
    """Mean periodogram against the closed-form ac density; the estimator
    averages 8 local sub-offsets per k point (Hann taper, density
    normalization) and the gate is the mean relative deviation."""
    spec = rt.fibonacci_spec()
    seeds = opts.get("seeds", 20)
    intervals = opts.get("intervals", 2000)
    kpoints = opts.get("kpoints", 40)
    ks = np.linspace(0.1, 2.0, kpoints)
    g = rt.ac_density_grid(spec, ks)
    keep = _needle_free(spec, ks)
    offsets = (np.arange(8) - 3.5) * 2e-4
    kk = (ks[:, None] + offsets[None, :]).ravel()
    est = np.zeros(len(kk))
    for i in range(seeds):
        samp = rt.sample(spec, intervals, seed=opts.get("seed", 0) + i)
        est += sp.periodogram_values(samp.comb, kk, taper="hann",
                                     normalization="density")
    est /= seeds
    binned = est.reshape(len(ks), len(offsets)).mean(axis=1)
    rel = np.abs(binned[keep] - g[keep]) / g[keep]
    return float(np.max(rel)), float(np.mean(rel)), "relative", "mean"


def _needle_free(spec, ks, cut: float = 1.5, margin: float = 0.02):
    """Mask of k points away from the sharp peaks of the ac density."""
    fine = np.arange(max(np.min(ks) - 0.1, 0.01), np.max(ks) + 0.1, 1e-3)
    g = rt.ac_density_grid(spec, fine)
    needles = fine[g > cut]
    keep = np.ones(len(ks), dtype=bool)
    for nk in needles:
        keep &= np.abs(ks - nk) > margin
    return keep


def _compare_rational(opts):
    from fractions import Fraction

    spec = rt.RandomTilingSpec(Fraction(2), Fraction(1), 0.5)
    seeds = opts.get("seeds", 10)
    intervals = opts.get("intervals", 20000)
    ks = np.array([0.0, 1.0, 2.0])
    est = np.zeros(len(ks))
    for i in range(seeds):
        samp = rt.sample(spec, intervals, seed=opts.get("seed", 0) + i)
        est += sp.bragg_amplitudes(samp.comb, ks, taper="boxcar")
    est /= seeds
    ref = rt.density(spec) ** 2
    dev = np.abs(est - ref)
    return float(np.max(dev)), float(np.mean(dev)), "absolute", "max"


_COMPARE_MODELS = {
    "paperfolding-binary": _compare_paperfolding,
    "fibonacci-ac": _compare_fibonacci,
    "rational-pp": _compare_rational,
}


def _cmd_compare(opts) -> int:
    model = opts["model"]
    if model not in _COMPARE_MODELS:
        raise AperiodicaError(
            f"unknown model {model!r}; choose from {sorted(_COMPARE_MODELS)}")
    max_dev, mean_dev, kind, gate = _COMPARE_MODELS[model](opts)
    tol = opts["tolerance"]
    print(f"model {model}: max {kind} deviation {_fmt(max_dev)}, "
          f"mean {_fmt(mean_dev)}, tolerance {_fmt(tol)} on the {gate}")
    gated = max_dev if gate == "max" else mean_dev
    if gated > tol:
        print("comparison FAILED")
        return EXIT_NUMERIC
    print("comparison passed")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def _build_parsers():
    parsers = {}

    p = argparse.ArgumentParser(prog="aperiodica generate", add_help=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--region", required=True, help="a,b")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    parsers["generate"] = p

    p = argparse.ArgumentParser(prog="aperiodica autocorr")
    p.add_argument("--input", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--max-diff", dest="max_diff", type=float, required=True)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    parsers["autocorr"] = p

    p = argparse.ArgumentParser(prog="aperiodica spectrum")
    p.add_argument("--input", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, required=True)
    p.add_argument("--dk", type=float)
    p.add_argument("--bragg", type=float, help="threshold; emit atoms instead")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    parsers["spectrum"] = p

    p = argparse.ArgumentParser(prog="aperiodica coincide")
    p.add_argument("--rule", required=True)
    p.add_argument("--max-power", dest="max_power", type=int, default=20)
    parsers["coincide"] = p

    p = argparse.ArgumentParser(prog="aperiodica randomtiling")
    p.add_argument("--u", required=True, help="length or `tau`")
    p.add_argument("--v", required=True)
    p.add_argument("--p", required=True, help="probability, `1/tau` accepted")
    p.add_argument("--intervals", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spectrum", action="store_true",
                   help="emit closed-form pp and ac spectra")
    p.add_argument("--heights", action="store_true")
    p.add_argument("--kmax", type=float, default=2.0)
    p.add_argument("--dk", type=float, default=0.01)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    parsers["randomtiling"] = p

    p = argparse.ArgumentParser(prog="aperiodica paperfolding-spectrum")
    p.add_argument("--weights", required=True, help="A,B,C,D (complex accepted)")
    p.add_argument("--rmax", type=int, default=8)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=2.0)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    parsers["paperfolding-spectrum"] = p

    p = argparse.ArgumentParser(prog="aperiodica compare")
    p.add_argument("--model", required=True)
    p.add_argument("--tolerance", type=float, required=True)
    p.add_argument("--seeds", type=int)
    p.add_argument("--intervals", type=int)
    p.add_argument("--kpoints", type=int)
    p.add_argument("--log2n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    parsers["compare"] = p
    return parsers


_HANDLERS = {
    "generate": _cmd_generate,
    "autocorr": _cmd_autocorr,
    "spectrum": _cmd_spectrum,
    "coincide": _cmd_coincide,
    "randomtiling": _cmd_randomtiling,
    "paperfolding-spectrum": _cmd_paperfolding_spectrum,
    "compare": _cmd_compare,
}


def run(config: RunConfig) -> int:
    """Dispatch a parsed configuration; returns the process exit status."""
    handler = _HANDLERS.get(config.subcommand)
    if handler is None:
        sys.stderr.write(USAGE)
        return EXIT_USAGE
    threads = config.options.get("threads")
    if threads is not None and threads < 1:
        raise AperiodicaError("--threads must be at least 1")
    return handler(config.options)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return EXIT_OK if argv else EXIT_USAGE
    sub, rest = argv[0], argv[1:]
    parsers = _build_parsers()
    if sub not in parsers:
        sys.stderr.write(f"unknown subcommand: {sub}\n")
        sys.stderr.write(USAGE)
        return EXIT_USAGE
    try:
        ns = parsers[sub].parse_args(rest)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    options = {k: v for k, v in vars(ns).items() if v is not None}
    config = RunConfig(sub, options)
    try:
        return run(config)
    except AperiodicaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
