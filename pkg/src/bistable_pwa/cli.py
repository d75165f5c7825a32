"""Command-line driver: configuration, orchestration, artifact export.

Subcommands: ``kernel``, ``era``, ``branches``, ``loci``, ``sweep``,
``basins``, ``design-map``, ``power-map``.  Every run writes its artifacts
plus a ``manifest.json`` (config hash, package versions, timings) into the
output directory.  Identical configurations produce byte-identical CSVs.

Configuration is flat ``key=value`` text; command-line flags take
precedence over the config file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .params import BuoyGeometry, NondimParams

__all__ = ["main"]


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """Parse ``lo..hi:step`` (inclusive endpoints) or a single number."""
    if ".." in spec:
        head, _, step_s = spec.partition(":")
        lo_s, _, hi_s = head.partition("..")
        if not step_s:
            raise ValueError(f"grid '{spec}' is missing ':step'")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
        if step <= 0.0 or hi < lo:
            raise ValueError(f"invalid grid '{spec}'")
        n = int(round((hi - lo) / step))
        return lo + step * np.arange(n + 1)
    return np.array([float(spec)])


def load_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; blank lines ignored."""
    out = {}
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value")
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


_PARAM_KEYS = ("delta1", "delta2", "omega_n", "gamma", "theta")


def build_params(opts: dict) -> NondimParams:
    kw = {k: float(opts[k]) for k in _PARAM_KEYS if opts.get(k) is not None}
    return NondimParams(**kw)


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge config file and CLI flags (flags win)."""
    opts = {}
    if getattr(args, "config", None):
        opts.update(load_config(args.config))
    for k, v in vars(args).items():
        if k in ("config", "func", "command") or v is None:
            continue
        opts[k] = v
    return opts


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else f"{x:.10g}"
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def write_gnuplot(path: Path, lines):
    path.write_text("\n".join(lines) + "\n")


def config_hash(opts: dict) -> str:
    canon = json.dumps({k: str(v) for k, v in sorted(opts.items())},
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


class Run:
    """Artifact bookkeeping for one CLI invocation."""

    def __init__(self, opts: dict, outdir: str):
        self.opts = opts
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.timings = {}
        self.extra = {}
        self.t0 = time.time()

    def timed(self, name):
        run = self

        class _Timer:
            def __enter__(self):
                self.start = time.time()

            def __exit__(self, *exc):
                run.timings[name] = round(time.time() - self.start, 3)

        return _Timer()

    def finish(self):
        import numba
        import scipy

        manifest = {
            "config": {k: str(v) for k, v in sorted(self.opts.items())},
            "config_hash": config_hash(self.opts),
            "versions": {
                "bistable_pwa": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "numba": numba.__version__,
            },
            "timings_s": self.timings,
            "total_s": round(time.time() - self.t0, 3),
        }
        manifest.update(self.extra)
        with open(self.outdir / "manifest.json", "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_kernel(args):
    from .hydro import (impulse_response, impulse_response_realized,
                        radiation_damping)

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("kernel"):
        t = np.arange(0.0, 20.0 + 1e-9, float(opts.get("dt", 0.05)))
        h = impulse_response(t, p.kernel)
        hr = impulse_response_realized(t, p.kernel)
        write_csv(run.outdir / "impulse.csv", ["t", "hbar", "hbar_realized"],
                  zip(t, h, hr))
        om = np.arange(0.01, 8.0 + 1e-9, 0.01)
        B = [radiation_damping(w, p.kernel) for w in om]
        write_csv(run.outdir / "damping.csv", ["Omega", "B"], zip(om, B))
        run.extra["max_abs_gap"] = float(np.max(np.abs(h - hr)))
    run.finish()
    return 0


def cmd_era(args):
    from .era import ImpulseSequence, era_pipeline
    from .hydro import ogilvie_kernel

    opts = resolve_options(args)
    run = Run(opts, args.out)
    with run.timed("era"):
        dt = float(opts.get("dt", 0.05))
        if opts.get("impulse"):
            data = np.loadtxt(opts["impulse"], delimiter=",", skiprows=1)
            t, y = data[:, 0], data[:, 1]
            dt = float(t[1] - t[0])
        else:
            t = np.arange(0.0, 20.0 + 1e-9, dt)
            y = ogilvie_kernel(t)
        seq = ImpulseSequence(dt=dt, samples=np.asarray(y))
        real, report = era_pipeline(
            seq,
            r=int(opts["r"]) if opts.get("r") else None,
            s=int(opts["s"]) if opts.get("s") else None,
            order=int(opts.get("order", 3)))
        out = {
            "A": real.A.tolist(),
            "B": real.B.tolist(),
            "C": real.C.tolist(),
            "eigenvalues": [[z.real, z.imag]
                            for z in np.sort_complex(report["eigenvalues"])],
            "max_abs_error": report["max_abs_error"],
            "passed": report["passed"],
            "singular_values": np.asarray(report["singular_values"]).tolist(),
        }
        with open(run.outdir / "realization.json", "w") as f:
            json.dump(out, f, indent=2)
            f.write("\n")
    run.finish()
    return 0 if report["passed"] else 1


def cmd_branches(args):
    from .mms import branch_sweep

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("branches"):
        om = parse_grid(str(opts.get("omega", "0.2..2:0.01")))
        amp = float(opts.get("amp", 0.1))
        rows = branch_sweep(om, amp, p)
        write_csv(run.outdir / "branches.csv",
                  ["Omega", "branch", "a0", "psi0", "stable", "P_avg", "CWR"],
                  [(r["Omega"], r["branch"], r["a0"], r["psi0"], r["stable"],
                    r["P_avg"], r["CWR"]) for r in rows])
    run.finish()
    return 0


def cmd_loci(args):
    from .bifurcation import cf1_locus, cf_intrawell_locus, pd_locus, sb_locus

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("loci"):
        om = parse_grid(str(opts.get("omega", "0.2..2:0.01")))
        amps = parse_grid(str(opts.get("amp", "0.005..0.2:0.005")))
        loci = {"Cf1": cf1_locus(p, om)}
        loci.update(cf_intrawell_locus(p, om))
        loci["PD"] = pd_locus(p, om)
        loci.update(sb_locus(p, amps))
        rows = []
        for kind in ("Cf1", "Cf2", "Cf3", "PD", "SB1", "SB2"):
            locus = loci[kind]
            for (Om, A, a_b), res in zip(locus.points, locus.residuals):
                rows.append((kind, Om, A, a_b, res))
        write_csv(run.outdir / "loci.csv",
                  ["kind", "Omega_b", "A_over_R", "a_b", "residual"], rows)
    run.finish()
    return 0


def cmd_sweep(args):
    from .simulate import frequency_sweep

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("sweep"):
        om = parse_grid(str(opts.get("omega", "0.4..1.6:0.01")))
        amp = float(opts.get("amp", 0.1))
        policy = str(opts.get("ic_policy", "fixed-zero"))
        rows = frequency_sweep(p, amp, om, ic_policy=policy)
        strobe_rows = []
        label_rows = []
        for r in rows:
            for y in r["strobe_Y"]:
                strobe_rows.append((r["Omega"], y))
            label_rows.append((r["Omega"], r["label"], r["mean"],
                               r["amplitude"]))
        write_csv(run.outdir / "strobes.csv", ["Omega", "Y_strobe"],
                  strobe_rows)
        write_csv(run.outdir / "labels.csv",
                  ["Omega", "label", "mean_Y", "amplitude"], label_rows)
    run.finish()
    return 0


def cmd_basins(args):
    from .simulate import basin_map

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("basins"):
        Om = float(opts.get("omega", 0.62))
        amp = float(opts.get("amp", 0.1))
        Yg = parse_grid(str(opts.get("y_grid", "-0.3..0.3:0.006")))
        Vg = parse_grid(str(opts.get("ydot_grid", "-0.3..0.3:0.006")))
        labels = basin_map(p, Om, amp, Yg, Vg)
        codes = {"P1-inter-symmetric": 0, "P1-inter-asymmetric": 1,
                 "chaotic": 2, "P1-intra": 3}
        rows = []
        for i, Y0 in enumerate(Yg):
            rows.append([_fmt(Y0)] + [
                str(codes.get(labels[i, j], 4)) for j in range(Vg.size)])
        with open(run.outdir / "basins.csv", "w") as f:
            f.write("Y0\\Ydot0," + ",".join(_fmt(v) for v in Vg) + "\n")
            for row in rows:
                f.write(",".join(row) + "\n")
        run.extra["label_codes"] = {str(v): k for k, v in codes.items()}
        run.extra["label_codes"]["4"] = "Pn"
    run.finish()
    return 0


def cmd_design_map(args):
    from .designmap import DesignMapConfig, build_design_map

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("design_map"):
        amps = parse_grid(str(opts.get("amp", "0..0.2:0.005")))
        oms = parse_grid(str(opts.get("omega", "0.2..2:0.01")))
        cfg = DesignMapConfig(
            params=p,
            amp_range=(float(amps[0]), float(amps[-1])),
            amp_step=float(amps[1] - amps[0]) if amps.size > 1 else 1.0,
            omega_range=(float(oms[0]), float(oms[-1])),
            omega_step=float(oms[1] - oms[0]) if oms.size > 1 else 1.0,
            verify_fraction=float(opts.get("verify_fraction", 0.0)),
        )
        dmap = build_design_map(cfg)
        rows = []
        for i, A in enumerate(dmap.amps):
            for j, Om in enumerate(dmap.omegas):
                rows.append((A, Om, dmap.labels[i, j]))
        write_csv(run.outdir / "design_map.csv",
                  ["A_over_R", "Omega", "region"], rows)
        rows = []
        for kind, locus in sorted(dmap.loci.items()):
            for (Om, A, a_b), res in zip(locus.points, locus.residuals):
                rows.append((kind, Om, A, a_b, res))
        write_csv(run.outdir / "loci.csv",
                  ["kind", "Omega_b", "A_over_R", "a_b", "residual"], rows)
        if dmap.disagreements:
            write_csv(run.outdir / "verify_disagreements.csv",
                      ["A_over_R", "Omega", "numeric", "analytic"],
                      dmap.disagreements)
        run.extra["critical_amplitudes"] = {
            "cr1": dmap.cr1, "cr2": dmap.cr2, "cr3": dmap.cr3}
        run.extra.update(dmap.diagnostics)
        write_gnuplot(run.outdir / "design_map.gp", [
            "set datafile separator ','",
            "set xlabel 'Omega'",
            "set ylabel 'A/R'",
            "plot 'loci.csv' every ::1 using 2:3 with points pt 7 ps 0.3 \\",
            "     title 'bifurcation loci'",
        ])
    run.finish()
    return 0


def cmd_power_map(args):
    from .designmap import power_map

    opts = resolve_options(args)
    p = build_params(opts)
    run = Run(opts, args.out)
    with run.timed("power_map"):
        amps = parse_grid(str(opts.get("amp", "0..0.2:0.01")))
        oms = parse_grid(str(opts.get("omega", "0.3..1.5:0.02")))
        P = power_map(p, amps, oms,
                      n_periods=int(opts.get("n_periods", 200)))
        with open(run.outdir / "power_map.csv", "w") as f:
            f.write("A_over_R\\Omega," + ",".join(_fmt(v) for v in oms) + "\n")
            for i, A in enumerate(amps):
                f.write(_fmt(A) + "," + ",".join(_fmt(x) for x in P[i])
                        + "\n")
        write_gnuplot(run.outdir / "power_map.gp", [
            "set datafile separator ','",
            "set view map",
            "set xlabel 'Omega'",
            "set ylabel 'A/R'",
            "splot 'power_map.csv' matrix nonuniform with image notitle",
        ])
    run.finish()
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--out", default="out", help="output directory")
    sp.add_argument("--config", help="key=value config file")
    for k in _PARAM_KEYS:
        sp.add_argument(f"--{k.replace('_', '-')}", dest=k, type=float)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bpwa",
        description="Bi-stable point wave energy absorber toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    specs = [
        ("kernel", cmd_kernel, ["dt"]),
        ("era", cmd_era, ["impulse", "order", "r", "s", "dt"]),
        ("branches", cmd_branches, ["amp", "omega"]),
        ("loci", cmd_loci, ["amp", "omega"]),
        ("sweep", cmd_sweep, ["amp", "omega", "ic_policy"]),
        ("basins", cmd_basins, ["amp", "omega", "y_grid", "ydot_grid"]),
        ("design-map", cmd_design_map, ["amp", "omega", "verify_fraction"]),
        ("power-map", cmd_power_map, ["amp", "omega", "n_periods"]),
    ]
    for name, fn, extra in specs:
        sp = sub.add_parser(name)
        _add_common(sp)
        for k in extra:
            sp.add_argument(f"--{k.replace('_', '-')}", dest=k)
        sp.set_defaults(func=fn)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        try:
            with open(Path(args.out) / "error.log", "a") as f:
                f.write(f"{type(exc).__name__}: {exc}\n")
        except OSError:
            pass
        return 1


if __name__ == "__main__":
    sys.exit(main())
