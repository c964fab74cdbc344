"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import io
from .latin import haar_family, latex_family, latin_square_family, verify_family
from .lattice import FreqGrid
from .separability import dump_counterexamples, fuzz_intertwining

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    json: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(args.command, bool(getattr(args, "json", False)))


def _emit(cfg: RunConfig, report: dict, lines) -> None:
    if cfg.json:
        print(json.dumps(report, indent=2, sort_keys=True, default=float))
    else:
        for line in lines:
            print(line)


def _int_at_least_2(name):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer")
        if v < 2:
            raise argparse.ArgumentTypeError(f"{name} must be ≥ 2")
        return v

    return parse


def _check_lines(report: dict):
    for name, c in report["checks"].items():
        yield f"{'ok  ' if c['passed'] else 'FAIL'} {name}: {c['value']:.3g} (tol {c['tol']:.0e})"


# -- families --------------------------------------------------------------


def cmd_build_latin(args, cfg):
    fam = latin_square_family()
    rep = verify_family(fam)
    io.write_family_dir(args.out, fam, {"verification": rep})
    tex = latex_family(fam)
    with open(os.path.join(args.out, "family.tex"), "w") as fh:
        fh.write(tex)
    lines = [f"wrote {len(fam.grids)} grids to {args.out}"]
    if args.latex:
        lines.append(tex.rstrip())
    _emit(cfg, rep, lines)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_build_haar(args, cfg):
    fam = haar_family(args.alpha, args.beta, pinned=args.pinned)
    rep = verify_family(fam)
    io.write_family_dir(args.out, fam, {"verification": rep})
    if args.latex:
        with open(os.path.join(args.out, "family.tex"), "w") as fh:
            fh.write(latex_family(fam))
    u = rep["checks"]["orthogonality"]["value"]
    lines = [f"wrote {len(fam.wavelets)} wavelet grids for ({args.alpha}, {args.beta}) to {args.out}",
             f"unitarity deviation {u:.3g}"]
    _emit(cfg, rep, lines)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_verify_latin(args, cfg):
    fam = io.read_family_dir(args.family) if args.family else latin_square_family()
    rep = verify_family(fam)
    failing = [n for n, c in rep["checks"].items() if not c["passed"]]
    lines = list(_check_lines(rep))
    lines.append("all checks passed" if not failing else f"failed: {', '.join(failing)}")
    _emit(cfg, rep, lines)
    if failing:
        print(f"verification failed: {', '.join(failing)}", file=sys.stderr)
    return EXIT_OK if not failing else EXIT_FAIL


# -- Meyer -----------------------------------------------------------------


def _meyer_spec(args):
    from .meyer import MeyerCornerSpec

    params = {"mode": args.mode, "a": args.a, "d": args.d, "grid_n": args.grid}
    if args.spec:
        params.update(io.read_json(args.spec))
    kw = {"mode": params["mode"]}
    if params["mode"] == "tensor":
        if args.p is not None:
            kw["p"] = args.p
    else:
        kw.update(a=float(params["a"]), d=float(params["d"]))
    return MeyerCornerSpec(**kw), int(params["grid_n"])


def _meyer_profile(args):
    from .meyer import build_profile

    spec, n = _meyer_spec(args)
    if n % 4:
        raise UsageError("grid must be a multiple of 4")
    return build_profile(spec, FreqGrid(n))


def cmd_verify_meyer(args, cfg):
    from .meyer import gram_error, translate_gram, verify_bmra

    p = _meyer_profile(args)
    rep = verify_bmra(p, tol=args.tol)
    g0, goff = gram_error(translate_gram(p, 3))
    rep["gram"] = {"diagonal": g0, "off_diagonal": goff}
    lines = [f"{'ok  ' if v <= args.tol else 'FAIL'} {k}: {v:.3g}" for k, v in rep["residuals"].items()]
    lines.append(f"gram: |G0 - 1| = {g0:.3g}, max off-diagonal = {goff:.3g}")
    lines.append(f"resolved nodes: {rep['resolved_fraction']:.4%}")
    _emit(cfg, rep, lines)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_meyer_profile(args, cfg):
    from .meyer import REGION_NAMES, profile_nonseparability

    p = _meyer_profile(args)
    os.makedirs(args.out, exist_ok=True)
    io.write_csv_array(os.path.join(args.out, "profile.csv"), p.values)
    io.write_csv_array(os.path.join(args.out, "tags.csv"), p.tags)
    io.write_pgm(os.path.join(args.out, "profile.pgm"), io.heatmap(p.values, 16), 65535)
    rep = {
        "schema": 1,
        "spec": p.spec.to_dict(),
        "grid": p.grid.n,
        "half_extent": p.grid.half_extent,
        "regions": {REGION_NAMES[int(t)]: int(c) for t, c in zip(*np.unique(p.tags, return_counts=True))},
        "resolved_fraction": float(p.resolved.mean()),
        "nonseparability": profile_nonseparability(p),
        "heatmap": {"file": "profile.pgm", "scaling": "linear min-max", "min": float(p.values.min()),
                    "max": float(p.values.max()), "bits": 16},
    }
    io.write_json(os.path.join(args.out, "manifest.json"), rep)
    _emit(cfg, rep, [f"wrote profile ({p.grid.n}x{p.grid.n}) to {args.out}",
                     f"nonseparability score {rep['nonseparability']:.3g}"])
    return EXIT_OK


def cmd_meyer_wavelet(args, cfg):
    from .meyer import synthesize_wavelet, wavelet_report

    p = _meyer_profile(args)
    try:
        w = synthesize_wavelet(p)
    except ValueError as exc:
        print(f"wavelet synthesis failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = wavelet_report(w)
    x, psi = w.spatial(args.box, args.samples)
    os.makedirs(args.out, exist_ok=True)
    io.write_csv_array(os.path.join(args.out, "psi_hat_real.csv"), w.psi_hat.real)
    io.write_csv_array(os.path.join(args.out, "psi_hat_imag.csv"), w.psi_hat.imag)
    io.write_csv_array(os.path.join(args.out, "psi_real.csv"), psi.real)
    io.write_csv_array(os.path.join(args.out, "psi_imag.csv"), psi.imag)
    io.write_pgm(os.path.join(args.out, "psi_hat_abs.pgm"), io.heatmap(np.abs(w.psi_hat), 16), 65535)
    io.write_pgm(os.path.join(args.out, "psi_abs.pgm"), io.heatmap(np.abs(psi), 16), 65535)
    rep["box"] = {"half_width": args.box, "samples": args.samples}
    io.write_json(os.path.join(args.out, "manifest.json"), rep)
    ok = rep["unitarity"] <= 1e-10 and abs(rep["norm"] - 1) <= 1e-2 and rep["max_inner_with_scaling_translates"] <= 1e-2
    _emit(cfg, rep, [f"wrote wavelet samples to {args.out}",
                     f"unitarity {rep['unitarity']:.3g}, norm {rep['norm']:.6f}, "
                     f"max <psi, phi(.-k)> {rep['max_inner_with_scaling_translates']:.3g}"])
    return EXIT_OK if ok else EXIT_FAIL


# -- transform -------------------------------------------------------------


def cmd_transform(args, cfg):
    from .transform import analyze, threshold

    img, maxval = io.read_pgm(args.image)
    fam = haar_family(args.alpha, args.beta, pinned=True)
    try:
        tree = analyze(img.astype(float), fam, args.depth)
    except ValueError as exc:
        raise UsageError(str(exc))
    rep = {"schema": 1, "alpha": args.alpha, "beta": args.beta, "depth": args.depth, "shape": list(img.shape)}
    if args.threshold is not None:
        tree, frac = threshold(tree, args.threshold)
        rep.update(threshold=args.threshold, retained_fraction=frac)
    io.write_subband_tree(args.out, tree, {"maxval": maxval, "pinned": True})
    lines = [f"wrote {tree.depth}-level subband tree to {args.out}"]
    if args.threshold is not None:
        lines.append(f"retained fraction of detail coefficients: {rep['retained_fraction']:.4f}")
    _emit(cfg, rep, lines)
    return EXIT_OK


def cmd_inverse(args, cfg):
    from .transform import synthesize

    tree = io.read_subband_tree(args.directory)
    fam = haar_family(tree.alpha, tree.beta, pinned=bool(tree.meta.get("pinned", True)))
    x = synthesize(tree, fam)
    maxval = int(tree.meta.get("maxval", 255))
    pix = np.clip(np.rint(x), 0, maxval).astype(np.int64)
    io.write_pgm(args.out, pix, maxval)
    rep = {"schema": 1, "shape": list(pix.shape), "maxval": maxval,
           "rounding_error": float(np.abs(x - pix).max())}
    _emit(cfg, rep, [f"wrote {args.out}"])
    return EXIT_OK


def cmd_plot(args, cfg):
    arr = io.read_csv_array(args.csv)
    pix = io.heatmap(arr, args.bits)
    io.write_pgm(args.out, pix, 2**args.bits - 1)
    rep = {"schema": 1, "min": float(arr.min()), "max": float(arr.max()), "bits": args.bits,
           "scaling": "linear min-max"}
    _emit(cfg, rep, [f"wrote {args.out} ({arr.shape[0]}x{arr.shape[1]}, {args.bits}-bit)"])
    return EXIT_OK


def cmd_fuzz(args, cfg):
    rep = fuzz_intertwining(args.trials, args.seed)
    out = rep.as_dict()
    if rep.counterexamples and args.dump:
        out["dumped"] = dump_counterexamples(rep, args.dump)
    lines = [f"{rep.trials} trials, relation held for {rep.relation_holds}, "
             f"counterexamples: {len(rep.counterexamples)}"]
    _emit(cfg, out, lines)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a machine-readable JSON report on stdout")

    ap = argparse.ArgumentParser(prog="birank", description="Rank-2 biscaled wavelet constructions and checks.")
    ap.add_argument("--json", action="store_true", help="print a machine-readable JSON report on stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-latin", parents=[common], help="write the triadic Latin-square family")
    p.add_argument("--out", required=True)
    p.add_argument("--latex", action="store_true", help="also print grids in radical notation")
    p.set_defaults(func=cmd_build_latin)

    p = sub.add_parser("build-haar", parents=[common], help="complete a biscaled Haar family")
    p.add_argument("--alpha", type=_int_at_least_2("alpha"), required=True)
    p.add_argument("--beta", type=_int_at_least_2("beta"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pinned", action="store_true", help="use the shipped triadic family for (3, 3)")
    p.add_argument("--latex", action="store_true")
    p.set_defaults(func=cmd_build_haar)

    p = sub.add_parser("verify-latin", parents=[common], help="check a family directory (default: shipped)")
    p.add_argument("--family", help="directory written by build-latin or build-haar")
    p.set_defaults(func=cmd_verify_latin)

    for name, func, hlp in (
        ("verify-meyer", cmd_verify_meyer, "check every identity of a Meyer-type profile"),
        ("meyer-profile", cmd_meyer_profile, "sample a Meyer-type profile"),
        ("meyer-wavelet", cmd_meyer_wavelet, "synthesize the Meyer-type wavelet"),
    ):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--a", type=float, default=1 / (64 * np.pi**2), help="squared corner value a (default 1/(64 pi^2))")
        p.add_argument("--d", type=float, default=1 / (64 * np.pi**2), help="squared corner value d (default 1/(64 pi^2))")
        p.add_argument("--p", type=float, default=None, help="tensor mode: squared inner 1-D value")
        p.add_argument("--mode", choices=["piecewise", "triangular", "tensor"], default="piecewise")
        p.add_argument("--grid", type=int, default=768, help="samples per axis (default 768)")
        p.add_argument("--spec", help="JSON file {mode, a, d, grid_n} overriding the flags")
        if name == "verify-meyer":
            p.add_argument("--tol", type=float, default=1e-9)
        else:
            p.add_argument("--out", required=True)
        if name == "meyer-wavelet":
            p.add_argument("--box", type=float, default=8.0, help="half-width of the spatial sample box")
            p.add_argument("--samples", type=int, default=65, help="spatial samples per axis")
        p.set_defaults(func=func)

    p = sub.add_parser("transform", parents=[common], help="biscaled Haar pyramid of a PGM image")
    p.add_argument("image")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--alpha", type=_int_at_least_2("alpha"), default=3)
    p.add_argument("--beta", type=_int_at_least_2("beta"), default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, help="keep detail coefficients with |c| > t")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("inverse", parents=[common], help="reconstruct an image from a subband directory")
    p.add_argument("directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("plot", parents=[common], help="heatmap of a CSV array as PGM")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.add_argument("--bits", type=int, choices=[8, 16], default=16)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("fuzz-intertwining", parents=[common], help="search for zero-residual non-univariate filter pairs")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump", help="directory for counterexample polynomials")
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        return args.func(args, cfg)
    except (UsageError, ValueError) as exc:
        print(f"birank {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"birank {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
