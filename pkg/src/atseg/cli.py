"""Command-line interface: segment, synth, profile, sweep, energy subcommands.

Exit codes: 0 success (segment: converged), 1 error, 2 segment hit the
iteration cap (output files are still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import altmin, edges, imgio, profile1d, synth
from .energy import BoundaryKind, ModelKind, ModelParams, gagliardo_ratio, total_energy
from .errors import AtsegError
from .grid import ScalarField

PROFILE_D_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["at", "laplacian"], default="at",
                   help="first-order (at) or second-order (laplacian) edge penalty")
    p.add_argument("--alpha", type=float, default=1e-2, help="gradient coupling weight")
    p.add_argument("--beta", type=float, default=0.3, help="edge-set weight")
    p.add_argument("--gamma", type=float, default=1e-3, help="data fidelity weight")
    p.add_argument("--eps", type=float, default=3e-2, help="edge width parameter")
    p.add_argument("--eta", type=float, default=None,
                   help="gradient perturbation weight (default: eps^2)")
    p.add_argument("--bc", choices=["neumann", "dirichlet1"], default="neumann",
                   help="boundary handling for the second-order edge system")
    p.add_argument("--intensity-scale", type=float, default=255.0,
                   help="intensity range alpha/gamma are quoted for (255 = 8-bit convention)")
    p.add_argument("--tol", type=float, default=1e-4, help="stop when e_k drops below this")
    p.add_argument("--maxit", type=int, default=500, help="outer iteration cap")
    p.add_argument("--solver", choices=["auto", "cg", "direct"], default="auto",
                   help="inner linear solver")


def _params(args) -> ModelParams:
    return ModelParams(
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        eps=args.eps,
        eta=args.eta,
        model=ModelKind(args.model),
        bc=BoundaryKind(args.bc),
        intensity_scale=args.intensity_scale,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment a PGM image")
    p.add_argument("input", type=Path, help="input PGM (P2 or P5)")
    p.add_argument("--output-dir", type=Path, default=Path("."),
                   help="directory for u.pgm, v.pgm, v.f64, mask.pgm, history.csv")
    p.add_argument("--threshold", type=float, default=edges.DEFAULT_THRESHOLD,
                   help="level-set threshold for mask.pgm")
    p.add_argument("--maxval", type=int, default=255, help="maxval of written PGMs")
    _add_model_flags(p)

    p = sub.add_parser("synth", help="write a synthetic phantom and its ground truth")
    p.add_argument("output", type=Path, help="output PGM path (sidecar written alongside)")
    p.add_argument("--kind", choices=[k.value for k in synth.PhantomKind], default="oned")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--contrast", type=float, default=0.8)
    p.add_argument("--sigma", type=float, default=0.1, help="additive Gaussian noise level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-fraction", type=float, default=0.5)
    p.add_argument("--maxval", type=int, default=255)

    p = sub.add_parser("profile", help="emit the 1D optimal transition profile and its constants")
    p.add_argument("--output", type=Path, default=None, help="CSV of (t, f(t)); stdout when omitted")
    p.add_argument("--tmax", type=float, default=50.0)
    p.add_argument("--step", type=float, default=1e-3)

    p = sub.add_parser("sweep", help="run segment over a descending list of eps values")
    p.add_argument("input", type=Path)
    p.add_argument("--eps-list", type=str, required=True,
                   help="comma-separated descending eps values (at least two)")
    p.add_argument("--output", type=Path, default=None, help="CSV output; stdout when omitted")
    _add_model_flags(p)

    p = sub.add_parser("energy", help="print the energy breakdown for given fields")
    p.add_argument("input", type=Path, help="data image g (PGM)")
    p.add_argument("--u", type=Path, default=None, help="clean image u (PGM or .f64); default g")
    p.add_argument("--v", type=Path, default=None, help="edge field v (PGM or .f64); default 1")
    _add_model_flags(p)

    return parser


def _read_field(path: Path) -> ScalarField:
    data = path.read_bytes()
    if data[:4] == imgio.F64_MAGIC:
        return imgio.read_f64(data)
    return imgio.read_pgm(data)


def cmd_segment(args) -> int:
    g = _read_field(args.input)
    params = _params(args)
    result = altmin.run(g, params, tol=args.tol, maxit=args.maxit, solver=args.solver)

    outdir = args.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "u.pgm").write_bytes(imgio.write_pgm(result.u, args.maxval)[0])
    v_bytes, clamped = imgio.write_pgm(result.v, args.maxval)
    (outdir / "v.pgm").write_bytes(v_bytes)
    if clamped:
        print(f"v.pgm: clamped {clamped} values outside [0, 1]", file=sys.stderr)
    (outdir / "v.f64").write_bytes(imgio.write_f64(result.v))
    mask = edges.level_mask(result.v, args.threshold)
    (outdir / "mask.pgm").write_bytes(imgio.write_mask_pgm(mask.bits, g.grid.nx, g.grid.ny))
    (outdir / "history.csv").write_bytes(imgio.write_history(result.report))

    last = result.report.entries[-1]
    print(f"iterations={result.report.iterations} e_k={last.e_k:.3e} total={last.breakdown.total:.6e}")
    return 0 if result.report.converged else 2


def cmd_synth(args) -> int:
    spec = synth.PhantomSpec(
        kind=synth.PhantomKind(args.kind),
        nx=args.nx,
        ny=args.ny,
        contrast=args.contrast,
        noise_sigma=args.sigma,
        seed=args.seed,
        edge_fraction=args.edge_fraction,
    )
    g, truth = synth.generate(spec)
    comment = f"kind={spec.kind.value} seed={spec.seed} sigma={spec.noise_sigma} rng={synth.RNG_NAME}"
    data, _ = imgio.write_pgm(g, args.maxval, comment=comment)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_bytes(data)
    sidecar = {
        "kind": spec.kind.value,
        "nx": spec.nx,
        "ny": spec.ny,
        "contrast": spec.contrast,
        "noise_sigma": spec.noise_sigma,
        "seed": spec.seed,
        "rng": synth.RNG_NAME,
        "ground_truth": {"type": type(truth).__name__, **asdict(truth)},
    }
    args.output.with_suffix(args.output.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n"
    )
    print(f"wrote {args.output}")
    return 0


def cmd_profile(args) -> int:
    p = profile1d.sample_closed_form(args.tmax, args.step)
    n = p.samples.size
    t = np.arange(n) * args.step
    lines = ["t,f"] + [f"{ti:.17g},{fi:.17g}" for ti, fi in zip(t, p.samples)]
    csv = "\n".join(lines) + "\n"
    if args.output is not None:
        args.output.write_bytes(csv.encode("ascii"))
    else:
        sys.stdout.write(csv)

    m_quad = profile1d.profile_energy(p)
    print(f"m (quadrature of closed form) = {m_quad:.7f}")
    print("d, m_d (quadrature), m_d (discrete minimizer), sqrt(2)*(d-1)^2")
    for d in PROFILE_D_VALUES:
        quad = profile1d.profile_energy(profile1d.sample_closed_form(args.tmax, args.step, d))
        disc = profile1d.discrete_transition_minimum(d)
        exact = profile1d.SQRT2 * (d - 1.0) ** 2
        print(f"{d:.2f}, {quad:.7f}, {disc:.7f}, {exact:.7f}")
    return 0


def cmd_sweep(args) -> int:
    eps_values = [float(s) for s in args.eps_list.split(",") if s.strip()]
    if len(eps_values) < 2:
        raise AtsegError("sweep needs at least two eps values")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise AtsegError("eps values must be strictly descending")

    g = _read_field(args.input)
    out = open(args.output, "w") if args.output is not None else sys.stdout
    try:
        out.write("eps,min_total,mm_at_convergence,gagliardo_ratio,iterations\n")
        out.flush()
        for eps in eps_values:
            params = ModelParams(
                alpha=args.alpha, beta=args.beta, gamma=args.gamma, eps=eps, eta=args.eta,
                model=ModelKind(args.model), bc=BoundaryKind(args.bc),
                intensity_scale=args.intensity_scale,
            )
            result = altmin.run(g, params, tol=args.tol, maxit=args.maxit, solver=args.solver)
            last = result.report.entries[-1]
            ratio = gagliardo_ratio(result.v, params)
            out.write(
                f"{eps:.17g},{last.breakdown.total:.17g},{last.breakdown.mm:.17g},"
                f"{ratio:.17g},{result.report.iterations}\n"
            )
            out.flush()
    finally:
        if args.output is not None:
            out.close()
    return 0


def cmd_energy(args) -> int:
    g = _read_field(args.input)
    u = _read_field(args.u) if args.u is not None else g
    v = _read_field(args.v) if args.v is not None else ScalarField.constant(g.grid, 1.0)
    params = _params(args)
    b = total_energy(u, v, g, params)
    print("coupled,mm,grad_perturb,fidelity,total")
    print(f"{b.coupled:.17g},{b.mm:.17g},{b.grad_perturb:.17g},{b.fidelity:.17g},{b.total:.17g}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "segment": cmd_segment,
        "synth": cmd_synth,
        "profile": cmd_profile,
        "sweep": cmd_sweep,
        "energy": cmd_energy,
    }
    try:
        return handlers[args.command](args)
    except (AtsegError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
