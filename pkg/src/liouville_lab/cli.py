"""Command-line frontend.

One subcommand per verification family.  Reports are deterministic:
identical flags and config produce a byte-identical payload; wall time
is carried only in the envelope.  When a CSV output path is given the
matching figure is rendered alongside it as PNG (``--no-plot``
disables this).

Exit codes: 0 success, 2 hypothesis/contract violation, 1 internal or
numerical failure, 64 unknown command.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import time

import numpy as np

from .errors import ContractError, LiouvilleError
from .reporting import (EIGHT_PI_CONST, FOUR_PI_CONST, levels_csv, make_report,
                        profile_csv, read_profile_csv, shoot_csv, sweep_csv,
                        sym_const, to_jsonable)

COMMANDS = ("bubble", "bol", "rearrange", "pair", "sci-verify", "dichotomy",
            "eigen", "shoot", "sweep", "transform", "jalpha")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONTRACT = 2
EXIT_USAGE = 64


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class RunConfig:
    quadrature_tol: float = 1e-10
    ode_tol: float = 1e-10
    grid_nodes: int = 512
    r_max: float = 1000.0
    output_format: str = "json"
    output_path: str = ""
    parallelism: int = 1

    def __post_init__(self):
        if self.quadrature_tol <= 0 or self.ode_tol <= 0:
            raise ContractError("tolerances must be positive")
        if self.grid_nodes < 64:
            raise ContractError("grid_nodes must be at least 64")
        if self.output_format not in ("json", "csv"):
            raise ContractError("output_format must be json or csv")
        if self.parallelism < 1:
            raise ContractError("parallelism must be at least 1")


def load_config(path=None) -> dict:
    """Plain ``key=value`` lines; ``#`` starts a comment.  Falls back
    to the LIOUVILLE_LAB_CONFIG environment variable."""
    if path is None:
        path = os.environ.get("LIOUVILLE_LAB_CONFIG", "")
    if not path:
        return {}
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ContractError(f"malformed config line: {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            out[key] = val
    return out


_CONFIG_TYPES = {
    "quadrature_tol": float, "ode_tol": float, "grid_nodes": int,
    "r_max": float, "output_format": str, "output_path": str,
    "parallelism": int,
}


def build_config(args) -> RunConfig:
    raw = load_config(getattr(args, "config", None))
    kwargs = {}
    for key, caster in _CONFIG_TYPES.items():
        if key in raw:
            kwargs[key] = caster(raw[key])
    # explicit flags win over the config file
    for key, attr in (("output_format", "format"), ("output_path", "output"),
                      ("parallelism", "parallelism"), ("grid_nodes", "nodes"),
                      ("r_max", "r_max"), ("ode_tol", "tol")):
        val = getattr(args, attr, None)
        if val is not None:
            kwargs[key] = _CONFIG_TYPES[key](val)
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _float_list(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _poly_g(coeffs):
    """g(x) = sum c_i x^i from low to high degree."""
    c = list(coeffs)

    def g(x):
        x = np.asarray(x, dtype=float)
        return sum(ci * x ** i for i, ci in enumerate(c))

    return g


def _emit(config: RunConfig, results, csv_text=None, figure=None):
    """Write the delimited/JSON output and the figure, honoring the
    output path; returns extra metadata for the report."""
    meta = {}
    if config.output_path:
        if config.output_format == "csv" and csv_text is not None:
            with open(config.output_path, "w") as fh:
                fh.write(csv_text)
            meta["csv_path"] = config.output_path
            if figure is not None:
                stem, _ = os.path.splitext(config.output_path)
                meta["figure_path"] = figure(stem + ".png")
        else:
            from .reporting import payload_json
            with open(config.output_path, "w") as fh:
                fh.write(payload_json(results) + "\n")
            meta["json_path"] = config.output_path
            if figure is not None:
                stem, _ = os.path.splitext(config.output_path)
                meta["figure_path"] = figure(stem + ".png")
    return meta


def _kernel_from_args(args):
    from .meanfield import KernelSpec
    variant = args.kernel
    if variant in ("const", "constant"):
        return KernelSpec.constant(args.c)
    if variant == "poly":
        return KernelSpec.poly(args.l)
    if variant == "ring":
        return KernelSpec.ring(args.l)
    if variant == "onsager":
        return KernelSpec.onsager(args.alpha, args.gamma)
    raise ContractError(f"unknown kernel variant {variant!r}")


def _add_kernel_flags(sp):
    sp.add_argument("--kernel", required=True,
                    choices=["const", "constant", "poly", "ring", "onsager"])
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--l", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=8.0 * math.pi)
    sp.add_argument("--gamma", type=float, default=0.0)


def _add_common_flags(sp):
    sp.add_argument("--format", choices=["json", "csv"], default=None)
    sp.add_argument("--output", default=None)
    sp.add_argument("--config", default=None)
    sp.add_argument("--no-plot", action="store_true")
    sp.add_argument("--parallelism", type=int, default=None)


# ---------------------------------------------------------------------------
# command handlers: each returns (inputs, results, csv_text, figure_fn)
# ---------------------------------------------------------------------------

def _cmd_bubble(args, config):
    from .radial import LiouvilleBubble, geometric_grid
    from .plotting import plot_profile
    lam = args.lam
    bubble = LiouvilleBubble(lam)
    grid = geometric_grid(args.bubble_r_max, config.grid_nodes)
    prof = bubble.as_profile(grid)
    results = {
        "lam": lam,
        "mass_on_disc": float(bubble.mass(args.bubble_r_max)),
        "total_mass": EIGHT_PI_CONST,
        "center_value": 2.0 * math.log(lam),
    }
    return ({"lam": lam, "r_max": args.bubble_r_max}, results,
            profile_csv(prof),
            lambda p: plot_profile(prof, p, title=f"bubble lam={lam}"))


def _cmd_bol(args, config):
    from .bol import bol_deficit
    from .radial import LiouvilleBubble, geometric_grid
    if args.profile:
        prof = read_profile_csv(args.profile)
        inputs = {"profile": args.profile}
    else:
        grid = geometric_grid(max(args.radii) * 1.01, config.grid_nodes)
        prof = LiouvilleBubble(args.lam).as_profile(grid)
        inputs = {"lam": args.lam}
    radii = args.radii
    deficits = [float(bol_deficit(prof, r, method=args.method)) for r in radii]
    results = {"radii": radii, "deficits": deficits,
               "max_abs_deficit": max(abs(d) for d in deficits)}
    rows = "\n".join(f"{repr(float(r))},{repr(d)}" for r, d in zip(radii, deficits))
    return inputs, results, "r,deficit\n" + rows + "\n", None


def _cmd_rearrange(args, config):
    from .rearrange import rearrange_radial, gradient_comparison
    from .plotting import plot_rearrangement
    phi = read_profile_csv(args.phi)
    weight = read_profile_csv(args.weight)
    star = rearrange_radial(phi, weight, args.lam)
    results = {
        "lam": args.lam,
        "equimeasurability_residual": star.equimeasurability_residual,
        "boundary_constant": star.boundary_constant,
        "rearranged_radius": star.profile.r_max,
    }
    if phi.has_derivative_data:
        comp = gradient_comparison(phi, weight, star)
        results["min_gradient_difference"] = float(np.min(comp.difference))
    return ({"phi": args.phi, "weight": args.weight, "lam": args.lam},
            results, profile_csv(star.profile),
            lambda p: plot_rearrangement(phi, star, p))


def _cmd_pair(args, config):
    from .sci import (cap_heights, make_pair, pair_beta, pair_total_mass,
                      quadratic_mass_roots)
    pair = make_pair(args.lambda1, args.R)
    beta = pair_beta(pair)
    m1, m2 = quadratic_mass_roots(beta)
    z1, z2 = cap_heights(pair)
    results = {
        "lambda1": pair.lambda1, "lambda2": pair.lambda2,
        "R": pair.R, "kappa": pair.kappa,
        "total_mass": float(pair_total_mass(pair)),
        "bound": EIGHT_PI_CONST,
        "beta": beta, "m1": m1, "m2": m2,
        "cap_heights": [z1, z2],
    }
    return {"lambda1": args.lambda1, "R": args.R}, results, None, None


def _cmd_sci_verify(args, config):
    from .radial import (LiouvilleBubble, RadialProfile, bubble_value,
                         uniform_grid)
    from .sci import make_pair, sci_verify_radial
    if args.w1:
        w1 = read_profile_csv(args.w1)
        w2 = read_profile_csv(args.w2)
        f1 = read_profile_csv(args.f1)
        f2 = read_profile_csv(args.f2)
        R = w1.r_max
        inputs = {"w1": args.w1, "w2": args.w2, "f1": args.f1, "f2": args.f2}
    else:
        # bubble-parameter mode: the matched pair, optionally bumped
        from scipy.optimize import brentq
        lam1 = args.lambda1
        R = args.R
        pair = make_pair(lam1, R)
        c = args.bump
        b1 = LiouvilleBubble(pair.lambda1)
        b2 = LiouvilleBubble(pair.lambda2)
        if c > 0.0:
            R = brentq(lambda s: float(b2.value(s)) + c - float(b1.value(s)),
                       1e-9, 1e6)
        grid = uniform_grid(R, max(257, config.grid_nodes // 2 * 2 + 1))
        w1 = b1.as_profile(grid)
        w2 = RadialProfile.from_callable(
            lambda r: b2.value(r) + c, grid, df=b2.derivative,
            mass_fn=lambda r: math.exp(c) * b2.mass(r))
        zero = RadialProfile.from_callable(
            lambda r: 0.0 * np.asarray(r, dtype=float), grid,
            df=lambda r: 0.0 * np.asarray(r, dtype=float))
        f1 = zero
        if c > 0.0:
            f2 = RadialProfile.from_callable(
                lambda r: (math.exp(c) - 1.0) * np.exp(b2.value(r)), grid)
        else:
            f2 = zero
        inputs = {"lambda1": args.lambda1, "R": args.R, "bump": c}
    report = sci_verify_radial(w1, w2, f1, f2, R)
    results = to_jsonable(report)
    results["bound"] = EIGHT_PI_CONST
    results["bound_4pi_normalization"] = FOUR_PI_CONST
    return inputs, results, None, None


def _cmd_dichotomy(args, config):
    from .sci import dichotomy_check, make_pair
    psi = read_profile_csv(args.psi)
    pair = make_pair(args.lambda1, args.R)
    report = dichotomy_check(psi, pair)
    return ({"psi": args.psi, "lambda1": args.lambda1, "R": args.R},
            to_jsonable(report), None, None)


def _cmd_eigen(args, config):
    from .bol import first_eigenvalue
    from .radial import EIGHT_PI, LiouvilleBubble, geometric_grid
    lam = args.lam
    if args.mass is not None:
        m = args.mass
        if not 0.0 < m < EIGHT_PI:
            raise ContractError("mass must lie in (0, 8 pi)")
        r_outer = math.sqrt(8.0 * m / (lam * lam * (EIGHT_PI - m)))
    else:
        r_outer = args.r_outer
    grid = geometric_grid(r_outer, config.grid_nodes)
    w = LiouvilleBubble(lam).as_profile(grid)
    report = first_eigenvalue(w, r_outer, nodes=config.grid_nodes)
    results = to_jsonable(report)
    results["r_outer"] = r_outer
    results["hemisphere_mass"] = FOUR_PI_CONST
    return {"lam": lam, "r_outer": r_outer}, results, None, None


def _cmd_shoot(args, config):
    from .meanfield import shoot
    from .plotting import plot_shoot
    kernel = _kernel_from_args(args)
    res = shoot(kernel, args.a0, r_max=config.r_max, tol=config.ode_tol)
    results = {
        "a0": res.a0, "beta": res.beta,
        "beta_from_slope": res.beta_from_slope,
        "tail_slope": res.tail_slope,
        "pohozaev_residual": res.pohozaev_residual,
        "kernel": dataclasses.asdict(kernel),
    }
    return ({"kernel": args.kernel, "a0": args.a0}, results,
            shoot_csv(res), lambda p: plot_shoot(res, p))


def _cmd_sweep(args, config):
    from .meanfield import beta_sweep
    from .plotting import plot_sweep
    kernel = _kernel_from_args(args)
    a0_grid = np.linspace(args.a0_min, args.a0_max, args.steps)
    report = beta_sweep(kernel, a0_grid, r_max=config.r_max,
                        tol=config.ode_tol, parallelism=config.parallelism)
    results = {
        "beta_min": report.beta_min, "beta_max": report.beta_max,
        "expected_interval": report.expected_interval,
        "all_in_interval": report.all_in_interval,
        "above_lower_decay_bound": report.above_lower_decay_bound,
        "solved": len(report.rows), "divergent": len(report.divergent),
        "kernel": dataclasses.asdict(kernel),
    }
    return ({"kernel": args.kernel, "a0_min": args.a0_min,
             "a0_max": args.a0_max, "steps": args.steps},
            results, sweep_csv(report), lambda p: plot_sweep(report, p))


def _cmd_transform(args, config):
    from .transforms import (mt_transform, onsager_transform,
                             singular_mf_transform)
    g = _poly_g(_float_list(args.g_coeffs)) if args.g_coeffs else (
        lambda x: 0.0 * np.asarray(x, dtype=float))
    if args.pipeline == "mt":
        v, report = mt_transform(g, args.alpha)
        inputs = {"pipeline": "mt", "alpha": args.alpha}
    elif args.pipeline == "singular":
        v, report = singular_mf_transform(g, args.alpha)
        inputs = {"pipeline": "singular", "alpha": args.alpha}
    elif args.pipeline == "onsager":
        from .radial import RadialProfile, geometric_grid
        if args.v:
            vin = read_profile_csv(args.v)
        else:
            grid = geometric_grid(200.0, config.grid_nodes)
            vin = RadialProfile.from_callable(
                lambda r: 0.0 * np.asarray(r, dtype=float), grid,
                df=lambda r: 0.0 * np.asarray(r, dtype=float))
        v, _, report = onsager_transform(vin, args.alpha, args.gamma)
        inputs = {"pipeline": "onsager", "alpha": args.alpha,
                  "gamma": args.gamma}
    else:
        raise ContractError(f"unknown pipeline {args.pipeline!r}")
    results = to_jsonable(report)
    from .plotting import plot_profile
    return (inputs, results, profile_csv(v),
            lambda p: plot_profile(v, p, title=f"{args.pipeline} transform"))


def _cmd_jalpha(args, config):
    from .meanfield import JalphaInput, constrained_tilt_profile, jalpha_eval
    alpha = args.alpha
    rows = []
    for eps in _float_list(args.epsilons):
        if eps == 0.0:
            g = lambda x: 0.0 * np.asarray(x, dtype=float)
        else:
            g, _ = constrained_tilt_profile(eps)
        rep = jalpha_eval(JalphaInput(alpha=alpha, g=g))
        rows.append({"epsilon": eps, "value": rep.value,
                     "constraint_x3": rep.constraint_x3})
    results = {"alpha": alpha, "rows": rows,
               "min_value": min(r["value"] for r in rows)}
    csv_text = "epsilon,value,constraint_x3\n" + "\n".join(
        f"{repr(r['epsilon'])},{repr(r['value'])},{repr(r['constraint_x3'])}"
        for r in rows) + "\n"
    return {"alpha": alpha, "epsilons": args.epsilons}, results, csv_text, None


_HANDLERS = {
    "bubble": _cmd_bubble, "bol": _cmd_bol, "rearrange": _cmd_rearrange,
    "pair": _cmd_pair, "sci-verify": _cmd_sci_verify,
    "dichotomy": _cmd_dichotomy, "eigen": _cmd_eigen, "shoot": _cmd_shoot,
    "sweep": _cmd_sweep, "transform": _cmd_transform, "jalpha": _cmd_jalpha,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liouville-lab",
        description="Numerical verification toolkit for sphere-covering "
                    "mass bounds.")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("bubble", help="explicit bubble profile and masses")
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--bubble-r-max", type=float, default=10.0)
    _add_common_flags(sp)

    sp = sub.add_parser("bol", help="isoperimetric deficit of a profile")
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--profile", default=None)
    sp.add_argument("--radii", type=_float_list, default=[0.5, 1.0, 2.0])
    sp.add_argument("--method", default="auto",
                    choices=["auto", "closed_form", "quadrature"])
    _add_common_flags(sp)

    sp = sub.add_parser("rearrange", help="two-measure rearrangement")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--weight", required=True)
    sp.add_argument("--lam", type=float, required=True)
    _add_common_flags(sp)

    sp = sub.add_parser("pair", help="boundary-matched bubble pair")
    sp.add_argument("--lambda1", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)
    _add_common_flags(sp)

    sp = sub.add_parser("sci-verify", help="full covering pipeline")
    sp.add_argument("--w1"), sp.add_argument("--w2")
    sp.add_argument("--f1"), sp.add_argument("--f2")
    sp.add_argument("--lambda1", type=float, default=1.0)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--bump", type=float, default=0.0)
    _add_common_flags(sp)

    sp = sub.add_parser("dichotomy", help="mass dichotomy placement")
    sp.add_argument("--psi", required=True)
    sp.add_argument("--lambda1", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)
    _add_common_flags(sp)

    sp = sub.add_parser("eigen", help="first eigenvalue mass criterion")
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--r-outer", type=float, default=None)
    sp.add_argument("--mass", type=float, default=None)
    sp.add_argument("--nodes", type=int, default=None)
    _add_common_flags(sp)

    sp = sub.add_parser("shoot", help="radial mean-field solve")
    _add_kernel_flags(sp)
    sp.add_argument("--a0", type=float, required=True)
    sp.add_argument("--r-max", type=float, default=None, dest="r_max")
    sp.add_argument("--tol", type=float, default=None)
    _add_common_flags(sp)

    sp = sub.add_parser("sweep", help="beta range sweep over a0")
    _add_kernel_flags(sp)
    sp.add_argument("--a0-min", type=float, required=True)
    sp.add_argument("--a0-max", type=float, required=True)
    sp.add_argument("--steps", type=int, default=33)
    sp.add_argument("--r-max", type=float, default=None, dest="r_max")
    sp.add_argument("--tol", type=float, default=None)
    _add_common_flags(sp)

    sp = sub.add_parser("transform", help="sphere-to-plane normalizations")
    sp.add_argument("--pipeline", required=True,
                    choices=["mt", "singular", "onsager"])
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--g-coeffs", default=None,
                    help="polynomial coefficients of g(x3), low to high")
    sp.add_argument("--v", default=None,
                    help="profile CSV for the onsager pipeline input")
    _add_common_flags(sp)

    sp = sub.add_parser("jalpha", help="constrained functional values")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--epsilons", default="0.0,0.1,0.2,0.4")
    _add_common_flags(sp)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        build_parser().print_help()
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] not in COMMANDS:
        sys.stderr.write(f"unknown command: {argv[0]}\n")
        build_parser().print_usage(sys.stderr)
        return EXIT_USAGE

    parser = build_parser()
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        config = build_config(args)
        inputs, results, csv_text, figure = _HANDLERS[args.command](args, config)
        if getattr(args, "no_plot", False):
            figure = None
        meta = _emit(config, results, csv_text=csv_text, figure=figure)
        if meta:
            results = dict(results, artifacts=meta)
        wall = time.perf_counter() - t0
        # execution/IO details do not affect results and stay out of
        # the payload hash, so parallel runs match sequential ones
        hashed = {k: v for k, v in dataclasses.asdict(config).items()
                  if k not in ("parallelism", "output_path")}
        report = make_report(args.command, inputs, results, wall, hashed)
        if config.output_format == "csv" and csv_text is not None \
                and not config.output_path:
            sys.stdout.write(csv_text)
        else:
            sys.stdout.write(report.payload() + "\n")
        return EXIT_OK
    except ContractError as exc:
        sys.stderr.write(f"hypothesis/contract error: {exc}\n")
        return EXIT_CONTRACT
    except LiouvilleError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
