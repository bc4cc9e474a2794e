#!/usr/bin/env python3
"""
Rotation Algebra Toolkit

Norms, finite-section spectra, averaging toward the conditional expectation P,
the module E = C(T) and the non-spectrality witness u_1 - lambda for the
weighted crossed product A of C(T) by an irrational rotation.

Usage:
    python rotation_algebra.py norms elements/u3.json --L 16 --L 32

    python rotation_algebra.py witness --lambda 2 --N 30 --L 64 --out results/witness

    python rotation_algebra.py simplicity elements/random.json --epsilon 1e-3

    python rotation_algebra.py module phi.json --tol 1e-6 --target eta.json

    python rotation_algebra.py spectrum --almost-mathieu 1.0 --L 10 --L 20 --z0 0 --z0 0.3

Exit codes: 0 success, 1 internal error, 2 domain or validation error,
3 no averaging plan within the resource ceiling.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.averaging import reproduce_estimate
from src.banach_module import ModuleVector, cyclic_solution, nonunitarizability_report, reach_target
from src.config import RunConfig, load_run_config
from src.crossed_algebra import RotationParameter, Weight
from src.datasets import almost_mathieu_element
from src.element_loader import load_element, load_torus_function, save_element
from src.errors import NotSelfAdjoint, RotationAlgebraError
from src.report_generator import (
    ReportGenerator,
    interval,
    module_payload,
    module_summary,
    norms_summary,
    simplicity_payload,
    simplicity_summary,
    spectral_payload,
    spectrum_summary,
    witness_payload,
    witness_summary,
)
from src.representation import default_base_points, is_self_adjoint, nonspectrality_witness, spectral_report
from src.torus_function import sup_norm

logger = logging.getLogger("rotation_algebra")


def _banner(title: str, config: RunConfig):
    print("=" * 80)
    print(title)
    print("=" * 80)
    print(f"theta: {config.theta!r}")
    print(f"sigma: {config.sigma!r}")
    print(f"Output: {config.output_dir}")
    print("=" * 80)
    print()


def _progress(done: int, total: int, pair, seconds: float):
    print(f"[{done}/{total}] L={pair[0]} z0={pair[1]:.6f} ({seconds:.2f}s)")


def _parameters(config: RunConfig):
    return RotationParameter.from_strings(config.theta, config.convergents), Weight(config.sigma)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_norms(args, config: RunConfig) -> int:
    F, meta = load_element(args.element, config.convergents)
    _banner("NORMS", config)
    z0s = sorted(set(config.z0s) | set(default_base_points(config.seed)))
    report = spectral_report(
        F, config.Ls, z0s,
        element_id=meta.get("id", Path(args.element).stem),
        workers=config.workers, grid=config.grid, progress=_progress,
    )
    print(norms_summary(report))
    path = ReportGenerator(config.output_dir).write_report("norms", spectral_payload(report))
    print(f"✓ Report: {path}")
    return 0


def cmd_witness(args, config: RunConfig) -> int:
    theta, _ = _parameters(config)
    _banner("NON-SPECTRALITY WITNESS", config)
    witness = nonspectrality_witness(
        config.lam, N=config.N, L=config.Ls[-1], sigma=config.sigma, theta=theta, grid=config.grid
    )
    print(witness_summary(witness))
    reports = ReportGenerator(config.output_dir)
    print(f"✓ Report: {reports.write_report('witness', witness_payload(witness))}")
    print(f"✓ Ratios: {reports.write_ratio_csv(witness)}")
    return 0 if witness.passed else 2


def cmd_simplicity(args, config: RunConfig) -> int:
    F, _ = load_element(args.element, config.convergents)
    _banner("SIMPLICITY ESTIMATE", config)
    report = reproduce_estimate(F, config.epsilon, grid=config.grid)
    print(simplicity_summary(report))
    path = ReportGenerator(config.output_dir).write_report("simplicity", simplicity_payload(report))
    print(f"✓ Report: {path}")
    # measured >= 2 epsilon would contradict the a priori bound
    return 0 if report.passed else 1


def cmd_module(args, config: RunConfig) -> int:
    theta, weight = _parameters(config)
    phi = ModuleVector.of(load_torus_function(args.phi), config.grid)
    _banner("MODULE E", config)
    solution = cyclic_solution(phi, config.tol, theta, weight, grid=config.grid)
    rows = nonunitarizability_report(args.nmax, config.sigma, theta)

    target = None
    if args.target:
        eta = load_torus_function(args.target)
        _, residual = reach_target(phi, eta, config.tol, theta, weight, config.grid)
        target = {
            "file": str(args.target),
            "residual_upper": residual,
            "eta_sup": interval(sup_norm(eta, config.grid)),
        }
        print(f"Target {args.target}: ||F_eta phi - eta||_inf <= {residual:.3e}")

    print(module_summary(solution, rows, config.tol))
    reports = ReportGenerator(config.output_dir)
    path = reports.write_report("module", module_payload(solution, rows, config.tol, target))
    element_path = reports.report_path("module", "element.json")
    save_element(solution.element, str(element_path), {"origin": "cyclic_solver", "phi": str(args.phi)})
    print(f"✓ Report: {path}")
    print(f"✓ Element: {element_path}")
    return 0


def cmd_spectrum(args, config: RunConfig) -> int:
    lambda_param = None
    if args.almost_mathieu is not None:
        theta, weight = _parameters(config)
        lambda_param = args.almost_mathieu
        F = almost_mathieu_element(lambda_param, theta, weight)
        element_id = f"almost_mathieu_{lambda_param:g}"
    elif args.element:
        F, meta = load_element(args.element, config.convergents)
        element_id = meta.get("id", Path(args.element).stem)
    else:
        raise RotationAlgebraError("spectrum needs an element file or --almost-mathieu")

    if not is_self_adjoint(F):
        raise NotSelfAdjoint(f"{element_id} is not self-adjoint")
    _banner("FINITE-SECTION SPECTRUM", config)
    report = spectral_report(
        F, config.Ls, config.z0s, element_id=element_id,
        workers=config.workers, grid=config.grid, progress=_progress,
    )
    reports = ReportGenerator(config.output_dir)
    csv_path = reports.write_sweep_csv(report, F.theta.theta, lambda_param)
    print(spectrum_summary(report, csv_path))
    print(f"✓ Report: {reports.write_report('spectrum', spectral_payload(report))}")
    return 0


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='Flat key=value config file (flags win)')
    common.add_argument('--theta', type=float, default=None, help='Rotation number (default: golden mean conjugate)')
    common.add_argument('--convergents', default=None, help='Comma-separated p/q convergents of theta')
    common.add_argument('--sigma', type=float, default=None, help='Weight base (default: e)')
    common.add_argument('--grid', type=int, default=None, help='Sup-norm grid size (default: 256)')
    common.add_argument('--L', dest='Ls', type=int, action='append', default=None,
                        help='Truncation half-size, repeatable (default: 16, 32, 64)')
    common.add_argument('--z0', dest='z0s', type=float, action='append', default=None,
                        help='Base point, repeatable (default: 0)')
    common.add_argument('--tol', type=float, default=None, help='Residual tolerance (default: 1e-6)')
    common.add_argument('--epsilon', type=float, default=None, help='Averaging tolerance (default: 1e-3)')
    common.add_argument('--lambda', dest='lam', type=complex, default=None, help='Witness parameter (default: 2)')
    common.add_argument('--N', type=int, default=None, help='Witness partial sums (default: 30)')
    common.add_argument('--seed', type=int, default=None, help='Seed for sampled base points (default: 0)')
    common.add_argument('--out', dest='output_dir', default=None, help='Output directory (default: results)')
    common.add_argument('--workers', type=int, default=None, help='Parallel (L, z0) workers (default: 4)')
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(
        description='Computations in the weighted irrational rotation algebra'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('norms', parents=[common], help='A-norm, l1-norm and operator-norm sandwich')
    p.add_argument('element', help='AlgebraElement JSON file')
    p.set_defaults(handler=cmd_norms)

    p = sub.add_parser('witness', parents=[common], help='Evidence that u_1 - lambda is invertible in B but not in A')
    p.set_defaults(handler=cmd_witness)

    p = sub.add_parser('simplicity', parents=[common], help='Average an element toward P(F)')
    p.add_argument('element', help='AlgebraElement JSON file')
    p.set_defaults(handler=cmd_simplicity)

    p = sub.add_parser('module', parents=[common], help='Cyclic construction in E = C(T)')
    p.add_argument('phi', help='TorusFunction JSON file')
    p.add_argument('--target', default=None, help='TorusFunction JSON file eta to reach as F_eta phi')
    p.add_argument('--nmax', type=int, default=8, help='Rows of the non-unitarizability table (default: 8)')
    p.set_defaults(handler=cmd_module)

    p = sub.add_parser('spectrum', parents=[common], help='Eigenvalue sweep of a self-adjoint element')
    p.add_argument('element', nargs='?', default=None, help='AlgebraElement JSON file')
    p.add_argument('--almost-mathieu', type=float, default=None, metavar='LAMBDA',
                   help='Sweep u_1 + u_1* + LAMBDA (v + v*) instead of a file')
    p.set_defaults(handler=cmd_spectrum)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    overrides = {
        'theta': args.theta,
        'sigma': args.sigma,
        'grid': args.grid,
        'Ls': sorted(args.Ls) if args.Ls else None,
        'z0s': args.z0s,
        'tol': args.tol,
        'epsilon': args.epsilon,
        'lam': args.lam,
        'N': args.N,
        'seed': args.seed,
        'output_dir': args.output_dir,
        'workers': args.workers,
        'convergents': [c.strip() for c in args.convergents.split(',')] if args.convergents else None,
    }

    try:
        config = load_run_config(args.config, overrides)
        return args.handler(args, config)
    except RotationAlgebraError as e:
        print(f"Error ({type(e).__name__}): {e}")
        return e.exit_code
    except Exception as e:
        logger.exception("internal error")
        print(f"Internal error: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
