"""
Report generator for command results (JSON/CSV/console text).
"""

import logging
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from .averaging import SimplicityReport
from .banach_module import CyclicSolution, NonUnitarizabilityRow
from .element_loader import element_to_dict, save_json
from .representation import SpectralReport, WitnessReport

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["theta", "lambda_param", "L", "z0", "eigenvalue_index", "eigenvalue"]


def jsonable(value: Any) -> Any:
    """
    Convert report values to canonical JSON types.

    Complex numbers become {"re", "im"}, tuples become lists and non-finite
    floats become null.
    """
    if is_dataclass(value) and not isinstance(value, type):
        return jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, complex):
        return {"re": jsonable(value.real), "im": jsonable(value.imag)}
    if isinstance(value, int):
        return value
    if hasattr(value, "item"):
        return jsonable(value.item())
    value = float(value)
    return value if math.isfinite(value) else None


def interval(pair) -> Dict[str, float]:
    return {"lower": float(pair[0]), "upper": float(pair[1])}


class ReportGenerator:
    """Write `<out>/<command>_report.json` files and sweep CSVs."""

    def __init__(self, output_dir: str):
        """
        Initialize report generator.

        Args:
            output_dir: Directory receiving all reports
        """
        self.output_dir = Path(output_dir)

    def report_path(self, command: str, suffix: str = "report.json") -> Path:
        return self.output_dir / f"{command}_{suffix}"

    def write_report(self, command: str, payload: Dict[str, Any]) -> Path:
        path = self.report_path(command)
        save_json(jsonable(payload), str(path))
        logger.info("Report saved: %s", path)
        return path

    def write_sweep_csv(self, report: SpectralReport, theta: float, lambda_param: Optional[float] = None) -> Path:
        """
        Eigenvalue sweep CSV, one row per eigenvalue, rows ordered by (L, z0, index).

        Args:
            report: Spectral report with eigenvalues
            theta: Rotation number
            lambda_param: Almost Mathieu coupling, empty for element files

        Returns:
            Path to the CSV
        """
        df = sweep_frame(report, theta, lambda_param)
        path = self.report_path("spectrum", "sweep.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
        logger.info("Sweep CSV saved: %s (%d rows)", path, len(df))
        return path

    def write_ratio_csv(self, witness: WitnessReport) -> Path:
        df = witness_frame(witness)
        path = self.report_path("witness", "ratios.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
        logger.info("Ratio CSV saved: %s", path)
        return path


# ----------------------------------------------------------------------
# Frames
# ----------------------------------------------------------------------

def sweep_frame(report: SpectralReport, theta: float, lambda_param: Optional[float] = None) -> pd.DataFrame:
    rows = []
    for record in report.records:
        for index, value in enumerate(record.eigenvalues or [], start=1):
            rows.append({
                "theta": theta,
                "lambda_param": lambda_param,
                "L": record.L,
                "z0": record.z0,
                "eigenvalue_index": index,
                "eigenvalue": value,
            })
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def witness_frame(witness: WitnessReport) -> pd.DataFrame:
    bounds = witness.partial_sum_lower_bounds
    return pd.DataFrame({
        "N": list(range(len(bounds))),
        "partial_sum_lower_bound": bounds,
        "ratio": [None] + list(witness.ratios),
    })


def section_frame(report: SpectralReport) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "L": r.L,
            "z0": r.z0,
            "opnorm_lower": r.opnorm_lower,
            "smallest_sv": r.smallest_singular_value,
            "eigenvalues": len(r.eigenvalues) if r.eigenvalues is not None else 0,
            "interior": len(r.interior_eigenvalues) if r.interior_eigenvalues is not None else 0,
        }
        for r in report.records
    ])


def nonunitarizability_frame(rows: List[NonUnitarizabilityRow]) -> pd.DataFrame:
    return pd.DataFrame([{"n": r.n, "norm": r.norm, "ratio": r.ratio} for r in rows])


# ----------------------------------------------------------------------
# Payloads
# ----------------------------------------------------------------------

def spectral_payload(report: SpectralReport) -> Dict[str, Any]:
    return {
        "element_id": report.element_id,
        "norm_A": interval(report.norm_A),
        "norm_l1": interval(report.norm_l1),
        "opnorm": interval(report.opnorm),
        "power_sequence": report.power_sequence,
        "spectral_radius_A_upper": report.certified_upper,
        "sections": [asdict(r) for r in report.records],
    }


def witness_payload(witness: WitnessReport) -> Dict[str, Any]:
    payload = asdict(witness)
    payload["passed"] = witness.passed
    payload["verdict"] = witness.verdict
    return payload


def simplicity_payload(report: SimplicityReport) -> Dict[str, Any]:
    payload = asdict(report)
    payload["passed"] = report.passed
    payload["plan"]["frequency_step"] = report.plan.q
    return payload


def module_payload(
    solution: CyclicSolution,
    rows: List[NonUnitarizabilityRow],
    tol: float,
    target: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    payload = {
        "tol": tol,
        "translates": solution.translates,
        "chi_certified_min": solution.chi_lower,
        "reciprocal_degree": solution.reciprocal_degree,
        "residual_upper": solution.residual,
        "element": element_to_dict(solution.element, {"origin": "cyclic_solver"}),
        "nonunitarizability": [asdict(r) for r in rows],
    }
    if target is not None:
        payload["target"] = target
    return payload


# ----------------------------------------------------------------------
# Console text
# ----------------------------------------------------------------------

def _mark(ok: bool) -> str:
    return "✓" if ok else "✗"


def witness_summary(witness: WitnessReport) -> str:
    table = witness_frame(witness).to_string(index=False, float_format=lambda x: f"{x:.6g}")
    return f"""
{'='*80}
NON-SPECTRALITY WITNESS  u_1 - lambda,  lambda = {witness.lam:g},  sigma = {witness.sigma:g}
{'='*80}

  {_mark(witness.b_invertible)} B-invertible: smallest singular value {witness.min_singular_value:.12f} (bound {witness.singular_bound:.12f}, L = {witness.L})
  {_mark(witness.coefficients_match)} Inverse coefficients -lambda^(-n-1): max deviation {witness.coefficient_deviation:.3e} over {witness.checked_diagonals + 1} diagonals
  {_mark(witness.a_divergent)} A-norm partial sums diverge: last ratio {witness.ratios[-1]:.6f} (limit sigma/|lambda| = {witness.limit_ratio:.6f})

{table}

Verdict: {witness.verdict}
Note: {witness.note}
{'='*80}
"""


def norms_summary(report: SpectralReport) -> str:
    return f"""
{'='*80}
NORMS  {report.element_id}
{'='*80}

  ||F||_A    in [{report.norm_A[0]:.12g}, {report.norm_A[1]:.12g}]
  ||F||_l1   in [{report.norm_l1[0]:.12g}, {report.norm_l1[1]:.12g}]
  ||F||_B    in [{report.opnorm[0]:.12g}, {report.opnorm[1]:.12g}]
  r_A(F)     <= {report.certified_upper:.12g}

{section_frame(report).to_string(index=False)}
{'='*80}
"""


def simplicity_summary(report: SimplicityReport) -> str:
    df = pd.DataFrame([{
        "N": report.N,
        "epsilon": report.epsilon,
        "M": report.plan.M,
        "q": report.plan.q,
        "predicted_error": report.plan.predicted_error,
        "tail": report.tail,
        "error_bound": report.error_bound,
        "measured": report.measured,
    }])
    return f"""
{'='*80}
AVERAGING TOWARD P
{'='*80}

{df.to_string(index=False)}

  {_mark(report.passed)} measured {report.measured:.3e} < 2 epsilon = {2 * report.epsilon:.3e}
{'='*80}
"""


def module_summary(solution: CyclicSolution, rows: List[NonUnitarizabilityRow], tol: float) -> str:
    return f"""
{'='*80}
MODULE E = C(T)
{'='*80}

  Translates:          {solution.translates}
  chi certified min:   {solution.chi_lower:.6e}
  Reciprocal degree:   {solution.reciprocal_degree}
  {_mark(solution.residual < tol)} ||F phi - 1||_inf <= {solution.residual:.3e} (tol {tol:g})

Non-unitarizability (||u_n 1||_inf against the isometric value 1):
{nonunitarizability_frame(rows).to_string(index=False)}
{'='*80}
"""


def spectrum_summary(report: SpectralReport, csv_path: Path) -> str:
    return f"""
{'='*80}
FINITE-SECTION SPECTRUM  {report.element_id}
{'='*80}

{section_frame(report).to_string(index=False)}

Sweep CSV: {csv_path}
{'='*80}
"""
