"""Command-line driver: one subcommand per library operation.

Exit codes: 0 a verdict was produced (Inconclusive included), 1 the input
was refused, 2 a numerical anomaly was detected.
"""

import logging
import time
from pathlib import Path
from typing import Annotated, Callable, Optional

import typer
from pydantic import BaseModel, ValidationError

from . import __version__, extremality, factorization, scan as scanner, spectra, toeplitz
from .certificates import ExtremalityCertificate, L1Witness
from .exceptions import NumericalAnomalyError, PreconditionError
from .expressions import parse_function
from .lac_config import LacunaryConfig
from .schemas import ExperimentConfig, Report
from .spectra import SpectralSet

logger = logging.getLogger(__name__)

EXIT_REFUSED = 1
EXIT_ANOMALY = 2

app = typer.Typer(
    help="Extreme points of unit balls of lacunary L¹ and L∞ spaces: witnesses and certificates.",
    no_args_is_help=True,
    add_completion=False,
)

SetOption = Annotated[str, typer.Option("--set", help="Spectral-set descriptor, e.g. 'Z \\ {0}' or 'AP(2,0)'.")]
FunctionOption = Annotated[str, typer.Option("--f", help="Function expression, e.g. '(pi/4)*(1+z)'.")]
GridOption = Annotated[Optional[int], typer.Option("--grid-exp", help="Grid exponent q (2^q points).")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Write the report here instead of stdout.")]
FormatOption = Annotated[Optional[str], typer.Option("--format", help="json, csv or parquet (scan rows only).")]


class _State:
    config: LacunaryConfig = None


state = _State()


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Root logging level.")] = None,
):
    try:
        state.config = LacunaryConfig(log_level=log_level)
    except ValueError as e:
        typer.echo(f"configuration error: {e}", err=True)
        raise typer.Exit(EXIT_REFUSED)
    logging.basicConfig(
        level=state.config.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _config() -> LacunaryConfig:
    if state.config is None:
        state.config = LacunaryConfig()
    return state.config


def _grid(q: Optional[int]) -> int:
    return q if q is not None else _config().grid_exp


def _emit(text: str, out: Optional[Path], err: bool = False):
    if out is None:
        typer.echo(text, err=err)
    else:
        out.write_text(text + "\n", encoding="utf-8")


def _run(command: str, echo: dict, out: Optional[Path], body: Callable[[], tuple], err: bool = False):
    """Run body() -> (verdict, result model, residuals) and write the Report."""
    started = time.perf_counter()
    try:
        verdict, result, residuals = body()
    except NumericalAnomalyError as e:
        logger.error(f"{command}: {e}")
        typer.echo(f"numerical anomaly: {e}", err=True)
        raise typer.Exit(EXIT_ANOMALY)
    except (PreconditionError, ValidationError, ValueError) as e:
        typer.echo(f"refused: {e}", err=True)
        raise typer.Exit(EXIT_REFUSED)
    report = Report(
        library_version=__version__,
        command=command,
        config=echo,
        verdict=verdict,
        result=result.model_dump(mode="json") if isinstance(result, BaseModel) else result,
        residuals={k: float(v) for k, v in residuals.items() if v is not None},
        timings={"total_s": time.perf_counter() - started},
    )
    _emit(report.model_dump_json(indent=2), out, err)


def _witness_residuals(witness: L1Witness) -> dict:
    return {
        "spectral": witness.residual,
        "norm_u": witness.norm_u - 1,
        "norm_v": witness.norm_v - 1,
        "mean_shift": witness.mean_shift,
    }


@app.command("set-info")
def set_info(
    set_text: SetOption,
    band: Annotated[Optional[int], typer.Option("--band", help="Default band half-width B.")] = None,
    out: OutOption = None,
):
    """Canonical form, family tags, period and finite complement of a set."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=band or _config().band)
        return None, spectra.describe(spectral_set), {}

    _run("set-info", {"set": set_text, "band": band}, out, body)


@app.command("witness-l1")
def witness_l1(
    set_text: SetOption,
    f_text: FunctionOption,
    degree: Annotated[Optional[int], typer.Option("--degree", help="Degree D of the general search.")] = None,
    method: Annotated[str, typer.Option("--method", help="auto, periodic, cofinite or search.")] = "auto",
    grid_exp: GridOption = None,
    out: OutOption = None,
):
    """Non-extremality witness in ball(L¹_Λ)."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=_config().band)
        f = parse_function(f_text)
        certificate = extremality.l1_certificate(
            f,
            spectral_set,
            method=method,
            degree=degree or _config().search_degree,
            q=_grid(grid_exp),
            norm_tol=_config().norm_tol,
        )
        residuals = _witness_residuals(certificate.l1_witness) if certificate.l1_witness else {}
        return certificate.verdict, certificate, residuals

    _run("witness-l1", {"set": set_text, "f": f_text, "degree": degree, "method": method, "grid_exp": grid_exp}, out, body)


@app.command("witness-linf")
def witness_linf(set_text: SetOption, f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """Non-extremality witness f ± (1-|f|)p in ball(L∞_Λ) for cofinite Λ."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=_config().band)
        f = parse_function(f_text)
        witness = extremality.cofinite_linf_witness(f, spectral_set, _grid(grid_exp))
        certificate = ExtremalityCertificate(
            verdict="NonExtreme",
            p="inf",
            set_descriptor=spectral_set.canonical(),
            f=f,
            criterion="cofinite L∞ witness",
            linf_witness=witness,
        )
        residuals = {"spectral": max(witness.residuals, default=0.0), "sup": max(witness.sup_plus, witness.sup_minus) - 1}
        return certificate.verdict, certificate, residuals

    _run("witness-linf", {"set": set_text, "f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("classify-h1")
def classify_h1(f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """Extreme points of ball(H¹): outer functions of unit norm."""

    def body():
        certificate = factorization.classify_h1_extreme(parse_function(f_text), _config().norm_tol, _grid(grid_exp))
        return certificate.verdict, certificate, {"norm": certificate.norm - 1}

    _run("classify-h1", {"f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("classify-hinf")
def classify_hinf(set_text: SetOption, f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """Extreme points of ball(H∞(Λ)) by the log-integral criterion."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=_config().band)
        certificate = factorization.classify_hinf_extreme(
            parse_function(f_text), spectral_set, _grid(grid_exp), _config().norm_tol
        )
        return certificate.verdict, certificate, {"norm": certificate.norm - 1}

    _run("classify-hinf", {"set": set_text, "f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("classify-linf")
def classify_linf(set_text: SetOption, f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """Extreme points of ball(L∞_Λ) for cofinite Λ."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=_config().band)
        certificate = extremality.classify_linf_cofinite(
            parse_function(f_text), spectral_set, _grid(grid_exp), _config().norm_tol
        )
        return certificate.verdict, certificate, {}

    _run("classify-linf", {"set": set_text, "f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("dset-check")
def dset_check(set_text: SetOption, f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """Sufficient D-set certificate: |f| = 1 on a set of positive measure."""

    def body():
        spectral_set = SpectralSet.parse(set_text, band_default=_config().band)
        certificate = extremality.dset_extreme_certificate(
            parse_function(f_text), spectral_set, _grid(grid_exp), norm_tol=_config().norm_tol
        )
        return certificate.verdict, certificate, {}

    _run("dset-check", {"set": set_text, "f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("log-integral")
def log_integral(f_text: FunctionOption, grid_exp: GridOption = None, out: OutOption = None):
    """∫ log(1 - |f|) dm, finite or divergent."""

    def body():
        report = factorization.log_integral(parse_function(f_text), _grid(grid_exp), _config().norm_tol)
        return report.classification, report, {"quadrature": report.error}

    _run("log-integral", {"f": f_text, "grid_exp": grid_exp}, out, body)


@app.command("toeplitz-kernel")
def toeplitz_kernel(
    phi_text: Annotated[str, typer.Option("--phi", help="Symbol expression, e.g. 'zbar^3'.")],
    cap: Annotated[int, typer.Option("--cap", help="Degree cap D.")],
    out: OutOption = None,
):
    """Truncated kernel of the Toeplitz operator with symbol φ."""

    def body():
        kernel = toeplitz.kernel_basis(parse_function(phi_text), cap)
        return f"dimension {kernel.dimension}", kernel, {"kernel": kernel.residual}

    _run("toeplitz-kernel", {"phi": phi_text, "cap": cap}, out, body)


@app.command("oracle")
def oracle(
    f_text: FunctionOption,
    set_text: Annotated[Optional[str], typer.Option("--set", help="Use the monomials of Λ ∩ [-D, D] as basis.")] = None,
    degree: Annotated[Optional[int], typer.Option("--degree", help="Degree D of the monomial basis.")] = None,
    phi_text: Annotated[Optional[str], typer.Option("--phi", help="Use a Toeplitz kernel basis instead.")] = None,
    cap: Annotated[Optional[int], typer.Option("--cap", help="Degree cap of the kernel basis.")] = None,
    grid_exp: Annotated[Optional[int], typer.Option("--grid-exp", help="Grid exponent of the linear program.")] = None,
    reps: Annotated[Optional[int], typer.Option("--reps", help="Number of random objectives.")] = None,
    seed: Annotated[int, typer.Option("--seed")] = 0,
    out: OutOption = None,
):
    """Brute-force L∞ feasibility oracle by linear programming."""

    def body():
        config = _config()
        f = parse_function(f_text)
        if phi_text is not None:
            if cap is None:
                raise PreconditionError("--phi needs --cap")
            basis = toeplitz.kernel_basis(parse_function(phi_text), cap).basis
        elif set_text is not None:
            spectral_set = SpectralSet.parse(set_text, band_default=config.band)
            basis = scanner.monomial_basis(spectral_set, degree or config.search_degree)
        else:
            raise PreconditionError("give --set or --phi to choose the basis")
        result = extremality.linf_feasibility_oracle(
            f,
            basis,
            q=grid_exp or config.oracle_grid_exp,
            sides=config.polygon_sides,
            repetitions=reps or config.oracle_reps,
            seed=seed,
            norm_tol=config.norm_tol,
        )
        residuals = {}
        if result.witness is not None:
            residuals["sup"] = max(result.witness.sup_plus, result.witness.sup_minus) - 1
        return result.verdict, result, residuals

    echo = {"f": f_text, "set": set_text, "degree": degree, "phi": phi_text, "cap": cap, "seed": seed, "reps": reps}
    _run("oracle", echo, out, body)


@app.command("scan")
def scan(
    config_path: Annotated[Path, typer.Option("--config", help="Experiment config (JSON).")],
    reps: Annotated[Optional[int], typer.Option("--reps", help="Override the number of trials per set.")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the master seed.")] = None,
    out: OutOption = None,
    output_format: FormatOption = None,
):
    """Seeded trials over a family of sets; rows to CSV/Parquet, summary as JSON."""
    try:
        raw = ExperimentConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
        overrides = {}
        if reps is not None:
            overrides["repetitions"] = reps
        if out is not None:
            overrides["output"] = str(out)
        if output_format is not None:
            overrides["format"] = output_format
        data = raw.model_dump()
        data.update(overrides)
        if seed is not None and data.get("f") is None:
            data["random"] = {**(data.get("random") or {}), "seed": seed}
        config = ExperimentConfig.model_validate(data)
    except (OSError, ValidationError, ValueError) as e:
        typer.echo(f"refused: {e}", err=True)
        raise typer.Exit(EXIT_REFUSED)
    if config.format == "parquet" and config.output is None:
        typer.echo("refused: parquet rows need --out", err=True)
        raise typer.Exit(EXIT_REFUSED)
    # CSV rows without --out go to stdout, so the summary moves to stderr.
    rows_to_stdout = config.format == "csv" and config.output is None

    def body():
        rows, summary = scanner.scan(config)
        if rows_to_stdout:
            typer.echo(scanner.rows_frame(rows).to_csv(index=False), nl=False)
            result = summary.model_dump(mode="json")
        elif config.format in ("csv", "parquet"):
            scanner.write_rows(rows, config.output, config.format)
            result = summary.model_dump(mode="json")
        else:
            result = {**summary.model_dump(mode="json"), "rows": [row.model_dump(mode="json") for row in rows]}
        residuals = {f"residual_{k}": v for k, v in summary.residual_quantiles.items()}
        return None, result, residuals

    summary_out = None
    if config.output is not None and config.format in ("csv", "parquet"):
        summary_out = Path(config.output).with_suffix(".summary.json")
    elif config.output is not None:
        summary_out = Path(config.output)
    _run("scan", config.model_dump(mode="json"), summary_out, body, err=rows_to_stdout)


if __name__ == "__main__":
    app()
