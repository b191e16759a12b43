import logging
import os

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Numerical constants shared across modules.
DEFAULT_GRID_EXP = 16
MIN_GRID_EXP = 8
MAX_GRID_EXP = 20
DEFAULT_BAND = 64
NORM_TOL = 1e-8
QUADRATURE_TOL = 1e-10
DROP_TOL = 1e-15
BOUNDARY_TOL = 1e-8
ARC_TOL = 1e-12
UNIMODULAR_TOL = 1e-10
MEAS_TOL = 1e-9
RESIDUAL_TOL = 1e-9
LINF_RESIDUAL_TOL = 1e-8
KERNEL_TOL = 1e-12
ORACLE_TOL = 1e-6


class LacunaryConfig:
    """Configuration class containing arguments for the CLI and the service.

    Contains grid, band, tolerance and search settings. Values passed to the
    constructor win over environment variables, which win over defaults.
    """

    grid_exp: int
    band: int
    norm_tol: float
    polygon_sides: int
    oracle_reps: int
    oracle_grid_exp: int
    search_degree: int
    scan_workers: int
    log_level: str

    def __init__(
        self,
        grid_exp: int = None,
        band: int = None,
        norm_tol: float = None,
        polygon_sides: int = None,
        oracle_reps: int = None,
        oracle_grid_exp: int = None,
        search_degree: int = None,
        scan_workers: int = None,
        log_level: str = None,
    ):
        """Constructor for configuration class.

        Args:
        grid_exp:
            Exponent q of the 2^q quadrature grid used for norms and moduli.
        band:
            Half-width B of the default enumeration band [-B, B].
        norm_tol:
            Tolerance of the unit-norm gates.
        polygon_sides:
            Number K of sides of the polygon replacing each modulus
            constraint in the feasibility oracle.
        oracle_reps:
            Number R of random objectives tried by the oracle.
        oracle_grid_exp:
            Grid exponent of the oracle's linear program.
        search_degree:
            Default degree D of the general L1 witness search.
        scan_workers:
            Number of threads running scan trials.
        log_level:
            Root logging level used by the CLI.
        """

        self.grid_exp = _pick(grid_exp, "LACUNARY_GRID_EXP", DEFAULT_GRID_EXP, int)
        self.band = _pick(band, "LACUNARY_BAND", DEFAULT_BAND, int)
        self.norm_tol = _pick(norm_tol, "LACUNARY_NORM_TOL", NORM_TOL, float)
        self.polygon_sides = _pick(polygon_sides, "LACUNARY_POLYGON_SIDES", 64, int)
        self.oracle_reps = _pick(oracle_reps, "LACUNARY_ORACLE_REPS", 8, int)
        self.oracle_grid_exp = _pick(oracle_grid_exp, "LACUNARY_ORACLE_GRID_EXP", 8, int)
        self.search_degree = _pick(search_degree, "LACUNARY_SEARCH_DEGREE", 8, int)
        self.scan_workers = _pick(scan_workers, "LACUNARY_SCAN_WORKERS", 1, int)
        self.log_level = _pick(log_level, "LACUNARY_LOG_LEVEL", "WARNING", str).upper()

        if not MIN_GRID_EXP <= self.grid_exp <= MAX_GRID_EXP:
            raise ValueError(
                f"Grid exponent must lie in {MIN_GRID_EXP}..{MAX_GRID_EXP}, got {self.grid_exp}."
            )
        if not 4 <= self.oracle_grid_exp <= MAX_GRID_EXP:
            raise ValueError(f"Oracle grid exponent out of range: {self.oracle_grid_exp}.")
        if self.band < 1:
            raise ValueError(f"Band must be positive, got {self.band}.")
        if self.norm_tol <= 0:
            raise ValueError("Norm tolerance must be positive.")
        if self.polygon_sides < 8:
            raise ValueError("Polygon needs at least 8 sides.")
        if self.oracle_reps < 1 or self.search_degree < 1 or self.scan_workers < 1:
            raise ValueError("Oracle repetitions, search degree and workers must be >= 1.")

        logger.debug(f"Config: {self}")

    def __str__(self):
        """Stringify function to return contents of config object for logging"""
        return (
            f"q={self.grid_exp} band={self.band} norm_tol={self.norm_tol} "
            f"K={self.polygon_sides} R={self.oracle_reps} oracle_q={self.oracle_grid_exp} "
            f"D={self.search_degree} workers={self.scan_workers} log={self.log_level}"
        )


def _pick(value, env_name: str, default, cast):
    if value is not None:
        return cast(value)
    raw = os.getenv(env_name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ValueError(f"{env_name}={raw!r} is not a valid {cast.__name__}") from e
