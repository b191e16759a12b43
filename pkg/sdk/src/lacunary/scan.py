"""Seeded experiment scans over families of spectral sets.

Each trial draws its own generator from SeedSequence([seed, set_index, trial]),
so rows do not depend on thread scheduling. Rows come back ordered by
(set_index, trial) and only the elapsed_s column varies between runs.
"""

import logging
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq

from . import __version__, extremality, factorization
from .certificates import L1Witness
from .circle import TrigPoly, l1_norm_estimate, linf_enclosure
from .exceptions import NumericalAnomalyError, PreconditionError
from .expressions import parse_function
from .schemas import ExperimentConfig, ScanRow, ScanSummary, VerdictCounts
from .spectra import SpectralSet

logger = logging.getLogger(__name__)

TIMING_COLUMNS = ["elapsed_s"]


def random_function(
    rng: np.random.Generator,
    spectral_set: SpectralSet,
    sparsity: int,
    band: int,
    norm: str = "1",
    analytic: bool = False,
) -> TrigPoly:
    """Random f with at most `sparsity` frequencies from Λ ∩ band, unit norm in L¹ or L∞."""
    candidates = spectral_set.members_in_band(0 if analytic else -band, band)
    if not candidates:
        raise PreconditionError(f"Λ = {spectral_set} has no members in the band of half-width {band}")
    chosen = rng.choice(candidates, size=min(sparsity, len(candidates)), replace=False)
    values = rng.standard_normal(len(chosen)) + 1j * rng.standard_normal(len(chosen))
    f = TrigPoly(dict(zip(sorted(int(k) for k in chosen), values.tolist())))
    scale = l1_norm_estimate(f).value if norm == "1" else linf_enclosure(f).value
    return f / scale


def monomial_basis(spectral_set: SpectralSet, degree: int) -> list[TrigPoly]:
    return [TrigPoly.monomial(k) for k in spectral_set.members_in_band(-degree, degree)]


def _norm_defect(witness: L1Witness) -> float:
    return max(abs(witness.norm_u - 1), abs(witness.norm_v - 1))


def run_check(config: ExperimentConfig, f: TrigPoly, spectral_set: SpectralSet, seed: int = 0) -> dict:
    """One classifier or witness call; returns the payload columns of a row."""
    check = config.check
    if check in ("periodic", "cofinite-l1"):
        build = extremality.periodic_witness if check == "periodic" else extremality.cofinite_l1_witness
        witness = build(f, spectral_set, config.q)
        return dict(verdict="NonExtreme", residual=witness.residual, norm_defect=_norm_defect(witness))
    if check == "search-l1":
        found = extremality.general_l1_witness_search(f, spectral_set, config.degree, q=config.q)
        if isinstance(found, L1Witness):
            return dict(verdict="NonExtreme", residual=found.residual, norm_defect=_norm_defect(found))
        return dict(verdict="Inconclusive", detail=f"rank={found.rank} nullity={found.nullity}")
    if check == "classify-h1":
        certificate = factorization.classify_h1_extreme(f, q=config.q)
        detail = ""
        if certificate.factorization is not None:
            detail = f"blaschke_degree={certificate.factorization.blaschke_degree}"
        return dict(verdict=certificate.verdict, norm_defect=abs(certificate.norm - 1), detail=detail)
    if check == "classify-hinf":
        certificate = factorization.classify_hinf_extreme(f, spectral_set, config.q)
        return dict(verdict=certificate.verdict, detail=certificate.log_integral.classification if certificate.log_integral else "")
    if check == "witness-linf":
        witness = extremality.cofinite_linf_witness(f, spectral_set, config.q)
        return dict(
            verdict="NonExtreme",
            residual=max(witness.residuals, default=0.0),
            norm_defect=max(witness.sup_plus, witness.sup_minus) - 1,
        )
    if check == "classify-linf":
        certificate = extremality.classify_linf_cofinite(f, spectral_set, config.q)
        residual = None
        if certificate.linf_witness is not None:
            residual = max(certificate.linf_witness.residuals, default=0.0)
        return dict(verdict=certificate.verdict, residual=residual)
    if check == "dset":
        certificate = extremality.dset_extreme_certificate(f, spectral_set, config.q)
        return dict(verdict=certificate.verdict, detail=f"measure={certificate.measure.estimate}")
    result = extremality.linf_feasibility_oracle(
        f,
        monomial_basis(spectral_set, config.degree),
        sides=config.sides,
        repetitions=config.oracle_reps,
        seed=seed,
    )
    detail = f"attempts={result.attempts}"
    if result.witness is not None:
        return dict(verdict=result.verdict, norm_defect=max(result.witness.sup_plus, result.witness.sup_minus) - 1, detail=detail)
    return dict(verdict=result.verdict, detail=detail)


def run_trial(config: ExperimentConfig, set_index: int, descriptor: str, trial: int) -> ScanRow:
    source = config.random
    master = source.seed if source is not None else 0
    seed = [master, set_index, trial]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    spectral_set = SpectralSet.parse(descriptor)

    started = time.perf_counter()
    columns: dict = dict(verdict="Refused")
    f_text = ""
    try:
        if config.f is not None:
            f = parse_function(config.f)
        else:
            f = random_function(
                rng, spectral_set, source.sparsity, source.band, norm=config.p, analytic=source.analytic
            )
        f_text = repr(f)
        columns = run_check(config, f, spectral_set, seed=int(rng.integers(2**31)))
    except PreconditionError as e:
        columns = dict(verdict="Refused", detail=str(e).splitlines()[0])
    except NumericalAnomalyError as e:
        logger.error(f"trial {trial} on {descriptor}: {e}")
        columns = dict(verdict="Anomaly", detail=str(e).splitlines()[0])
    return ScanRow(
        set_index=set_index,
        set_descriptor=spectral_set.canonical(),
        trial=trial,
        seed=seed,
        f=f_text,
        elapsed_s=time.perf_counter() - started,
        **columns,
    )


def scan(config: ExperimentConfig) -> tuple[list[ScanRow], ScanSummary]:
    descriptors = config.descriptors()
    tasks = [(i, d, t) for i, d in enumerate(descriptors) for t in range(config.repetitions)]
    logger.debug(f"scan: {len(tasks)} trials over {len(descriptors)} sets with {config.workers} workers")

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        rows = list(pool.map(lambda task: run_trial(config, *task), tasks))

    per_set = []
    for i, descriptor in enumerate(descriptors):
        counts = Counter(row.verdict for row in rows if row.set_index == i)
        per_set.append(VerdictCounts(set_descriptor=descriptor, counts=dict(sorted(counts.items()))))
    totals = Counter(row.verdict for row in rows)

    residuals = np.array([row.residual for row in rows if row.residual is not None])
    quantiles = {}
    if residuals.size:
        for label, level in (("min", 0.0), ("median", 0.5), ("q90", 0.9), ("max", 1.0)):
            quantiles[label] = float(np.quantile(residuals, level))

    summary = ScanSummary(
        library_version=__version__,
        config=config,
        trials=len(rows),
        per_set=per_set,
        totals=dict(sorted(totals.items())),
        residual_quantiles=quantiles,
        output=config.output,
    )
    return rows, summary


def rows_frame(rows: list[ScanRow], include_timings: bool = True) -> pd.DataFrame:
    frame = pd.DataFrame([row.model_dump() for row in rows])
    frame["seed"] = frame["seed"].map(lambda s: "-".join(map(str, s)))
    if not include_timings:
        frame = frame.drop(columns=TIMING_COLUMNS)
    return frame


def write_rows(rows: list[ScanRow], path: str, output_format: str = "csv") -> Optional[str]:
    frame = rows_frame(rows)
    if output_format == "parquet":
        pq.write_table(pa.Table.from_pandas(frame), path)
    else:
        frame.to_csv(path, index=False)
    logger.debug(f"wrote {len(rows)} scan rows to {path}")
    return path
