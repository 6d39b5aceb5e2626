"""
Service for running experiments end to end.
Each run_* function takes the results store and a validated config,
records metric sections and tables in the store, and returns the report.
Mathematical failures raise after the metrics gathered so far are stored.
"""
import logging
import time
from typing import Any, Dict, List, Optional

import numpy as np

from source.errors import ConfigurationError, NotAFrameError, NotRieszError, NumericalError
from source.models.experiment import Command, ExperimentConfig
from source.models.generator_system import CoefArray, GeneratorSystem, RieszReport
from source.models.operator import HsOperator
from source.models.phase_space import LatticeDescriptor
from source.models.sampling import FrameBounds, SamplingScheme, TransferMatrix
from source.results_store import ResultsStore, split_complex
from source.services import config_service, sampling_service, shift_invariant_service

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["L", "a", "b", "scheme", "N", "M", "m", "M_riesz",
                 "alpha_A", "beta_A", "rel_err", "status", "diagnostic"]


def _riesz_section(report: RieszReport) -> Dict[str, Any]:
    return {"m": report.lower, "M": report.upper, "is_riesz": report.is_riesz,
            "route": report.route.value, "diagnostic": report.diagnostic}


def _frame_section(bounds: FrameBounds, transfer: TransferMatrix,
                   tol: Optional[float] = None) -> Dict[str, Any]:
    return {"alpha_A": bounds.alpha_a, "beta_A": bounds.beta_a, "M": transfer.M, "N": transfer.N,
            "is_frame": sampling_service.is_frame(bounds, tol), "diagnostic": bounds.diagnostic}


def _relative_error(reference: HsOperator, estimate: HsOperator) -> float:
    norm = reference.hs_norm()
    error = (reference - estimate).hs_norm()
    return error / norm if norm > 0 else error


def _interpolation_deviation(kit, scheme: SamplingScheme) -> float:
    """max |s_{H_m, n}(lambda) - delta_{m,n} delta_{lambda,0}|."""
    origin = kit.lattice.index[(0, 0)]
    deviation = 0.0
    for m, H in enumerate(kit.recon_ops):
        samples = sampling_service.sample(H, scheme, kit.lattice).values
        target = np.zeros_like(samples)
        target[m, origin] = 1.0
        deviation = max(deviation, float(np.abs(samples - target).max()))
    return deviation


def _fiber_rows(transfer: TransferMatrix, prefix: str, values: np.ndarray) -> List[Dict[str, Any]]:
    rows = []
    for k, xi in enumerate(transfer.transversal.points):
        row = {"xi_x": xi.x, "xi_w": xi.w}
        row.update({f"{prefix}_{j}": float(v) for j, v in enumerate(values[k])})
        rows.append(row)
    return rows


def run_riesz_check(store: ResultsStore, config: ExperimentConfig) -> Dict[str, Any]:
    """
    Riesz bounds of the generator system plus the per-fiber eigenvalues of the Gram fibers.
    """
    system = config_service.build_system(config)
    report = shift_invariant_service.riesz_check(system, config.options.tol)
    transversal, fibers = shift_invariant_service.gram_fibers(system)
    eigenvalues = np.linalg.eigvalsh(fibers)

    store.put_section("riesz", _riesz_section(report))
    store.put_section("system", {"L": system.L, "N": system.N, "lattice_order": len(system.lattice),
                                 "annihilator_order": len(transversal.annihilator)})
    rows = []
    for k, xi in enumerate(transversal.points):
        row = {"xi_x": xi.x, "xi_w": xi.w}
        row.update({f"eig_{j}": float(v) for j, v in enumerate(eigenvalues[k])})
        rows.append(row)
    store.put_table("gram_fibers", ["xi_x", "xi_w"] + [f"eig_{j}" for j in range(system.N)], rows)
    return store.get_section("riesz")


def run_frame_check(store: ResultsStore, config: ExperimentConfig) -> Dict[str, Any]:
    """
    Transfer-matrix frame bounds, determinant bounds when M = N and
    per-fiber singular values. Report-only.
    """
    system = config_service.build_system(config)
    scheme = config_service.build_scheme(config)
    store.put_section("riesz", _riesz_section(shift_invariant_service.riesz_check(system, config.options.tol)))

    transfer = sampling_service.transfer_matrix(sampling_service.cross_seq(system, scheme))
    bounds = sampling_service.frame_bounds(transfer)
    frame = _frame_section(bounds, transfer, config.options.frame_tol)
    if transfer.M == transfer.N:
        det_min, det_max = sampling_service.determinant_bounds(transfer)
        frame.update({"det_min": det_min, "det_max": det_max})
    store.put_section("frame", frame)

    singular = np.linalg.svd(transfer.fibers, compute_uv=False)
    width = singular.shape[1]
    store.put_table("transfer_fibers", ["xi_x", "xi_w"] + [f"sv_{j}" for j in range(width)],
                    _fiber_rows(transfer, "sv", singular))
    return store.get_section("frame")


def _reconstruct_on(system: GeneratorSystem, scheme: SamplingScheme, c: CoefArray,
                    config: ExperimentConfig) -> Dict[str, Any]:
    T = shift_invariant_service.synthesize(system, c)
    samples = sampling_service.sample(T, scheme, system.lattice)
    transfer_shape = (len(system.lattice), system.N, scheme.M)
    C = config_service.build_perturbation(config, transfer_shape)
    kit = sampling_service.reconstruction_kit(system, scheme, C, config.options.tol, config.options.frame_tol)
    T_rec = sampling_service.reconstruct(samples, kit)
    c_rec = sampling_service.coefficient_frame_expansion(samples, kit)
    result = {
        "rel_hs_error": _relative_error(T, T_rec),
        "coef_max_dev": float(np.abs(c_rec.values - c.values).max()),
        "left_inverse_max_dev": float(np.abs(kit.dual_fibers @ kit.transfer.fibers - np.eye(system.N)).max()),
        "dual": "moore_penrose" if C is None else "perturbed",
    }
    if scheme.M == system.N:
        result["interp_max_dev"] = _interpolation_deviation(kit, scheme)
    return result


def run_reconstruct(store: ResultsStore, config: ExperimentConfig) -> Dict[str, Any]:
    """
    synthesize -> sample -> kit -> reconstruct for seeded coefficients,
    and again over the sub-lattice when one is configured.
    """
    system = config_service.build_system(config)
    scheme = config_service.build_scheme(config)
    report = shift_invariant_service.riesz_check(system, config.options.tol)
    store.put_section("riesz", _riesz_section(report))
    transfer = sampling_service.transfer_matrix(sampling_service.cross_seq(system, scheme))
    bounds = sampling_service.frame_bounds(transfer)
    store.put_section("frame", _frame_section(bounds, transfer, config.options.frame_tol))
    store.put_table("transfer_fibers", ["xi_x", "xi_w"] + [f"sv_{j}" for j in range(min(transfer.M, transfer.N))],
                    _fiber_rows(transfer, "sv", np.linalg.svd(transfer.fibers, compute_uv=False)))

    if not report.is_riesz:
        raise NotRieszError(f"generators are not a Riesz sequence: {report.diagnostic}", report.lower, report.upper)
    if not sampling_service.is_frame(bounds, config.options.frame_tol):
        raise NotAFrameError(f"frame condition fails: alpha_A = {bounds.alpha_a:.3e} {bounds.diagnostic}".strip(),
                             bounds.alpha_a, bounds.beta_a)

    c = CoefArray(system.lattice, config_service.build_coefficients(config, system.N, len(system.lattice)))
    result = _reconstruct_on(system, scheme, c, config)
    store.put_section("reconstruction", result)

    if config.sublattice is not None:
        sub = config_service.build_lattice(config, config.sublattice)
        inflated, reps = sampling_service.sublattice_inflate(system, sub)
        c_sub = sampling_service.inflate_coefficients(c, sub, reps)
        resynthesis = _relative_error(shift_invariant_service.synthesize(system, c),
                                      shift_invariant_service.synthesize(inflated, c_sub))
        section = {"index": len(reps), "N": inflated.N, "resynthesis_error": resynthesis}
        sub_transfer = sampling_service.transfer_matrix(sampling_service.cross_seq(inflated, scheme))
        sub_bounds = sampling_service.frame_bounds(sub_transfer)
        section.update({"alpha_A": sub_bounds.alpha_a, "beta_A": sub_bounds.beta_a})
        if sampling_service.is_frame(sub_bounds, config.options.frame_tol):
            sub_result = _reconstruct_on(inflated, scheme, c_sub, config)
            section["rel_hs_error"] = sub_result["rel_hs_error"]
        else:
            section["diagnostic"] = f"sub-lattice frame condition fails {sub_bounds.diagnostic}".strip()
        store.put_section("sublattice", section)

    logger.info("reconstruction: relative HS error %.3e", result["rel_hs_error"])
    return store.get_section("reconstruction")


def run_channel_demo(store: ResultsStore, config: ExperimentConfig) -> Dict[str, Any]:
    """
    Channel matrix of H for the first window pair; its diagonal against the
    diagonal channel samples, and d = channel_matrix @ data for seeded data.
    """
    system = config_service.build_system(config)
    scheme = config_service.build_scheme(config)
    scheme.require_windows()
    lattice = system.lattice
    if config.options.channel == "identity":
        H = HsOperator.identity(config.L)
    else:
        c = config_service.build_coefficients(config, system.N, len(lattice))
        H = shift_invariant_service.synthesize(system, CoefArray(lattice, c))

    g, g_dual = scheme.windows[0]
    matrix = sampling_service.channel_matrix(H, g, g_dual, lattice)
    samples = sampling_service.diag_channel_samples(H, scheme, lattice)
    rng = config_service.rng_for(config, config_service.CHANNEL_SECTION)
    data = rng.standard_normal(len(lattice)) + 1j * rng.standard_normal(len(lattice))
    received = matrix @ data

    section = {
        "lattice_order": len(lattice),
        "channel": config.options.channel,
        "diagonal_max_dev": float(np.abs(np.diag(matrix) - samples.values[0]).max()),
        "hs_norm": H.hs_norm(),
    }
    store.put_section("channel", section)

    elements = lattice.elements
    rows = []
    for i, lam in enumerate(elements):
        for j, mu in enumerate(elements):
            row = {"lambda_x": lam.x, "lambda_w": lam.w, "mu_x": mu.x, "mu_w": mu.w}
            row.update(split_complex("value", matrix[i, j]))
            rows.append(row)
    store.put_table("channel_matrix", ["lambda_x", "lambda_w", "mu_x", "mu_w", "value_re", "value_im"], rows)

    rows = []
    for i, lam in enumerate(elements):
        row = {"lambda_x": lam.x, "lambda_w": lam.w}
        row.update(split_complex("diagonal", matrix[i, i]))
        row.update(split_complex("sample", samples.values[0, i]))
        row.update(split_complex("data", data[i]))
        row.update(split_complex("received", received[i]))
        rows.append(row)
    header = ["lambda_x", "lambda_w"] + [f"{p}_{q}" for p in ("diagonal", "sample", "data", "received")
                                         for q in ("re", "im")]
    store.put_table("diagonal", header, rows)
    return store.get_section("channel")


def _sweep_row(config: ExperimentConfig, a: int, b: int, index: int, scheme_spec) -> Dict[str, Any]:
    row: Dict[str, Any] = {"L": config.L, "a": a, "b": b, "scheme": index, "N": len(config.generators)}
    try:
        lattice = config_service.build_lattice(config, LatticeDescriptor.separable(a, b))
        system = config_service.build_system(config, lattice)
        section = config_service.SCHEME_SECTION if scheme_spec is config.scheme else config_service.SWEEP_SCHEME_SECTION
        scheme = config_service.build_scheme(config, scheme_spec, section, index)
        row["M"] = scheme.M
        report = shift_invariant_service.riesz_check(system, config.options.tol)
        row.update({"m": report.lower, "M_riesz": report.upper})
        transfer = sampling_service.transfer_matrix(sampling_service.cross_seq(system, scheme))
        bounds = sampling_service.frame_bounds(transfer)
        row.update({"alpha_A": bounds.alpha_a, "beta_A": bounds.beta_a})
        if not report.is_riesz:
            row.update({"status": "not_riesz", "diagnostic": report.diagnostic})
            return row
        if not sampling_service.is_frame(bounds, config.options.frame_tol):
            row.update({"status": "not_a_frame", "diagnostic": bounds.diagnostic})
            return row
        c = CoefArray(lattice, config_service.build_coefficients(config, system.N, len(lattice)))
        row["rel_err"] = _reconstruct_on(system, scheme, c, config)["rel_hs_error"]
        row.update({"status": "ok", "diagnostic": ""})
    except NumericalError:
        raise
    except (ConfigurationError, NotRieszError, NotAFrameError) as err:
        row.update({"status": type(err).__name__, "diagnostic": str(err)})
    for key in ("m", "M_riesz", "alpha_A", "beta_A", "rel_err"):
        if key in row and not np.isfinite(row[key]):
            raise NumericalError(f"non-finite {key} at a={a}, b={b}")
    return row


def run_sweep(store: ResultsStore, config: ExperimentConfig) -> Dict[str, Any]:
    """One row per (lattice, scheme) grid point; failures are recorded per row."""
    if config.sweep is None:
        raise ConfigurationError("sweep needs a sweep section in the config")
    schemes = config.sweep.schemes or (config.scheme,)
    if schemes[0] is None:
        raise ConfigurationError("sweep needs sweep.schemes or a top-level scheme")
    rows = [_sweep_row(config, a, b, i, spec)
            for a, b in config.sweep.lattices
            for i, spec in enumerate(schemes)]
    store.put_table("sweep", SWEEP_COLUMNS, rows)
    summary = {"rows": len(rows), "ok": sum(row["status"] == "ok" for row in rows)}
    store.put_section("sweep", summary)
    return summary


RUNNERS = {
    Command.RIESZ_CHECK: run_riesz_check,
    Command.FRAME_CHECK: run_frame_check,
    Command.RECONSTRUCT: run_reconstruct,
    Command.CHANNEL_DEMO: run_channel_demo,
    Command.SWEEP: run_sweep,
}


def run(store: ResultsStore, command: Command, config: ExperimentConfig,
        seed: Optional[int] = None) -> Dict[str, float]:
    """Runs one command; returns the elapsed wall time."""
    config = config.with_seed(seed)
    start = time.perf_counter()
    try:
        RUNNERS[command](store, config)
    finally:
        elapsed = time.perf_counter() - start
        logger.info("%s finished in %.3f s", command.value, elapsed)
    return {"elapsed_s": elapsed}
