"""
Service for loading experiment configurations and building the objects
they describe. All validation happens here, before any computation.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from source.errors import ConfigurationError
from source.models.experiment import (
    ExperimentConfig,
    GeneratorKind,
    GeneratorSpec,
    Options,
    SchemeSpec,
    SweepSpec,
    WindowKind,
    WindowSpec,
)
from source.models.generator_system import GeneratorSystem
from source.models.operator import HsOperator
from source.models.phase_space import Lattice, LatticeDescriptor, PhaseSpace
from source.models.sampling import SamplingScheme, SchemeKind
from source.models.signal import Signal
from source.services import operator_service, phase_space_service, shift_invariant_service, timefreq_service

logger = logging.getLogger(__name__)

# Seed-path sections; a random item without its own seed draws from
# default_rng([seed, section, position, side]).
GENERATOR_SECTION = 0
SCHEME_SECTION = 1
COEF_SECTION = 2
PERTURBATION_SECTION = 3
CHANNEL_SECTION = 4
SWEEP_SCHEME_SECTION = 5


def _int(raw: Any, where: str, minimum: Optional[int] = None) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigurationError(f"{where} must be an integer, got {raw!r}")
    if minimum is not None and raw < minimum:
        raise ConfigurationError(f"{where} must be >= {minimum}, got {raw}")
    return raw


def _float(raw: Any, where: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigurationError(f"{where} must be a number, got {raw!r}")
    return float(raw)


def _object(raw: Any, where: str) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{where} must be an object")
    return raw


def _list(raw: Any, where: str, allow_empty: bool = False) -> List[Any]:
    if not isinstance(raw, list) or (not raw and not allow_empty):
        raise ConfigurationError(f"{where} must be a non-empty list")
    return raw


def _kind(raw: Dict[str, Any], enum, where: str):
    try:
        return enum(raw.get("kind"))
    except ValueError:
        choices = ", ".join(k.value for k in enum)
        raise ConfigurationError(f"{where}.kind must be one of {choices}, got {raw.get('kind')!r}") from None


def _vector(raw: Any, where: str) -> Tuple[float, ...]:
    return tuple(_float(v, f"{where}[{i}]") for i, v in enumerate(_list(raw, where)))


def parse_lattice(raw: Any, where: str = "lattice") -> LatticeDescriptor:
    raw = _object(raw, where)
    if "generators" in raw:
        gens = []
        for i, g in enumerate(_list(raw["generators"], f"{where}.generators")):
            if not isinstance(g, list) or len(g) != 2:
                raise ConfigurationError(f"{where}.generators[{i}] must be a pair [x, w]")
            gens.append((_int(g[0], f"{where}.generators[{i}][0]"), _int(g[1], f"{where}.generators[{i}][1]")))
        return LatticeDescriptor.generated(gens)
    if "a" in raw and "b" in raw:
        return LatticeDescriptor.separable(_int(raw["a"], f"{where}.a", 1), _int(raw["b"], f"{where}.b", 1))
    raise ConfigurationError(f"{where} needs either a and b or generators")


def parse_window(raw: Any, where: str) -> WindowSpec:
    raw = _object(raw, where)
    kind = _kind(raw, WindowKind, where)
    if kind is WindowKind.DELTA:
        return WindowSpec(kind, at=_int(raw.get("at", 0), f"{where}.at"))
    if kind is WindowKind.RANDOM:
        seed = raw.get("seed")
        return WindowSpec(kind, seed=None if seed is None else _int(seed, f"{where}.seed", 0))
    if kind is WindowKind.EXPLICIT:
        real = _vector(raw.get("real"), f"{where}.real")
        imag = _vector(raw["imag"], f"{where}.imag") if "imag" in raw else ()
        if imag and len(imag) != len(real):
            raise ConfigurationError(f"{where}.imag has length {len(imag)}, real has {len(real)}")
        return WindowSpec(kind, real=real, imag=imag)
    return WindowSpec(kind)


def parse_generator(raw: Any, where: str) -> GeneratorSpec:
    raw = _object(raw, where)
    kind = _kind(raw, GeneratorKind, where)
    if kind is GeneratorKind.RANK_ONE:
        if "left" not in raw or "right" not in raw:
            raise ConfigurationError(f"{where} is rank_one and needs left and right windows")
        return GeneratorSpec(kind, left=parse_window(raw["left"], f"{where}.left"),
                             right=parse_window(raw["right"], f"{where}.right"))
    if kind is GeneratorKind.EXPLICIT_KERNEL:
        real = tuple(_vector(row, f"{where}.real[{i}]") for i, row in enumerate(_list(raw.get("real"), f"{where}.real")))
        imag = ()
        if "imag" in raw:
            imag = tuple(_vector(row, f"{where}.imag[{i}]") for i, row in enumerate(_list(raw["imag"], f"{where}.imag")))
        return GeneratorSpec(kind, real=real, imag=imag)
    seed = raw.get("seed")
    return GeneratorSpec(kind, seed=None if seed is None else _int(seed, f"{where}.seed", 0))


def parse_scheme(raw: Any, where: str = "scheme") -> SchemeSpec:
    raw = _object(raw, where)
    kind = _kind(raw, SchemeKind, where)
    if kind is SchemeKind.WINDOWS:
        pairs = []
        for m, pair in enumerate(_list(raw.get("pairs"), f"{where}.pairs")):
            pair = _object(pair, f"{where}.pairs[{m}]")
            if "g" not in pair or "g_dual" not in pair:
                raise ConfigurationError(f"{where}.pairs[{m}] needs g and g_dual")
            pairs.append((parse_window(pair["g"], f"{where}.pairs[{m}].g"),
                          parse_window(pair["g_dual"], f"{where}.pairs[{m}].g_dual")))
        return SchemeSpec(kind, pairs=tuple(pairs))
    operators = tuple(parse_generator(op, f"{where}.operators[{m}]")
                      for m, op in enumerate(_list(raw.get("operators"), f"{where}.operators")))
    return SchemeSpec(kind, operators=operators)


def parse_options(raw: Any) -> Options:
    raw = _object(raw, "options")
    unknown = set(raw) - {"tol", "frame_tol", "c_seed", "coef_seed", "channel"}
    if unknown:
        raise ConfigurationError(f"options has unknown fields {sorted(unknown)}")

    def optional(name, parse):
        return None if raw.get(name) is None else parse(raw[name], f"options.{name}")

    channel = raw.get("channel", "synthesized")
    if channel not in ("synthesized", "identity"):
        raise ConfigurationError(f"options.channel must be synthesized or identity, got {channel!r}")
    return Options(tol=optional("tol", _float), frame_tol=optional("frame_tol", _float),
                   c_seed=optional("c_seed", lambda v, w: _int(v, w, 0)),
                   coef_seed=optional("coef_seed", lambda v, w: _int(v, w, 0)),
                   channel=channel)


def parse_sweep(raw: Any) -> SweepSpec:
    raw = _object(raw, "sweep")
    lattices = []
    for i, pair in enumerate(_list(raw.get("lattices"), "sweep.lattices")):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigurationError(f"sweep.lattices[{i}] must be a pair [a, b]")
        lattices.append((_int(pair[0], f"sweep.lattices[{i}][0]", 1), _int(pair[1], f"sweep.lattices[{i}][1]", 1)))
    schemes = tuple(parse_scheme(s, f"sweep.schemes[{i}]")
                    for i, s in enumerate(_list(raw.get("schemes", []), "sweep.schemes", allow_empty=True)))
    return SweepSpec(tuple(lattices), schemes)


def parse_config(raw: Dict[str, Any]) -> ExperimentConfig:
    """
    Validates a decoded JSON config and returns the experiment it describes.
    Raises ConfigurationError naming the offending field.
    """
    raw = _object(raw, "config")
    if "L" not in raw:
        raise ConfigurationError("config needs L")
    L = _int(raw["L"], "L", 2)
    lattice = parse_lattice(raw.get("lattice"), "lattice")
    generators = tuple(parse_generator(g, f"generators[{n}]")
                       for n, g in enumerate(_list(raw.get("generators"), "generators")))
    config = ExperimentConfig(
        L=L,
        lattice=lattice,
        generators=generators,
        seed=_int(raw.get("seed", 0), "seed", 0),
        scheme=parse_scheme(raw["scheme"]) if raw.get("scheme") is not None else None,
        sublattice=parse_lattice(raw["sublattice"], "sublattice") if raw.get("sublattice") is not None else None,
        options=parse_options(raw.get("options", {})),
        sweep=parse_sweep(raw["sweep"]) if raw.get("sweep") is not None else None,
    )
    validate(config)
    return config


def load_config(path: Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"config {path} is not valid JSON: {err}") from err
    logger.debug("loaded config %s", path)
    return parse_config(raw)


def _check_window(spec: WindowSpec, L: int, where: str):
    if spec.kind is WindowKind.EXPLICIT and len(spec.real) != L:
        raise ConfigurationError(f"{where} has length {len(spec.real)}, expected L = {L}")


def _check_generator(spec: GeneratorSpec, L: int, where: str):
    if spec.kind is GeneratorKind.RANK_ONE:
        _check_window(spec.left, L, f"{where}.left")
        _check_window(spec.right, L, f"{where}.right")
    elif spec.kind is GeneratorKind.EXPLICIT_KERNEL:
        for part, rows in (("real", spec.real), ("imag", spec.imag)):
            if rows and (len(rows) != L or any(len(r) != L for r in rows)):
                raise ConfigurationError(f"{where}.{part} must be an {L} x {L} matrix")


def _check_scheme(spec: SchemeSpec, L: int, where: str):
    for m, (g, g_dual) in enumerate(spec.pairs):
        _check_window(g, L, f"{where}.pairs[{m}].g")
        _check_window(g_dual, L, f"{where}.pairs[{m}].g_dual")
    for m, op in enumerate(spec.operators):
        _check_generator(op, L, f"{where}.operators[{m}]")


def validate(config: ExperimentConfig):
    """Checks the parts of a config that depend on L, lattices included."""
    L = config.L
    space = PhaseSpace(L)
    lattice = phase_space_service.build_lattice(config.lattice, space)
    if config.sublattice is not None:
        sub = phase_space_service.build_lattice(config.sublattice, space)
        if not sub.is_subgroup_of(lattice):
            raise ConfigurationError("sublattice is not a subgroup of lattice")
    for n, g in enumerate(config.generators):
        _check_generator(g, L, f"generators[{n}]")
    if config.scheme is not None:
        _check_scheme(config.scheme, L, "scheme")
    if config.sweep is not None:
        for i, scheme in enumerate(config.sweep.schemes):
            _check_scheme(scheme, L, f"sweep.schemes[{i}]")


def rng_for(config: ExperimentConfig, *path: int, own_seed: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator for one random item; an item's own seed takes precedence."""
    if own_seed is not None:
        return np.random.default_rng(own_seed)
    return np.random.default_rng([config.seed, *path])


def build_window(spec: WindowSpec, config: ExperimentConfig, *path: int) -> Signal:
    L = config.L
    if spec.kind is WindowKind.GAUSSIAN:
        return timefreq_service.gaussian_window(L)
    if spec.kind is WindowKind.DELTA:
        return timefreq_service.delta_window(L, spec.at)
    if spec.kind is WindowKind.RANDOM:
        return timefreq_service.random_signal(L, rng_for(config, *path, own_seed=spec.seed), normalize=True)
    imag = np.asarray(spec.imag) if spec.imag else 0.0
    return Signal(np.asarray(spec.real) + 1j * imag)


def build_operator(spec: GeneratorSpec, config: ExperimentConfig, *path: int) -> HsOperator:
    if spec.kind is GeneratorKind.RANK_ONE:
        left = build_window(spec.left, config, *path, 0)
        right = build_window(spec.right, config, *path, 1)
        return operator_service.rank_one(left, right)
    if spec.kind is GeneratorKind.EXPLICIT_KERNEL:
        imag = np.asarray(spec.imag) if spec.imag else 0.0
        return HsOperator(np.asarray(spec.real) + 1j * imag)
    return operator_service.random_operator(config.L, rng_for(config, *path, own_seed=spec.seed))


def build_lattice(config: ExperimentConfig, descriptor: Optional[LatticeDescriptor] = None) -> Lattice:
    return phase_space_service.build_lattice(descriptor or config.lattice, PhaseSpace(config.L))


def build_generators(config: ExperimentConfig) -> List[HsOperator]:
    return [build_operator(spec, config, GENERATOR_SECTION, n) for n, spec in enumerate(config.generators)]


def build_system(config: ExperimentConfig, lattice: Optional[Lattice] = None) -> GeneratorSystem:
    return shift_invariant_service.build_system(lattice or build_lattice(config), build_generators(config))


def build_scheme(config: ExperimentConfig, spec: Optional[SchemeSpec] = None,
                 section: int = SCHEME_SECTION, position: int = 0) -> SamplingScheme:
    spec = spec or config.scheme
    if spec is None:
        raise ConfigurationError("this command needs a scheme in the config")
    if spec.kind is SchemeKind.WINDOWS:
        pairs = [(build_window(g, config, section, position, m, 0),
                  build_window(g_dual, config, section, position, m, 1))
                 for m, (g, g_dual) in enumerate(spec.pairs)]
        return SamplingScheme.from_windows(pairs)
    return SamplingScheme.from_operators(
        [build_operator(op, config, section, position, m) for m, op in enumerate(spec.operators)])


def build_coefficients(config: ExperimentConfig, N: int, size: int) -> np.ndarray:
    """Seeded complex Gaussian coefficients of shape (N, size)."""
    rng = rng_for(config, COEF_SECTION, own_seed=config.options.coef_seed)
    return rng.standard_normal((N, size)) + 1j * rng.standard_normal((N, size))


def build_perturbation(config: ExperimentConfig, shape: Sequence[int]) -> Optional[np.ndarray]:
    """The left-inverse perturbation C, or None for the Moore-Penrose dual."""
    if config.options.c_seed is None:
        return None
    rng = np.random.default_rng([config.options.c_seed, PERTURBATION_SECTION])
    return rng.standard_normal(tuple(shape)) + 1j * rng.standard_normal(tuple(shape))
