# -*- coding: utf-8 -*-
"""
Experiment files: JSON documents checked against experiment_schema.json and
then against the semantic rules the schema cannot express.
"""
import copy
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import jsonschema
from loguru import logger

from gg1_ipa.pg_functional.bv_functional import BVFunctional
from gg1_ipa.pg_functional.builders import from_spec
from gg1_ipa.pg_oracle.finite_difference import stencil_points
from gg1_ipa.pg_queue.models import (
    ArrivalModel,
    ServiceModel,
    default_warmup,
    stability_check,
)
from gg1_ipa.utils.constants import (
    IPA_FD_REL_STEP,
    IPA_MAX_WARMUP,
    IPA_MIN_STABILITY_PROBE,
    IPA_WARMUP_FACTOR,
)
from gg1_ipa.utils.ipa_env import shared
from gg1_ipa.utils.ipa_errors import (
    ConfigError,
    FunctionalError,
    ModelError,
    UnstableInputError,
)
from gg1_ipa.utils.objects import (
    Order,
    ParameterKind,
    PalmIdentity,
    Side,
    StabilityReport,
    Stencil,
)

IPA_JSON_SCHEMA = "experiment_schema.json"

FINITE_DIFFERENCE = "finite-difference"
ANALYTIC = "analytic"

# estimator op -> parameter kind of the path it reads
ESTIMATOR_KINDS = {
    "first_order": ParameterKind.SERVICE_THETA,
    "second_order": ParameterKind.SERVICE_THETA,
    "classic_ipa": ParameterKind.SERVICE_THETA,
    "tail_probability_derivative": ParameterKind.SERVICE_THETA,
    "speed_derivative": ParameterKind.SPEED_NU,
    "arrival_scale_derivative": ParameterKind.ARRIVAL_ALPHA,
}

Issues = List[Tuple[str, str]]


@dataclass(frozen=True)
class ParameterSpec:
    """Perturbed input, its nominal value and the interval Theta"""

    kind: ParameterKind
    value: float
    interval: Tuple[float, float]


@dataclass(frozen=True)
class EstimatorSpec:
    """One requested estimator"""

    op: str
    side: Side = Side.RIGHT
    order: Order = Order.FIRST
    pairing: str = "standard"
    coalescence: bool = True
    threshold: Optional[float] = None

    @property
    def label(self) -> str:
        return f"{self.op}[{self.side.value}]"


@dataclass(frozen=True)
class OracleSpec:
    """finite-difference (h, stencil, crn) or analytic"""

    type: str
    h: Optional[float] = None
    stencil: Stencil = Stencil.CENTRAL
    crn: bool = True


class ValidationReport(NamedTuple):
    """Outcome of validate: field errors, warnings and the stability probe"""

    errors: Issues
    warnings: Issues
    stability: Optional[StabilityReport] = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> Dict:
        return {
            "errors": [{"field": f, "message": m} for f, m in self.errors],
            "warnings": [{"field": f, "message": m} for f, m in self.warnings],
            "stability": self.stability._asdict() if self.stability else None,
        }


@dataclass
class ExperimentConfig:
    """Validated experiment with its models and functional built"""

    name: str
    arrivals: ArrivalModel
    services: ServiceModel
    parameter: ParameterSpec
    functional: BVFunctional
    estimators: List[EstimatorSpec]
    horizon: int
    warmup: int
    replications: int
    seed: int
    oracles: List[OracleSpec] = field(default_factory=list)
    palm_checks: List[PalmIdentity] = field(default_factory=list)
    palm_process: str = "workload"
    batches: int = 64
    ci_level: float = 0.95
    palm_k: float = 3.0
    atom_eps: float = 0.0
    stability_probe: int = IPA_MIN_STABILITY_PROBE
    raw: Dict[str, Any] = field(default_factory=dict)
    _stability: Optional[StabilityReport] = field(default=None, repr=False)

    def stability(self) -> StabilityReport:
        """Load of the dominating system over Theta, probed once"""
        if self._stability is None:
            self._stability = stability_check(
                self.arrivals,
                self.services,
                self.parameter.interval,
                n_probe=self.stability_probe,
                seed=self.seed,
                parameter_kind=self.parameter.kind,
            )
        return self._stability

    def require_stable(self):
        report = self.stability()
        if not report.stable:
            raise UnstableInputError(report.load_estimate)

    def fd_step(self, oracle: OracleSpec) -> float:
        if oracle.h is not None:
            return oracle.h
        return IPA_FD_REL_STEP * abs(self.parameter.value)

    def to_record(self) -> Dict[str, Any]:
        """The experiment as it ran, warmup resolved; re-running it reproduces the results"""
        record = copy.deepcopy(self.raw)
        record["warmup"] = self.warmup
        record["seed"] = self.seed
        record["replications"] = self.replications
        return record


@lru_cache(maxsize=1)
def load_json_schema() -> Dict:
    """Loads the JSON schema of experiment files"""
    path = Path(__file__).parent / IPA_JSON_SCHEMA
    logger.trace(f"Schema: {path}")
    with path.open() as schema_file:
        return json.loads(schema_file.read())


def _field_path(parts) -> str:
    return ".".join(str(p) for p in parts) or "<root>"


def schema_errors(raw: Any) -> Issues:
    """Every schema violation, keyed by the dotted field path"""
    schema = load_json_schema()
    try:
        validator = jsonschema.Draft6Validator(schema)
        errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    except jsonschema.SchemaError as err:
        logger.error(f"Schema validation failed {err}")
        return [("<schema>", str(err.message))]
    return [(_field_path(err.absolute_path), err.message) for err in errors]


def read_config_file(path: str) -> Dict:
    """Parses an experiment file; ConfigError for unreadable or malformed files"""
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError([("<file>", f"no such file: {path}")])
    try:
        with file_path.open() as config_file:
            raw = json.loads(config_file.read())
    except json.JSONDecodeError as err:
        raise ConfigError([("<file>", f"line {err.lineno} column {err.colno}: {err.msg}")])
    except OSError as err:
        raise ConfigError([("<file>", str(err))])
    return raw


def apply_overrides(
    raw: Dict, seed: Optional[int] = None, replications: Optional[int] = None
) -> Dict:
    """Command-line values win over the file"""
    out = copy.deepcopy(raw)
    if seed is not None:
        out["seed"] = seed
    if replications is not None:
        out["replications"] = replications
    return out


def _build_models(raw: Dict, errors: Issues):
    param = raw["parameter"]
    kind = ParameterKind(param["kind"])
    lo, hi = (float(v) for v in param["interval"])
    value = float(param["value"])
    parameter = ParameterSpec(kind, value, (lo, hi))

    arrivals = services = None
    spec = raw["arrivals"]
    try:
        arrivals = ArrivalModel(
            family=spec["family"],
            rate=float(spec.get("rate", 1.0)),
            distribution=spec.get("distribution", ""),
            dist_params=dict(spec.get("params", {})),
        )
    except ModelError as err:
        errors.append((_model_field("arrivals", err), str(err)))

    spec = raw["services"]
    if kind == ParameterKind.SERVICE_THETA:
        theta, interval = value, (lo, hi)
    else:
        theta = float(spec.get("theta", 1.0))
        interval = (theta, theta)
    try:
        services = ServiceModel(
            family=spec["family"],
            theta_interval=interval,
            theta=theta,
            power=float(spec.get("power", 1.0)),
            shape=float(spec.get("shape", 1.0)),
            distribution=spec.get("distribution", ""),
            theta_param=spec.get("theta_param", "scale"),
            reciprocal=bool(spec.get("reciprocal", False)),
            dist_params=dict(spec.get("params", {})),
        )
    except ModelError as err:
        errors.append((_model_field("services", err), str(err)))
    return parameter, arrivals, services


def _model_field(section: str, err: ModelError) -> str:
    return f"{section}.{err.field}" if err.field else section


def _estimator(spec: Dict) -> EstimatorSpec:
    op = spec["op"]
    default_order = Order.SECOND if op == "second_order" else Order.FIRST
    default_side = Side.TWO_SIDED if op == "classic_ipa" else Side.RIGHT
    threshold = spec.get("threshold")
    return EstimatorSpec(
        op=op,
        side=Side(spec.get("side", default_side)),
        order=Order(spec.get("order", default_order)),
        pairing=spec.get("pairing", "standard"),
        coalescence=bool(spec.get("coalescence", True)),
        threshold=None if threshold is None else float(threshold),
    )


def _has_atoms(func: BVFunctional) -> bool:
    return any(part.has_atoms for _, part in func.monotone_parts())


def _estimator_errors(
    idx: int, est: EstimatorSpec, config: ExperimentConfig
) -> Issues:
    where = f"estimators.{idx}"
    errors = []
    kind = ESTIMATOR_KINDS[est.op]
    if kind != config.parameter.kind:
        errors.append((f"{where}.op", f"{est.op} needs a {kind.value} parameter"))
    expected = Order.SECOND if est.op == "second_order" else Order.FIRST
    if est.order != expected:
        errors.append((f"{where}.order", f"{est.op} estimates a {expected.value}-order derivative"))
    atoms = _has_atoms(config.functional)
    if est.op == "second_order":
        if atoms:
            errors.append((f"{where}.op", "second_order needs a functional without atoms"))
        if not config.services.is_scale:
            errors.append((f"{where}.op", "second_order needs a scale service family"))
    if est.op == "classic_ipa":
        if atoms:
            errors.append((f"{where}.op", "classic_ipa needs a functional without atoms"))
        if est.side != Side.TWO_SIDED:
            errors.append((f"{where}.side", "classic_ipa is two-sided"))
    if est.pairing == "shifted":
        if est.op != "first_order":
            errors.append((f"{where}.pairing", "shifted pairing applies to first_order only"))
        if atoms:
            errors.append((f"{where}.pairing", "shifted pairing needs a functional without atoms"))
    if est.op == "tail_probability_derivative" and tail_threshold(est, config) is None:
        errors.append((f"{where}.threshold", "needs a threshold > 0 or an indicator functional"))
    return errors


def tail_threshold(est: EstimatorSpec, config: ExperimentConfig) -> Optional[float]:
    """Threshold x of a tail estimator, falling back to an indicator functional"""
    x = est.threshold
    if x is None and config.functional.spec.get("type") == "indicator":
        x = float(config.functional.spec["threshold"])
    if x is None or x <= 0:
        return None
    return x


def semantic_errors(config: ExperimentConfig) -> Issues:
    """Rules beyond the schema, keyed by field path"""
    errors = []
    param = config.parameter
    lo, hi = param.interval
    if lo > hi:
        errors.append(("parameter.interval", f"interval must be ordered, got [{lo}, {hi}]"))
    elif not lo <= param.value <= hi:
        errors.append(
            ("parameter.value", f"{param.value} lies outside the interval [{lo}, {hi}]")
        )
    if config.horizon <= config.warmup:
        errors.append(
            ("warmup", f"warmup {config.warmup} must be below the horizon {config.horizon}")
        )
    for idx, est in enumerate(config.estimators):
        errors.extend(_estimator_errors(idx, est, config))
    for idx, oracle in enumerate(config.oracles):
        if oracle.type != FINITE_DIFFERENCE:
            continue
        for point in stencil_points(param.value, config.fd_step(oracle), oracle.stencil):
            if not lo <= point <= hi:
                errors.append(
                    (
                        f"oracles.{idx}.stencil",
                        f"stencil point {point:.6g} leaves the interval [{lo}, {hi}]",
                    )
                )
                break
    if PalmIdentity.ERGODIC_EQUIVALENCE in config.palm_checks:
        if param.kind != ParameterKind.SERVICE_THETA:
            errors.append(("palm_checks", "ergodic-equivalence needs a service-theta parameter"))
        elif _has_atoms(config.functional):
            errors.append(("palm_checks", "ergodic-equivalence needs a functional without atoms"))
    return errors


def build_config(raw: Dict, probe_stability: bool = True) -> Tuple[Optional[ExperimentConfig], ValidationReport]:
    """
    Schema and semantic validation of a parsed experiment document.

    Nothing is simulated; the stability probe only draws service times.
    Returns the config (None when errors stop the build) and the report.
    """
    errors = schema_errors(raw)
    if errors:
        return None, ValidationReport(errors, [])

    parameter, arrivals, services = _build_models(raw, errors)
    output = raw.get("output", {})
    atom_eps = float(output.get("atom_eps", shared.atom_eps))
    functional = None
    try:
        functional = from_spec(raw["functional"], atom_eps)
    except (FunctionalError, KeyError, TypeError) as err:
        errors.append(("functional", str(err)))
    if errors:
        return None, ValidationReport(errors, [])

    config = ExperimentConfig(
        name=raw.get("name", "experiment"),
        arrivals=arrivals,
        services=services,
        parameter=parameter,
        functional=functional,
        estimators=[_estimator(spec) for spec in raw["estimators"]],
        horizon=int(raw["horizon"]),
        warmup=0,
        replications=int(raw.get("replications", 1)),
        seed=int(raw.get("seed", 0)),
        oracles=[
            OracleSpec(
                type=spec["type"],
                h=spec.get("h"),
                stencil=Stencil(spec.get("stencil", Stencil.CENTRAL)),
                crn=bool(spec.get("crn", True)),
            )
            for spec in raw.get("oracles", [])
        ],
        palm_checks=[PalmIdentity(tag) for tag in raw.get("palm_checks", [])],
        palm_process=raw.get("palm_process", "workload"),
        batches=int(output.get("batches", shared.batches)),
        ci_level=float(output.get("ci_level", shared.ci_level)),
        palm_k=float(output.get("palm_k", shared.palm_k)),
        atom_eps=atom_eps,
        stability_probe=int(raw.get("stability_probe", IPA_MIN_STABILITY_PROBE)),
        raw=copy.deepcopy(raw),
    )

    warnings = []
    stability = None
    needs_load = raw.get("warmup", 0) is None
    if probe_stability or needs_load:
        try:
            stability = config.stability()
        except (ModelError, TypeError, ValueError) as err:
            errors.append(("parameter.interval", str(err)))
            return None, ValidationReport(errors, warnings)
        if not stability.stable:
            warnings.append(
                ("stability", f"unstable: load probe {stability.load_estimate:.6g} >= 1")
            )
    if needs_load:
        cap = min(IPA_MAX_WARMUP, max(config.horizon - 1, 0))
        config.warmup = default_warmup(stability.load_estimate, IPA_WARMUP_FACTOR, cap)
    else:
        config.warmup = int(raw.get("warmup", 0))

    errors.extend(semantic_errors(config))
    report = ValidationReport(errors, warnings, stability)
    return (None if errors else config), report


def load_config(
    path: str,
    seed: Optional[int] = None,
    replications: Optional[int] = None,
    probe_stability: bool = True,
) -> ExperimentConfig:
    """Reads, overrides and validates an experiment file; ConfigError on failure"""
    raw = apply_overrides(read_config_file(path), seed, replications)
    config, report = build_config(raw, probe_stability)
    for where, msg in report.warnings:
        logger.warning(f"{where}: {msg}")
    if not report.ok:
        raise ConfigError(report.errors)
    logger.debug(f"loaded experiment {config.name} from {path}")
    return config


def validate_config(path: str, probe_stability: bool = True) -> ValidationReport:
    """Validation report of an experiment file; never raises on bad input"""
    try:
        raw = read_config_file(path)
    except ConfigError as err:
        return ValidationReport(err.errors, [])
    _, report = build_config(raw, probe_stability)
    return report
