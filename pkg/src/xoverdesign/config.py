"""Run configuration files (YAML, or JSON as a YAML subset).

Example::

    t: 2
    p: 2
    sequences: [AB, BA]
    theta: [0.5, -1.0, 4.0, -2.0]
    family: bernoulli
    correlation: {structure: ar1, alpha: 0.1}
    criterion: tau

Unknown keys are rejected.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .correlation import CorrelationSpec
from .criteria import Criterion
from .design import CrossoverDesign, n_parameters, parse_sequence
from .exceptions import DesignError
from .links import ModelSpec
from .optimizer import OptimizerOptions

TOP_KEYS = {"t", "p", "sequences", "theta", "family", "link", "correlation", "criterion",
            "proportions", "optimizer", "tolerance", "out", "description"}
REQUIRED = ("t", "p", "sequences", "theta", "family")
CORRELATION_KEYS = {"structure", "alpha"}
OPTIMIZER_KEYS = {"method", "max_iterations", "tolerance", "zero_threshold", "initial"}


class ConfigError(DesignError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class RunConfig:
    spec: ModelSpec
    sequences: tuple
    criterion: Criterion = Criterion.D_THETA
    proportions: np.ndarray = None
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    tolerance: float = 1e-4
    out: str = None
    description: str = ""

    def design(self, proportions=None):
        w = self.proportions if proportions is None else proportions
        if w is None:
            return CrossoverDesign.uniform(self.sequences)
        return CrossoverDesign(self.sequences, w)


def _fail(key, msg):
    raise ConfigError(f"config field '{key}': {msg}")


def _check_keys(data, allowed, where):
    unknown = sorted(set(data) - allowed)
    if unknown:
        _fail(where, f"unknown keys {unknown}; allowed {sorted(allowed)}")


def _as_int(data, key):
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(key, f"expected an integer, got {v!r}")
    return v


def _as_floats(value, key):
    try:
        arr = np.array(value, dtype=float).ravel()
    except (TypeError, ValueError):
        _fail(key, f"expected a list of numbers, got {value!r}")
    if not np.all(np.isfinite(arr)):
        _fail(key, "values must be finite")
    return arr


def parse_config(data):
    """Validate a mapping and build a ``RunConfig``."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    _check_keys(data, TOP_KEYS, "<top level>")
    for key in REQUIRED:
        if key not in data:
            _fail(key, "is required")
    t, p = _as_int(data, "t"), _as_int(data, "p")
    if t < 2:
        _fail("t", f"must be >= 2, got {t}")
    if p < 1:
        _fail("p", f"must be >= 1, got {p}")
    seq_texts = data["sequences"]
    if isinstance(seq_texts, str):
        seq_texts = seq_texts.replace(",", " ").split()
    if not isinstance(seq_texts, (list, tuple)) or not seq_texts:
        _fail("sequences", "expected a non-empty list of strings")
    try:
        sequences = tuple(parse_sequence(s, t) for s in seq_texts)
    except DesignError as exc:
        _fail("sequences", str(exc))
    for seq in sequences:
        if seq.p != p:
            _fail("sequences", f"sequence {seq} has {seq.p} periods, expected p={p}")
    if len(set(sequences)) != len(sequences):
        _fail("sequences", "sequences must be distinct")

    theta = _as_floats(data["theta"], "theta")
    m = n_parameters(t, p)
    if theta.size != m:
        _fail("theta", f"has length {theta.size}; expected m = p + 2t - 2 = {m}")

    corr_data = data.get("correlation", {"structure": "independence"})
    if not isinstance(corr_data, dict):
        _fail("correlation", "expected a mapping with structure and alpha")
    _check_keys(corr_data, CORRELATION_KEYS, "correlation")
    try:
        corr = CorrelationSpec(corr_data.get("structure", "ar1"),
                               float(corr_data.get("alpha", 0.0)))
        spec = ModelSpec(theta, data["family"], t, p, corr, data.get("link"))
    except (DesignError, TypeError, ValueError) as exc:
        key = "correlation" if "alpha" in str(exc) or "structure" in str(exc) else "family"
        _fail(key, str(exc))

    try:
        criterion = Criterion.parse(data.get("criterion", "theta"))
    except DesignError as exc:
        _fail("criterion", str(exc))

    proportions = None
    if data.get("proportions") is not None:
        proportions = _as_floats(data["proportions"], "proportions")
        try:
            CrossoverDesign(sequences, proportions)
        except DesignError as exc:
            _fail("proportions", str(exc))

    opt_data = data.get("optimizer") or {}
    if not isinstance(opt_data, dict):
        _fail("optimizer", "expected a mapping")
    _check_keys(opt_data, OPTIMIZER_KEYS, "optimizer")
    initial = opt_data.get("initial", "uniform")
    if not isinstance(initial, str):
        initial = _as_floats(initial, "optimizer.initial")
        if initial.size != len(sequences):
            _fail("optimizer.initial", f"expected {len(sequences)} weights")
    elif initial != "uniform":
        _fail("optimizer.initial", "expected 'uniform' or a list of weights")
    try:
        options = OptimizerOptions(
            method=opt_data.get("method"),
            max_iterations=int(opt_data.get("max_iterations", 100_000)),
            tolerance=float(opt_data.get("tolerance", 1e-6)),
            zero_threshold=float(opt_data.get("zero_threshold", 1e-8)),
            initial=initial)
    except (DesignError, TypeError, ValueError) as exc:
        _fail("optimizer", str(exc))

    tolerance = data.get("tolerance", 1e-4)
    try:
        tolerance = float(tolerance)
    except (TypeError, ValueError):
        _fail("tolerance", f"expected a number, got {tolerance!r}")
    if not tolerance > 0:
        _fail("tolerance", "must be positive")

    return RunConfig(spec=spec, sequences=sequences, criterion=criterion,
                     proportions=proportions, optimizer=options, tolerance=tolerance,
                     out=data.get("out"), description=str(data.get("description", "")))


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return parse_config(data)
