"""Experiment files.

An experiment is an INI-style file of ``key = value`` lines grouped under
``[experiment]``, ``[model]``, ``[cross_section]``, ``[initial]``,
``[verify]`` and ``[output]`` headers. Lists are comma separated; a schedule
may also be written ``start:stop:step`` (stop included). Unknown keys are
errors. Keys without a value fall back as follows:

- ``[output]`` paths default under OUTPUT_DIR (see ``output_path``).
- ``[verify]`` settings default to e_values = 0.2, 0.5, 0.9, 1.0, trials = 5,
  workers = 1 and temperature_n = 100000.
- Without a ``[cross_section]`` section the 3D families use the constant
  kernel. A section that is present must name its ``kind``, and the cutoff
  family always needs one. ``slope`` defaults to 1 and ``width`` to 1e-3.
- ``[initial]`` means default to zero.

Everything else the family uses is required.
"""
import configparser
import os
import re
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..collision.cross_section import CrossSection, cross_section_from_name
from ..collision.params import KacParams, ModelParams
from ..utils.errors import ConfigurationError
from ..utils.logger import get_logger
from . import config

logger = get_logger(__name__)

Family = Literal["homogeneous", "diffusive", "selfsimilar", "cutoff", "kac"]
Recipe = Literal["gaussian", "uniform-cube", "two-point", "dirac", "file"]

_KEY_LINE = re.compile(r"^\s*([^\s=:#;\[][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def _split_floats(value):
    if isinstance(value, str):
        value = value.strip()
        if not value:
            return []
        if ":" in value:
            start, stop, step = (float(part) for part in value.split(":"))
            if step <= 0:
                raise ValueError("range step must be positive")
            count = int(round((stop - start) / step))
            return [start + step * k for k in range(count + 1)]
        return [float(part) for part in value.split(",")]
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExperimentSection(_Section):
    name: str
    family: Family
    dimension: Optional[int] = None
    seed: int = Field(ge=0, lt=2 ** 64)
    n: int = Field(ge=2)
    schedule: List[float]
    dtau: float = Field(gt=0)

    @field_validator("schedule", mode="before")
    @classmethod
    def parse_schedule(cls, value):
        return _split_floats(value)

    @field_validator("schedule")
    @classmethod
    def check_schedule(cls, value):
        if any(t < 0 for t in value):
            raise ValueError("record times must be nonnegative")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("record times must increase strictly")
        return value


class ModelSection(_Section):
    e: Optional[float] = Field(default=None, gt=0, le=1)
    B: Optional[float] = Field(default=None, gt=0)
    A: Optional[float] = Field(default=None, ge=0)
    p_diff: Optional[float] = Field(default=None, ge=0, lt=1.5)
    p_inel: Optional[float] = Field(default=None, ge=0)


class CrossSectionSection(_Section):
    kind: Literal["constant", "linear", "spike", "table"] = "constant"
    slope: float = Field(default=1.0, ge=-1, le=1)
    width: float = Field(default=1e-3, gt=0, le=2)
    table: Optional[str] = None


class InitialSection(_Section):
    recipe_a: Recipe
    recipe_b: Recipe
    mean_a: Optional[List[float]] = None
    mean_b: Optional[List[float]] = None
    theta_a: Optional[float] = Field(default=None, ge=0)
    theta_b: Optional[float] = Field(default=None, ge=0)
    path_a: Optional[str] = None
    path_b: Optional[str] = None

    @field_validator("mean_a", "mean_b", mode="before")
    @classmethod
    def parse_mean(cls, value):
        return _split_floats(value)


class VerifySection(_Section):
    e_values: List[float] = Field(default_factory=lambda: [0.2, 0.5, 0.9, 1.0])
    trials: int = Field(default=5, ge=1)
    workers: int = Field(default=1, ge=1)
    temperature_n: int = Field(default=100000, ge=2)

    @field_validator("e_values", mode="before")
    @classmethod
    def parse_e_values(cls, value):
        return _split_floats(value)

    @field_validator("e_values")
    @classmethod
    def check_e_values(cls, value):
        if any(not 0 < e <= 1 for e in value):
            raise ValueError("restitution values must lie in (0, 1]")
        return value


class OutputSection(_Section):
    csv: Optional[str] = None
    svg: Optional[str] = None
    moments_csv: Optional[str] = None
    snapshot_a: Optional[str] = None
    snapshot_b: Optional[str] = None
    report_csv: Optional[str] = None
    report_json: Optional[str] = None


class ExperimentSpec(_Section):
    """A validated experiment file."""

    experiment: ExperimentSection
    model: ModelSection = Field(default_factory=ModelSection)
    cross_section: CrossSectionSection = Field(default_factory=CrossSectionSection)
    initial: InitialSection
    verify: VerifySection = Field(default_factory=VerifySection)
    output: OutputSection = Field(default_factory=OutputSection)

    @property
    def name(self) -> str:
        return self.experiment.name

    @property
    def family(self) -> str:
        return self.experiment.family

    @property
    def dimension(self) -> int:
        return 1 if self.family == "kac" else 3

    def model_params(self, e: Optional[float] = None) -> ModelParams:
        """Model parameters, optionally with a different restitution."""
        m = self.model
        return ModelParams(
            e=m.e if e is None else e,
            B=m.B if m.B is not None else 1.0,
            A=m.A or 0.0,
            p_diff=m.p_diff or 0.0,
        )

    def kac_params(self) -> KacParams:
        return KacParams(p_inel=self.model.p_inel)

    def params(self):
        return self.kac_params() if self.family == "kac" else self.model_params()

    def cross_section_model(self) -> CrossSection:
        xs = self.cross_section
        return cross_section_from_name(xs.kind, slope=xs.slope, width=xs.width, table=xs.table)

    def output_path(self, key: str, suffix: Optional[str] = None) -> Optional[str]:
        """
        Destination of an output file.

        Relative paths are taken under OUTPUT_DIR. An unset key falls back to
        <OUTPUT_DIR>/<name><suffix>, or to None when no suffix is given.
        """
        value = getattr(self.output, key)
        if not value:
            return os.path.join(config.OUTPUT_DIR, f"{self.name}{suffix}") if suffix else None
        return value if os.path.isabs(value) else os.path.join(config.OUTPUT_DIR, value)


def _key_lines(text: str) -> Dict[Tuple[str, str], int]:
    lines: Dict[Tuple[str, str], int] = {}
    section = ""
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_LINE.match(line)
        if header:
            section = header.group(1).strip()
            lines[(section, "")] = number
            continue
        match = _KEY_LINE.match(line)
        if match:
            lines[(section, match.group(1).strip())] = number
    return lines


def _validation_error(error: ValidationError, lines: Dict[Tuple[str, str], int]) -> ConfigurationError:
    first = error.errors()[0]
    loc = [str(part) for part in first["loc"]]
    section = loc[0] if loc else ""
    key = loc[1] if len(loc) > 1 else section
    line = lines.get((section, key), lines.get((section, "")))
    return ConfigurationError(first["msg"], key=key, line=line)


def _check_consistency(spec: ExperimentSpec, lines: Dict[Tuple[str, str], int]):
    def fail(section: str, key: str, message: str):
        raise ConfigurationError(message, key=key, line=lines.get((section, key)))

    family = spec.family
    dimension = spec.experiment.dimension
    model = spec.model
    if family == "kac":
        if dimension is not None and dimension != 1:
            fail("experiment", "dimension", "the kac family is one-dimensional")
        if model.p_inel is None:
            fail("model", "p_inel", "required for the kac family")
    else:
        if dimension is not None and dimension != 3:
            fail("experiment", "dimension", f"the {family} family is three-dimensional")
        if model.e is None:
            fail("model", "e", f"required for the {family} family")
        if model.B is None:
            fail("model", "B", f"required for the {family} family")
        if model.e == 1.0 and family != "cutoff":
            fail("model", "e", f"the {family} family needs e < 1 (E = 8/(1 - e^2))")
        if family == "diffusive":
            for key in ("A", "p_diff"):
                if getattr(model, key) is None:
                    fail("model", key, "required for the diffusive family")
        elif model.A:
            fail("model", "A", "the thermostat only applies to the diffusive family")
    if "kind" not in spec.cross_section.model_fields_set:
        if family == "cutoff":
            fail("cross_section", "kind", "required for the cutoff family")
        if "cross_section" in spec.model_fields_set:
            fail("cross_section", "kind", "required when a [cross_section] section is given")

    for label in ("a", "b"):
        recipe = getattr(spec.initial, f"recipe_{label}")
        mean = getattr(spec.initial, f"mean_{label}")
        if mean is not None and len(mean) != spec.dimension:
            fail("initial", f"mean_{label}", f"needs {spec.dimension} components")
        if recipe == "file" and not getattr(spec.initial, f"path_{label}"):
            fail("initial", f"path_{label}", "required by the file recipe")
        if recipe in ("gaussian", "uniform-cube", "two-point") and getattr(spec.initial, f"theta_{label}") is None:
            fail("initial", f"theta_{label}", f"required by the {recipe} recipe")


def _resolve_paths(spec: ExperimentSpec, base: str):
    def resolve(path):
        return path if path is None or os.path.isabs(path) else os.path.join(base, path)

    spec.cross_section.table = resolve(spec.cross_section.table)
    spec.initial.path_a = resolve(spec.initial.path_a)
    spec.initial.path_b = resolve(spec.initial.path_b)


def spec_from_dict(data: dict, lines: Optional[Dict[Tuple[str, str], int]] = None) -> ExperimentSpec:
    """Validate a nested section -> key -> value mapping."""
    lines = lines or {}
    try:
        spec = ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise _validation_error(e, lines) from e
    _check_consistency(spec, lines)
    return spec


def parse_config(path: str) -> ExperimentSpec:
    """
    Read and validate an experiment file.

    Args:
        path (str): Path to the experiment file

    Returns:
        ExperimentSpec: Validated experiment; relative input paths are
        resolved against the file's directory

    Raises:
        ConfigurationError: naming the offending key and its line
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        logger.error(f"Error reading experiment file {path}: {e}")
        raise ConfigurationError(f"cannot read {path}: {e}") from e

    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=path)
    except configparser.Error as e:
        logger.error(f"Malformed experiment file {path}: {e}")
        raise ConfigurationError(f"malformed file: {e}", line=getattr(e, "lineno", None)) from e

    lines = _key_lines(text)
    data = {section: dict(parser.items(section)) for section in parser.sections()}
    spec = spec_from_dict(data, lines)
    _resolve_paths(spec, os.path.dirname(os.path.abspath(path)))
    logger.info(f"Loaded experiment '{spec.name}' ({spec.family}) from {path}")
    return spec
