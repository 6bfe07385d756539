"""
Pydantic schemas for the excomp command layer.

Every CLI command has a strict input model registered in ``COMMAND_MODELS``;
``validate_command_input`` turns raw parameters into a model instance or a
structured error dict. Results travel in the ``CommandResponse`` envelope.
"""

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..services.numbers import squarefree_part


Tier = Literal["core", "extended", "optional"]


class BaseCommandInput(BaseModel):
    """Base class for all command inputs."""

    model_config = ConfigDict(str_strip_whitespace=True, validate_assignment=True, extra="forbid")

    budget: Optional[int] = Field(None, ge=1, description="Search node cap, overrides EXCOMP_EMBED_BUDGET")


def _imaginary_radicand(v: Optional[int]) -> Optional[int]:
    if v is None:
        return v
    if v >= 0 or squarefree_part(v) != v:
        raise ValueError("field must be a negative squarefree integer d for Q(sqrt(d))")
    return v


def _rational(v: str) -> str:
    try:
        Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{v!r} is not an exact rational")
    return str(v)


# ===== GROUP COMMANDS =====

class DecomposeInput(BaseCommandInput):
    """Wedderburn decomposition of QG, or of Q(sqrt(d))G."""

    group: str = Field(..., min_length=1, max_length=400, description="Group-spec string, e.g. C3:Q8(1,inv)")
    field: Optional[int] = Field(None, description="Negative squarefree d to extend scalars to Q(sqrt(d))")
    method: Optional[Literal["metabelian", "definition"]] = Field(None, description="Strong Shoda pair enumeration")

    @field_validator("field")
    @classmethod
    def validate_field(cls, v: Optional[int]) -> Optional[int]:
        return _imaginary_radicand(v)


class MexcInput(BaseCommandInput):
    """Property (M_exc), optionally its weak form and the equivalent characterisations."""

    group: str = Field(..., min_length=1, max_length=400, description="Group-spec string")
    field: Optional[int] = Field(None, description="Negative squarefree d for Q(sqrt(d))G")
    weak: bool = Field(False, description="Also evaluate the weak property wM_exc")
    report: bool = Field(False, description="Include the clause-by-clause characterisation report")

    @field_validator("field")
    @classmethod
    def validate_field(cls, v: Optional[int]) -> Optional[int]:
        return _imaginary_radicand(v)

    @model_validator(mode="after")
    def weak_over_q(self) -> "MexcInput":
        if self.weak and self.field is not None:
            raise ValueError("wM_exc is only defined over Q")
        return self


# ===== ALGEBRA COMMANDS =====

class AlgebraInput(BaseCommandInput):
    """A simple algebra given by an oracle tag, a quaternion symbol, a matrix size over a center, or raw places."""

    tag: Optional[str] = Field(None, description="Named oracle tag, e.g. H2 or zeta8_minus3")
    symbol: Optional[Tuple[int, int]] = Field(None, description="Quaternion symbol (a, b)")
    center: Optional[int] = Field(None, description="Squarefree radicand of a quadratic center; omitted means Q")
    matrix_size: int = Field(1, ge=1, le=64, description="n in M_n(D)")
    r1: Optional[int] = Field(None, ge=0, description="Real places of the center ramified in D")
    r2: Optional[int] = Field(None, ge=0, description="Real places of the center not ramified in D")
    s: Optional[int] = Field(None, ge=0, description="Complex places of the center")
    n: Optional[int] = Field(None, ge=1, description="Matrix size for raw places")
    d: Optional[int] = Field(None, ge=1, description="Degree of D for raw places")

    @field_validator("center")
    @classmethod
    def validate_center(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and (v in (0, 1) or squarefree_part(v) != v):
            raise ValueError("center must be a squarefree integer other than 0 and 1")
        return v

    @field_validator("symbol")
    @classmethod
    def validate_symbol(cls, v: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if v is not None and 0 in v:
            raise ValueError("symbol entries must be nonzero")
        return v

    @property
    def uses_places(self) -> bool:
        return any(x is not None for x in (self.r1, self.r2, self.s, self.n, self.d))

    @model_validator(mode="after")
    def one_description(self) -> "AlgebraInput":
        if self.uses_places:
            missing = [k for k in ("r1", "r2", "s", "n", "d") if getattr(self, k) is None]
            if missing:
                raise ValueError(f"places input needs all of r1, r2, s, n, d; missing {missing}")
            if self.tag or self.symbol or self.center is not None:
                raise ValueError("give either raw places or a descriptor, not both")
        elif self.tag and self.symbol:
            raise ValueError("give either an oracle tag or a symbol, not both")
        return self


class ClassifyAlgebraInput(AlgebraInput):
    pass


class VcdInput(AlgebraInput):
    pass


class DinInput(AlgebraInput):
    pass


class GoodInput(AlgebraInput):
    pass


class VqlInput(AlgebraInput):
    pass


# ===== CLIFFORD COMMANDS =====

class CliffordParameters(BaseCommandInput):
    u: int = Field(..., lt=0, description="Negative parameter u of the Clifford algebra")
    v: int = Field(..., lt=0, description="Negative parameter v of the Clifford algebra")


class VahlenCheckInput(CliffordParameters):
    """Membership of a Vahlen matrix in SL_+ and in a principal congruence subgroup."""

    entries: List[List[str]] = Field(..., description="Entries a, b, c, d as 8 rational coefficients each")
    level: Optional[int] = Field(None, ge=1, description="Congruence level n for Con_n")
    point: Optional[List[str]] = Field(None, description="Point of hyperbolic space, 5 rational coordinates")
    integral: bool = Field(True, description="Require entries in the integral Clifford group")

    @field_validator("entries")
    @classmethod
    def validate_entries(cls, v: List[List[str]]) -> List[List[str]]:
        if len(v) != 4 or any(len(e) != 8 for e in v):
            raise ValueError("entries must be four lists of eight coefficients")
        return [[_rational(c) for c in e] for e in v]

    @field_validator("point")
    @classmethod
    def validate_point(cls, v: Optional[List[str]]) -> Optional[List[str]]:
        if v is None:
            return v
        if len(v) != 5:
            raise ValueError("a point has five coordinates")
        return [_rational(c) for c in v]


class TorsionLevelInput(CliffordParameters):
    bound: Optional[int] = Field(None, ge=1, description="Torsion bound B; derived when omitted")


# ===== SUBGROUP COMMANDS =====

class EmbedInput(BaseCommandInput):
    """Finite subgroups of the exceptional 2x2 algebras."""

    mode: Literal["zassenhaus", "quadratic", "span-types", "imprimitive", "admissible"] = Field(
        "zassenhaus", description="Which embedding question to answer"
    )
    group: Optional[str] = Field(None, min_length=1, max_length=400, description="Group-spec string")
    ambient: Optional[str] = Field(None, description="Ambient algebra key (Z, I1, I2, I3, O2, O3, O5) or name")
    d: Optional[int] = Field(None, ge=1, description="d for the subfield Q(sqrt(-d))")
    symbol: Optional[Tuple[int, int]] = Field(None, description="(a, b) for the quaternion algebra (-a,-b/Q)")

    @model_validator(mode="after")
    def mode_arguments(self) -> "EmbedInput":
        needed = {
            "zassenhaus": ("group", "ambient"),
            "admissible": ("group", "ambient"),
            "quadratic": ("d", "symbol"),
            "span-types": ("ambient",),
            "imprimitive": ("ambient",),
        }[self.mode]
        missing = [k for k in needed if getattr(self, k) is None]
        if missing:
            raise ValueError(f"mode {self.mode} needs {', '.join(missing)}")
        return self


class TablesInput(BaseCommandInput):
    tier: Tier = Field("core", description="Highest fixture tier to run")
    table: Literal["a", "b", "all"] = Field("all", description="Which reference table to reproduce")
    workers: int = Field(1, ge=1, le=64, description="Rows evaluated in parallel")
    rows: Optional[List[str]] = Field(None, description="Restrict to these row ids, e.g. [24,3]")


# ===== RESPONSES =====

class ComponentOut(BaseModel):
    name: str = Field(..., description="Display name, e.g. M2(Q) or (-1,-1/Q(sqrt(2)))")
    dim: int = Field(..., description="Dimension over Q")
    matrix_size: int
    center: str
    division_part: str
    classification: str
    faithful: bool
    kernel_order: int
    copies: int = Field(1, description="Copies after extension of scalars")


class CommandResponse(BaseModel):
    """Standard envelope for every command."""

    status: Literal["ok", "error"] = Field(..., description="Response status")
    data: Optional[Dict[str, Any]] = Field(None, description="Command-specific result")
    error: Optional[str] = Field(None, description="Error message if failed")
    meta: Dict[str, Any] = Field(default_factory=dict, description="error_code, duration_s and command metadata")


COMMAND_MODELS: Dict[str, Type[BaseCommandInput]] = {
    "decompose": DecomposeInput,
    "mexc": MexcInput,
    "classifyalgebra": ClassifyAlgebraInput,
    "vcd": VcdInput,
    "din": DinInput,
    "good": GoodInput,
    "vql": VqlInput,
    "vahlencheck": VahlenCheckInput,
    "torsionlevel": TorsionLevelInput,
    "embed": EmbedInput,
    "tables": TablesInput,
}


def normalize_command(name: str) -> str:
    return name.strip().lower().replace("_", "").replace("-", "")


def validate_command_input(command: str, data: dict) -> Tuple[Optional[BaseCommandInput], Optional[dict]]:
    """
    Validates input data for a command.

    Returns (model_instance, None) on success and
    (None, {"field": ["error messages"], "meta": {"error_code": "..."}}) on failure.
    """
    key = normalize_command(command)
    if key not in COMMAND_MODELS:
        return None, {
            "command": [f"Unknown command: {command}"],
            "meta": {"error_code": "UNKNOWN_COMMAND"},
        }
    try:
        return COMMAND_MODELS[key](**data), None
    except ValidationError as e:
        errors: Dict[str, Any] = {"meta": {"error_code": "VALIDATION_ERROR"}}
        for error in e.errors():
            field = ".".join(str(x) for x in error["loc"]) if error.get("loc") else "root"
            errors.setdefault(field, []).append(error["msg"])
        return None, errors
