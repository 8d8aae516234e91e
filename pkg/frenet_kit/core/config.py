"""
Run configuration using Pydantic Settings
"""

from contextvars import ContextVar
from typing import Any, Dict, List, Optional, Tuple, Type

from pydantic import Field, field_validator
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource

# config file sections keyed by settings group class, set while settings load
_file_sections: ContextVar[Dict[type, Dict[str, Any]]] = ContextVar("file_sections", default={})


class ConfigFileSource(PydanticBaseSettingsSource):
    """One settings group's section of a JSON config file"""

    def __init__(self, settings_cls: Type[BaseSettings], section: Dict[str, Any]):
        super().__init__(settings_cls)
        self.section = section

    def get_field_value(self, field: FieldInfo, field_name: str) -> Tuple[Any, str, bool]:
        return self.section.get(field_name), field_name, False

    def __call__(self) -> Dict[str, Any]:
        return {
            name: value
            for name, value in self.section.items()
            if name in self.settings_cls.model_fields
        }


class GroupSettings(BaseSettings):
    """Base for settings groups: init values, then environment, then config file"""

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        section = _file_sections.get().get(settings_cls, {})
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            ConfigFileSource(settings_cls, section),
            file_secret_settings,
        )


class GeometrySettings(GroupSettings):
    """Tolerances shared by the simplex and flag-simplex predicates"""

    tol_orth: float = Field(
        default=1e-9, gt=0, description="Orthonormality tolerance for frames"
    )
    tol_bary: float = Field(
        default=1e-9, gt=0, description="Barycentric membership tolerance"
    )
    tol_aff: float = Field(
        default=1e-9, gt=0, description="Distance tolerance to an affine hull"
    )
    rank_tol: float = Field(
        default=1e-10, gt=0, description="Residual norm below which a vector is dependent"
    )

    model_config = {"env_prefix": "FRENET_KIT_GEOMETRY_"}


class EstimatorSettings(GroupSettings):
    """Frenet frame estimation settings"""

    window: int = Field(
        default=5, ge=3, description="Number of tail directions used per level"
    )
    angle_tol: float = Field(
        default=1e-4, gt=0, description="Max pairwise tail angle (rad) for convergence"
    )
    divergence_angle: float = Field(
        default=0.5, gt=0, description="Tail spread (rad) reported as divergence"
    )
    floor_factor: float = Field(
        default=1e-13,
        gt=0,
        description="Residual floor as a multiple of the data scale",
    )
    noise_factor: float = Field(
        default=100.0,
        gt=1,
        description="Margin over the error inherited from lower levels for a residual to count",
    )

    model_config = {"env_prefix": "FRENET_KIT_ESTIMATOR_"}


class TangentSettings(GroupSettings):
    """Tangent detection and outgoing test settings"""

    cluster_angle: float = Field(
        default=0.3, gt=0, description="Angular threshold (rad) for direction clusters"
    )
    min_tail: int = Field(
        default=10, ge=1, description="Determining points required inside the test ball"
    )
    min_points: int = Field(
        default=5, ge=2, description="Samples required near a base point"
    )
    radius: Optional[float] = Field(
        default=None, gt=0, description="Neighbourhood radius; derived from data if unset"
    )
    window: int = Field(
        default=5, ge=2, description="Tail directions checked for cluster convergence"
    )
    accumulation_ratio: float = Field(
        default=0.05,
        gt=0,
        le=1,
        description="A cluster must come this close to base, relative to the neighbourhood size",
    )
    max_depth: Optional[int] = Field(
        default=None, ge=1, description="Longest tangent frame searched (default: dimension)"
    )
    mem_tol: float = Field(
        default=1e-10, gt=0, description="Absolute flag membership tolerance"
    )
    scales: Optional[List[float]] = Field(
        default=None, description="Explicit flag scales for the outgoing test"
    )
    sweep_factors: List[float] = Field(
        default_factory=list,
        description="Scale factors for the multi-scale outgoing vote (empty disables it)",
    )

    model_config = {"env_prefix": "FRENET_KIT_TANGENT_"}

    @field_validator("scales", "sweep_factors")
    @classmethod
    def validate_positive(cls, v):
        if v is not None and any(s <= 0 for s in v):
            raise ValueError("Scales and sweep factors must be positive")
        return v


class WitnessSettings(GroupSettings):
    """Witness ratio table settings"""

    multipliers: List[int] = Field(
        default_factory=lambda: [10**e for e in range(7)],
        description="Multiplier ladder for the ratio table",
    )

    model_config = {"env_prefix": "FRENET_KIT_WITNESS_"}

    @field_validator("multipliers")
    @classmethod
    def validate_multipliers(cls, v):
        if not v or any(m <= 0 for m in v):
            raise ValueError("Multipliers must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("Multipliers must be strictly increasing")
        return v


class AppSettings(GroupSettings):
    """Main application settings"""

    debug: bool = Field(default=False, description="Enable debug logging")
    seed: int = Field(default=0, ge=0, description="Seed for randomized internals")
    schema_version: str = Field(default="1.0", description="Report schema version")

    model_config = {"env_prefix": "FRENET_KIT_"}


class Settings(BaseSettings):
    """Main settings class that combines all setting groups"""

    app: AppSettings = Field(default_factory=AppSettings)
    geometry: GeometrySettings = Field(default_factory=GeometrySettings)
    estimator: EstimatorSettings = Field(default_factory=EstimatorSettings)
    tangent: TangentSettings = Field(default_factory=TangentSettings)
    witness: WitnessSettings = Field(default_factory=WitnessSettings)

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }


# Global settings instance
settings = Settings()


def build_settings(sections: Optional[Dict[str, Dict[str, Any]]] = None) -> Settings:
    """
    Settings with config file sections layered under the environment

    Args:
        sections: Group name to field values, as read from a config file

    Returns:
        Fresh Settings; a field set in the environment keeps its environment value
    """
    by_group = {
        Settings.model_fields[name].annotation: values for name, values in (sections or {}).items()
    }
    token = _file_sections.set(by_group)
    try:
        return Settings()
    finally:
        _file_sections.reset(token)
