import os
from dataclasses import asdict, dataclass, replace

from structs.exceptions import ConfigError

VERSION = "0.1.0"

PROFILE_VARIABLE = "BELLSPLIT_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    """
    Tolerance ladder shared by every module.

    construction:  checks on freshly built values (finite, Hermitian, trace)
    identity:      algebraic identities (unitarity, block relations)
    oracle:        agreement between independent evaluation routes
    """
    construction: float = 1e-12
    identity: float = 1e-10
    oracle: float = 1e-8

    def with_overrides(self, overrides: dict) -> "Tolerances":
        unknown = set(overrides) - set(asdict(self))

        if unknown:
            raise ConfigError(details=f"Unknown tolerance keys: {sorted(unknown)}")

        values = {}
        for key, value in overrides.items():
            value = float(value)
            if not value > 0:
                raise ConfigError(details=f"Tolerance {key} must be positive, got {value}")
            values[key] = value

        return replace(self, **values)

    def as_dict(self) -> dict:
        return asdict(self)


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(construction=1e-13, identity=1e-11, oracle=1e-9),
}

DEFAULT = PROFILES["default"]


def tolerance_profile(name: str = None) -> Tolerances:
    """
    Resolves a named profile; falls back to BELLSPLIT_TOLERANCE_PROFILE, then
    to `default`.
    """
    if name is None:
        name = os.environ.get(PROFILE_VARIABLE, "default")

    try:
        return PROFILES[name.strip().lower()]

    except KeyError:
        raise ConfigError(
            details=f"{PROFILE_VARIABLE} must be one of {sorted(PROFILES)}, got {name!r}")
