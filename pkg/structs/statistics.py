from enum import Enum


class Statistics(str, Enum):
    """
    Exchange statistics of the two scattered particles.

    For fermions the roles of gamma_1 and gamma_2 are interchanged.
    """
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"

    @classmethod
    def parse(cls, value) -> "Statistics":
        if isinstance(value, cls):
            return value

        try:
            return cls(str(value).strip().lower())

        except ValueError:
            raise ValueError(f"statistics must be 'bosonic' or 'fermionic', got {value!r}")
