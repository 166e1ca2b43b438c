from enum import Enum


class Result(Enum):
    """
    Outcome of a verification suite or campaign. The value is what lands in
    the JSON report's "passed" field.
    """
    SUCCESS = True
    ERROR = False

    @classmethod
    def of(cls, passed: bool) -> "Result":
        return cls.SUCCESS if passed else cls.ERROR
