"""Machine-checkable verdict objects shared by the decision procedures."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .matcore import Tolerance


class Verdict(enum.Enum):
    TRUE = "True"
    FALSE = "False"
    INDETERMINATE = "Indeterminate"

    @property
    def is_true(self) -> bool:
        return self is Verdict.TRUE

    @property
    def is_false(self) -> bool:
        return self is Verdict.FALSE


@dataclass(frozen=True)
class Certificate:
    """Verdict plus the witness data needed to re-check it independently.

    True/False verdicts always carry a witness or a cited obstruction;
    Indeterminate carries the reason. Witness values are numpy arrays,
    floats, index pairs or nested dicts of those; serialisation lives in
    the document layer.
    """

    property: str
    verdict: Verdict
    witness: dict = field(default_factory=dict)
    tolerances: Tolerance = field(default_factory=Tolerance)
    provenance: tuple = ()

    def __bool__(self) -> bool:
        return self.verdict is Verdict.TRUE
