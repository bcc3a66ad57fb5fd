"""qchan: finite-dimensional quantum-channel analysis.

Representation conversions (Kraus, Choi, Stinespring, Holevo),
complementary-channel constructions, and certified structure tests: PPT,
entanglement breaking, degradability, anti-degradability,
self-complementarity and C*-extremality.
"""

from .certificates import Certificate, Verdict
from .matcore import Tolerance, default_tolerance, set_default_tolerance
from .reprs import ChoiMatrix, HolevoForm, KrausRep, StinespringRep

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Verdict",
    "Tolerance",
    "default_tolerance",
    "set_default_tolerance",
    "KrausRep",
    "ChoiMatrix",
    "StinespringRep",
    "HolevoForm",
    "__version__",
]
