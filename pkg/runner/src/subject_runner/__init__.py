"""Subject-code host speaking the semdiff runner protocol."""

__version__ = "0.1.0"

from subject_runner.canon import canonicalize, canonicalize_stdout
from subject_runner.provider import FuzzedDataProvider
from subject_runner.session import Session

__all__ = ["FuzzedDataProvider", "Session", "canonicalize", "canonicalize_stdout", "__version__"]
