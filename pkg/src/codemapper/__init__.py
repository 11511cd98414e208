"""codemapper: map a character-range code region from one git commit to
its corresponding region in another commit, language-agnostically."""

from codemapper.candidates import Candidate, Origin
from codemapper.pipeline import MappingResult, map_region
from codemapper.regions import (
    DELETED,
    CharacterRange,
    DeletedRegion,
    Region,
    make_range,
)
from codemapper.selector import SelectionConfig

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "CharacterRange",
    "DELETED",
    "DeletedRegion",
    "MappingResult",
    "Origin",
    "Region",
    "SelectionConfig",
    "__version__",
    "make_range",
    "map_region",
]
