from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Tuple

from ..errors import UsageError

# Fixture column token -> indicator name as printed in report tables.
COLUMN_DISPLAY_NAMES = {
    "air": "Air pollution",
    "homicide": "Homicide rate",
    "life_expectancy": "Life expectancy",
    "satisfaction": "Life satisfaction",
    "employment": "Employment rate",
    "education": "Educational attainment",
    "water": "Water quality",
    "safety": "Feeling safe walking alone",
    "support": "Quality of support network",
}


@dataclass(frozen=True)
class StudyDefinition:
    """One response variable with the predictors and extra ladder rows studied for it."""

    name: str
    response: str
    predictors: Tuple[str, ...]
    # removal sets beyond the single removals and the null model
    extra_removals: Tuple[Tuple[str, ...], ...] = ()
    # predictor sets that get their own drop-one ladder as a new "full" model
    reduced_models: Tuple[Tuple[str, ...], ...] = ()

    def removal_subsets(self) -> List[Tuple[str, ...]]:
        singles = [(name,) for name in self.predictors]
        return singles + list(self.extra_removals) + [self.predictors]

    @property
    def columns(self) -> Tuple[str, ...]:
        return (self.response, *self.predictors)


_EDUCATION_PREDICTORS = ("employment", "air", "satisfaction", "homicide")

# Study name -> definition. Predictor order fixes the x1..xk labels of ladder rows.
STUDIES: Dict[str, StudyDefinition] = {
    "education": StudyDefinition(
        name="education",
        response="education",
        predictors=_EDUCATION_PREDICTORS,
        extra_removals=tuple(combinations(_EDUCATION_PREDICTORS, 2)),
    ),
    "water": StudyDefinition(
        name="water",
        response="water",
        predictors=("employment", "air", "life_expectancy", "satisfaction", "homicide"),
        extra_removals=(("life_expectancy", "homicide"),),
        reduced_models=(("employment", "air", "satisfaction"),),
    ),
    "support": StudyDefinition(
        name="support",
        response="support",
        predictors=("air", "life_expectancy", "homicide"),
    ),
    "safety": StudyDefinition(
        name="safety",
        response="safety",
        predictors=("employment", "air"),
    ),
}


def get_study(name: str) -> StudyDefinition:
    """
    Look up a study by name (case-insensitive).

    Raises:
        UsageError: listing the valid study names when ``name`` is unknown.
    """
    study = STUDIES.get(name.strip().lower())
    if study is None:
        raise UsageError(f"Unknown study {name!r}; valid studies: {', '.join(STUDIES)}")
    return study


def display_name(column: str) -> str:
    return COLUMN_DISPLAY_NAMES.get(column, column)
