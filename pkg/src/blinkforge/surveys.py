"""Scoring for the mood questionnaire: PANAS positive/negative affect sums
and the STAI state-anxiety total with reverse-scored positively worded
items.

The STAI item roster is configuration data. The default 20-item standard
roster yields the conventional 20-80 range. The 19-item abbreviated roster
(as administered in short-form studies) is also shipped; it scores 19-76
and selecting it emits a warning so the non-standard range is never silent.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import InvalidResponseError

PANAS_POSITIVE_ITEMS: tuple[str, ...] = (
    "Alert", "Inspired", "Determined", "Attentive", "Active",
)
PANAS_NEGATIVE_ITEMS: tuple[str, ...] = (
    "Upset", "Hostile", "Ashamed", "Nervous", "Afraid",
)
PANAS_ITEMS: tuple[str, ...] = PANAS_POSITIVE_ITEMS + PANAS_NEGATIVE_ITEMS

#: (item text, polarity) where positive polarity means reverse-scored
STAI_ROSTER_ABBREVIATED: tuple[tuple[str, str], ...] = (
    ("I feel calm", "Positive"),
    ("I feel secure", "Positive"),
    ("I am tense", "Negative"),
    ("I feel strained", "Negative"),
    ("I feel at ease", "Positive"),
    ("I feel upset", "Negative"),
    ("I am presently worrying over possible misfortunes", "Negative"),
    ("I feel satisfied", "Positive"),
    ("I feel frightened", "Negative"),
    ("I feel comfortable", "Positive"),
    ("I feel self-confident", "Positive"),
    ("I feel nervous", "Negative"),
    ("I am jittery", "Negative"),
    ("I feel indecisive", "Negative"),
    ("I am relaxed", "Positive"),
    ("I feel content", "Positive"),
    ("I am worried", "Negative"),
    ("I feel confused", "Negative"),
    ("I feel steady", "Positive"),
)

#: the standard 20-item state form: the abbreviated roster plus the
#: remaining positively worded item of the full instrument
STAI_ROSTER_STANDARD: tuple[tuple[str, str], ...] = STAI_ROSTER_ABBREVIATED + (
    ("I feel pleasant", "Positive"),
)

STAI_ROSTERS = {
    "standard": STAI_ROSTER_STANDARD,
    "abbreviated": STAI_ROSTER_ABBREVIATED,
}


@dataclass(frozen=True)
class SurveyResponse:
    panas_items: dict[str, int] = field(default_factory=dict)
    stai_items: dict[str, int] = field(default_factory=dict)


def _check_item(name: str, value, lo: int, hi: int) -> int:
    if not isinstance(value, (int,)) or isinstance(value, bool):
        raise InvalidResponseError(f"item {name!r} must be an integer, got {value!r}")
    if not (lo <= value <= hi):
        raise InvalidResponseError(
            f"item {name!r} = {value} outside the {lo}-{hi} scale"
        )
    return value


def score_panas(resp: SurveyResponse) -> tuple[int, int]:
    """Sum the five positive-affect and five negative-affect items.

    Both subscales range 5-25. All ten items must be present and on the
    1-5 scale.
    """
    missing = [i for i in PANAS_ITEMS if i not in resp.panas_items]
    if missing:
        raise InvalidResponseError(f"missing PANAS items: {missing}")
    pa = sum(_check_item(i, resp.panas_items[i], 1, 5) for i in PANAS_POSITIVE_ITEMS)
    na = sum(_check_item(i, resp.panas_items[i], 1, 5) for i in PANAS_NEGATIVE_ITEMS)
    return pa, na


def score_stai_state(resp: SurveyResponse, roster: str = "standard") -> int:
    """Total state anxiety: negative items raw, positive items as (5 - value).

    With the standard 20-item roster the total ranges 20-80.
    """
    if roster not in STAI_ROSTERS:
        raise InvalidResponseError(
            f"unknown roster {roster!r}; choose from {sorted(STAI_ROSTERS)}"
        )
    items = STAI_ROSTERS[roster]
    if roster == "abbreviated":
        warnings.warn(
            "abbreviated 19-item roster selected: totals range 19-76, "
            "not the standard 20-80",
            stacklevel=2,
        )
    missing = [name for name, _ in items if name not in resp.stai_items]
    if missing:
        raise InvalidResponseError(f"missing STAI items: {missing}")
    total = 0
    for name, polarity in items:
        value = _check_item(name, resp.stai_items[name], 1, 4)
        total += (5 - value) if polarity == "Positive" else value
    return total
