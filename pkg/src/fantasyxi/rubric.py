"""Configurable fantasy point tables.

The shipped default encodes the public Dream-11 table circa 2020. Band edges
follow the platform's two-decimal convention ("50-59.99"); a band matches when
lo <= value <= hi, so the published ranges transcribe directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import InvariantViolation

UNBOUNDED = 1e9


@dataclass
class Band:
    """Points awarded when a rate statistic falls in [lo, hi], provided the
    qualifying volume (balls faced / overs bowled) was reached."""
    min_volume: float
    lo: float
    hi: float
    points: float

    def matches(self, value: float, volume: float) -> bool:
        return volume >= self.min_volume and self.lo <= value <= self.hi


@dataclass
class BattingRubric:
    per_run: float = 1.0
    per_four: float = 1.0
    per_six: float = 2.0
    fifty_bonus: float = 8.0
    hundred_bonus: float = 16.0
    duck_penalty: float = -2.0
    strike_rate_bands: list[Band] = field(default_factory=list)


@dataclass
class BowlingRubric:
    per_wicket: float = 25.0
    four_wicket_bonus: float = 8.0
    five_wicket_bonus: float = 16.0
    per_maiden: float = 8.0
    economy_bands: list[Band] = field(default_factory=list)


@dataclass
class FormatRubric:
    batting: BattingRubric
    bowling: BowlingRubric
    playing_xi_points: float = 4.0


@dataclass
class ScoringRubric:
    formats: dict[str, FormatRubric]

    def for_format(self, fmt: str) -> FormatRubric:
        if fmt not in self.formats:
            raise InvariantViolation(f"no rubric for format {fmt!r}")
        return self.formats[fmt]

    def validate(self) -> None:
        for fmt, entry in self.formats.items():
            for label, bands in (("strike_rate_bands", entry.batting.strike_rate_bands),
                                 ("economy_bands", entry.bowling.economy_bands)):
                ordered = sorted(bands, key=lambda b: b.lo)
                for a, b in zip(ordered, ordered[1:]):
                    if b.lo <= a.hi:
                        raise InvariantViolation(
                            f"{fmt}.{label}: bands [{a.lo},{a.hi}] and "
                            f"[{b.lo},{b.hi}] overlap")


def _t20_batting() -> BattingRubric:
    return BattingRubric(
        per_run=1, per_four=1, per_six=2,
        fifty_bonus=8, hundred_bonus=16, duck_penalty=-2,
        strike_rate_bands=[
            Band(10, 0.0, 49.99, -6),
            Band(10, 50.0, 59.99, -4),
            Band(10, 60.0, 70.0, -2),
        ],
    )


def _t20_bowling() -> BowlingRubric:
    return BowlingRubric(
        per_wicket=25, four_wicket_bonus=8, five_wicket_bonus=16, per_maiden=8,
        economy_bands=[
            Band(2, 0.0, 4.99, 3),
            Band(2, 5.0, 5.99, 2),
            Band(2, 6.0, 7.0, 1),
            Band(2, 10.0, 11.0, -2),
            Band(2, 11.01, UNBOUNDED, -4),
        ],
    )


def default_rubric() -> ScoringRubric:
    odi_batting = BattingRubric(
        per_run=1, per_four=1, per_six=2,
        fifty_bonus=4, hundred_bonus=8, duck_penalty=-3,
        strike_rate_bands=[],
    )
    odi_bowling = BowlingRubric(
        per_wicket=25, four_wicket_bonus=8, five_wicket_bonus=16, per_maiden=4,
        economy_bands=[
            Band(5, 0.0, 2.49, 3),
            Band(5, 2.5, 3.49, 2),
            Band(5, 3.5, 4.5, 1),
            Band(5, 7.0, 8.0, -1),
            Band(5, 8.01, 9.0, -2),
            Band(5, 9.01, UNBOUNDED, -4),
        ],
    )
    rubric = ScoringRubric(formats={
        "T20": FormatRubric(batting=_t20_batting(), bowling=_t20_bowling()),
        "IPL": FormatRubric(batting=_t20_batting(), bowling=_t20_bowling()),
        "ODI": FormatRubric(batting=odi_batting, bowling=odi_bowling),
    })
    rubric.validate()
    return rubric


# -- YAML round trip ---------------------------------------------------------

def _band_to_dict(b: Band) -> dict:
    return {"min_volume": b.min_volume, "lo": b.lo, "hi": b.hi, "points": b.points}


def rubric_to_dict(rubric: ScoringRubric) -> dict:
    return {
        "formats": {
            fmt: {
                "playing_xi_points": entry.playing_xi_points,
                "batting": {
                    "per_run": entry.batting.per_run,
                    "per_four": entry.batting.per_four,
                    "per_six": entry.batting.per_six,
                    "fifty_bonus": entry.batting.fifty_bonus,
                    "hundred_bonus": entry.batting.hundred_bonus,
                    "duck_penalty": entry.batting.duck_penalty,
                    "strike_rate_bands": [_band_to_dict(b)
                                          for b in entry.batting.strike_rate_bands],
                },
                "bowling": {
                    "per_wicket": entry.bowling.per_wicket,
                    "four_wicket_bonus": entry.bowling.four_wicket_bonus,
                    "five_wicket_bonus": entry.bowling.five_wicket_bonus,
                    "per_maiden": entry.bowling.per_maiden,
                    "economy_bands": [_band_to_dict(b)
                                      for b in entry.bowling.economy_bands],
                },
            }
            for fmt, entry in sorted(rubric.formats.items())
        }
    }


def rubric_from_dict(doc: dict) -> ScoringRubric:
    formats = {}
    for fmt, entry in doc["formats"].items():
        bat = entry["batting"]
        bowl = entry["bowling"]
        formats[fmt] = FormatRubric(
            playing_xi_points=float(entry.get("playing_xi_points", 4.0)),
            batting=BattingRubric(
                per_run=float(bat["per_run"]),
                per_four=float(bat["per_four"]),
                per_six=float(bat["per_six"]),
                fifty_bonus=float(bat["fifty_bonus"]),
                hundred_bonus=float(bat["hundred_bonus"]),
                duck_penalty=float(bat["duck_penalty"]),
                strike_rate_bands=[
                    Band(float(b["min_volume"]), float(b["lo"]), float(b["hi"]),
                         float(b["points"]))
                    for b in bat.get("strike_rate_bands", [])
                ],
            ),
            bowling=BowlingRubric(
                per_wicket=float(bowl["per_wicket"]),
                four_wicket_bonus=float(bowl["four_wicket_bonus"]),
                five_wicket_bonus=float(bowl["five_wicket_bonus"]),
                per_maiden=float(bowl["per_maiden"]),
                economy_bands=[
                    Band(float(b["min_volume"]), float(b["lo"]), float(b["hi"]),
                         float(b["points"]))
                    for b in bowl.get("economy_bands", [])
                ],
            ),
        )
    rubric = ScoringRubric(formats=formats)
    rubric.validate()
    return rubric


def save_rubric(rubric: ScoringRubric, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(rubric_to_dict(rubric), fh, sort_keys=True)


def load_rubric(path: str) -> ScoringRubric:
    with open(path, encoding="utf-8") as fh:
        return rubric_from_dict(yaml.safe_load(fh))
