"""Bijective label <-> integer code maps for the categorical feature columns.

Codes are dense from 0 in lexicographic label order, so refitting the same
rows always yields the same codebook. Trees split on these integer codes
directly; no one-hot expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EmptyInput, UnknownLabel

REJECT = "reject"
RESERVE = "reserve_code"


@dataclass
class Codebook:
    columns: dict[str, list[str]] = field(default_factory=dict)  # code -> label
    unknown_policy: str = REJECT
    _lookup: dict[str, dict[str, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._rebuild()

    def _rebuild(self):
        self._lookup = {col: {label: i for i, label in enumerate(labels)}
                        for col, labels in self.columns.items()}

    def encode(self, column: str, label: str) -> int:
        table = self._lookup[column]
        code = table.get(label)
        if code is None:
            if self.unknown_policy == RESERVE:
                return len(table)  # single reserved code per column
            raise UnknownLabel(f"{column}: {label!r}")
        return code

    def decode(self, column: str, code: int) -> str:
        labels = self.columns[column]
        if 0 <= code < len(labels):
            return labels[code]
        if self.unknown_policy == RESERVE and code == len(labels):
            return "<unknown>"
        raise UnknownLabel(f"{column}: code {code}")

    def size(self, column: str) -> int:
        return len(self.columns[column])


def fit_codebook(label_sets: dict[str, set[str] | list[str]],
                 unknown_policy: str = REJECT) -> Codebook:
    """Build a codebook from the distinct labels observed per column."""
    if not label_sets or all(len(v) == 0 for v in label_sets.values()):
        raise EmptyInput("no labels to encode")
    columns = {col: sorted(set(labels)) for col, labels in label_sets.items()}
    return Codebook(columns=columns, unknown_policy=unknown_policy)
