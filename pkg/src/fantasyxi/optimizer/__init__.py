"""Roster selection: exactly `roster_size` players, credit budget, per-team cap.

Three routes to the same objective (maximize the plain sum of projected
points): an exact dynamic program over (card, budget, slots, team-0 picks)
states, a ratio-greedy heuristic with an exact completion-feasibility check,
and an exhaustive enumeration used as the verification oracle. All three share
one tie rule: among optimal rosters, the lexicographically smallest sorted
player-name list wins.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..dataset import moving_average
from ..errors import (
    EmptyHistory,
    Infeasible,
    InvalidConfig,
    TooFewPlayers,
    TooLarge,
)

EXACT_DP = "exact_dp"
GREEDY = "greedy"
BRUTE_FORCE = "brute_force"

_BRUTE_MAX_CARDS = 24
_BRUTE_CHUNK = 131072
_combo_cache: dict[tuple[int, int], np.ndarray] = {}


@dataclass
class PlayerCard:
    player: str
    team_index: int
    credit: float
    projected_points: float
    locked: bool = False
    excluded: bool = False


@dataclass
class RosterConstraints:
    roster_size: int = 11
    budget: float = 100.0
    max_per_team: int = 7

    def validate(self) -> None:
        if self.roster_size < 1:
            raise InvalidConfig("roster_size must be >= 1")
        if self.budget <= 0:
            raise InvalidConfig("budget must be positive")
        if self.max_per_team < 1 or 2 * self.max_per_team < self.roster_size:
            raise InvalidConfig(
                f"two teams capped at {self.max_per_team} cannot fill "
                f"{self.roster_size} slots")


@dataclass
class Recommendation:
    selected: list[PlayerCard]
    captain: str
    vice_captain: str
    total_credits: float
    base_points: float
    expected_points: float
    method: str

    def to_dict(self) -> dict:
        return {
            "selected": [
                {"player": c.player, "team_index": c.team_index,
                 "credit": c.credit, "projected_points": c.projected_points,
                 "locked": c.locked}
                for c in self.selected
            ],
            "captain": self.captain,
            "vice_captain": self.vice_captain,
            "total_credits": self.total_credits,
            "base_points": self.base_points,
            "expected_points": self.expected_points,
            "method": self.method,
        }


def _half_credits(credit: float, player: str) -> int:
    doubled = credit * 2
    if doubled <= 0 or doubled != int(doubled):
        raise InvalidConfig(
            f"{player}: credit {credit} is not a positive half-credit step")
    return int(doubled)


def _check_cards(cards: list[PlayerCard]) -> None:
    names = set()
    for c in cards:
        if c.player in names:
            raise InvalidConfig(f"duplicate player name {c.player!r}")
        names.add(c.player)
        if c.team_index not in (0, 1):
            raise InvalidConfig(f"{c.player}: team_index must be 0 or 1")
        if c.locked and c.excluded:
            raise InvalidConfig(f"{c.player}: both locked and excluded")
        _half_credits(c.credit, c.player)


def _setup(cards: list[PlayerCard], constraints: RosterConstraints):
    """Split into forced locks and free candidates; deduct lock consumption."""
    constraints.validate()
    _check_cards(cards)
    active = [c for c in cards if not c.excluded]
    if len(active) < constraints.roster_size:
        raise TooFewPlayers(
            f"{len(active)} selectable cards < roster of {constraints.roster_size}")
    locked = sorted((c for c in active if c.locked), key=lambda c: c.player)
    free = sorted((c for c in active if not c.locked), key=lambda c: c.player)
    if len(locked) > constraints.roster_size:
        raise Infeasible(f"{len(locked)} locked cards exceed the roster size")
    budget2 = _half_credits(constraints.budget, "budget")
    lock_wt = sum(_half_credits(c.credit, c.player) for c in locked)
    lock_t0 = sum(1 for c in locked if c.team_index == 0)
    lock_t1 = len(locked) - lock_t0
    if lock_t0 > constraints.max_per_team or lock_t1 > constraints.max_per_team:
        raise Infeasible("locked cards already exceed the per-team cap")
    if lock_wt > budget2:
        raise Infeasible("locked cards already exceed the budget")
    slots = constraints.roster_size - len(locked)
    cap0 = constraints.max_per_team - lock_t0
    cap1 = constraints.max_per_team - lock_t1
    return locked, free, budget2 - lock_wt, slots, cap0, cap1


def _finish(selection: list[PlayerCard], method: str) -> Recommendation:
    selection = sorted(selection, key=lambda c: c.player)
    captain, vice = choose_captain(selection)
    base = sum(c.projected_points for c in selection)
    bonus = 0.0
    for c in selection:
        if c.player == captain:
            bonus += c.projected_points
        elif c.player == vice:
            bonus += 0.5 * c.projected_points
    return Recommendation(
        selected=selection,
        captain=captain,
        vice_captain=vice,
        total_credits=sum(c.credit for c in selection),
        base_points=base,
        expected_points=base + bonus,
        method=method,
    )


# -- exact dynamic program -----------------------------------------------------

def recommend_exact(cards: list[PlayerCard],
                    constraints: RosterConstraints | None = None) -> Recommendation:
    constraints = constraints or RosterConstraints()
    locked, free, budget2, slots, cap0, cap1 = _setup(cards, constraints)
    if slots == 0:
        return _finish(list(locked), EXACT_DP)
    wt2 = np.array([_half_credits(c.credit, c.player) for c in free], dtype=np.int64)
    points = np.array([c.projected_points for c in free], dtype=np.float64)
    team = np.array([c.team_index for c in free], dtype=np.int8)
    budget2 = min(budget2, int(wt2.sum()))
    g = kernels.knapsack_layers(wt2, points, team, budget2, slots, cap0, cap1)
    if g[0, budget2, slots, cap0] == -np.inf:
        raise Infeasible("no roster satisfies budget and team caps")
    picks = _reconstruct(g, wt2, points, team, budget2, slots, cap0, cap1)
    return _finish(list(locked) + [free[i] for i in picks], EXACT_DP)


def _reconstruct(g, wt2, points, team, budget2, slots, cap0, cap1) -> list[int]:
    """Walk the suffix table preferring inclusion, which yields the
    lexicographically smallest name list among optimal rosters (cards arrive
    sorted by name). Take-values are recomputed with the same expression the
    DP used, so float equality is exact."""
    w, k, a = budget2, slots, cap0
    picks = []
    for i in range(len(wt2)):
        if k == 0:
            break
        wt = int(wt2[i])
        if wt > w:
            continue
        cur = g[i, w, k, a]
        if team[i] == 0:
            if a >= 1 and points[i] + g[i + 1, w - wt, k - 1, a - 1] == cur:
                picks.append(i)
                w -= wt
                k -= 1
                a -= 1
        else:
            b = cap1 - (slots - k) + (cap0 - a)
            if b >= 1 and points[i] + g[i + 1, w - wt, k - 1, a] == cur:
                picks.append(i)
                w -= wt
                k -= 1
    if k != 0:
        raise Infeasible("reconstruction failed to fill the roster")
    return picks


# -- greedy heuristic ----------------------------------------------------------

def recommend_greedy(cards: list[PlayerCard],
                     constraints: RosterConstraints | None = None) -> Recommendation:
    """Points-per-credit descending, accepting a card only when an exact
    completion check (cheapest remaining fill under both team caps) still
    fits the budget. Never beats the exact solver."""
    constraints = constraints or RosterConstraints()
    locked, free, budget2, slots, cap0, cap1 = _setup(cards, constraints)
    if slots == 0:
        return _finish(list(locked), GREEDY)
    order = sorted(free, key=lambda c: (-c.projected_points / c.credit, c.player))
    wt = [_half_credits(c.credit, c.player) for c in order]
    if _completion_cost(order, wt, 0, slots, cap0, cap1) > budget2:
        raise Infeasible("no roster satisfies budget and team caps")
    chosen: list[PlayerCard] = []
    budget_rem = budget2
    need = slots
    caps = [cap0, cap1]
    for i, card in enumerate(order):
        if need == 0:
            break
        if wt[i] > budget_rem or caps[card.team_index] == 0:
            continue
        caps[card.team_index] -= 1
        cost = _completion_cost(order, wt, i + 1, need - 1, caps[0], caps[1])
        if cost <= budget_rem - wt[i]:
            chosen.append(card)
            budget_rem -= wt[i]
            need -= 1
        else:
            caps[card.team_index] += 1
    if need != 0:
        raise Infeasible("greedy could not complete the roster")
    return _finish(list(locked) + chosen, GREEDY)


def _completion_cost(order, wt, start, need, cap0, cap1) -> int:
    """Cheapest way to take `need` more cards from order[start:] with at most
    cap0/cap1 per team; a value above any budget when impossible."""
    if need == 0:
        return 0
    team0 = sorted(wt[i] for i in range(start, len(order)) if order[i].team_index == 0)
    team1 = sorted(wt[i] for i in range(start, len(order)) if order[i].team_index == 1)
    pre0 = [0]
    for v in team0:
        pre0.append(pre0[-1] + v)
    pre1 = [0]
    for v in team1:
        pre1.append(pre1[-1] + v)
    best = 1 << 40
    lo = max(0, need - min(cap1, len(team1)))
    hi = min(need, cap0, len(team0))
    for j in range(lo, hi + 1):
        rest = need - j
        cost = pre0[j] + pre1[rest]
        if cost < best:
            best = cost
    return best


# -- exhaustive oracle ----------------------------------------------------------

def brute_force(cards: list[PlayerCard],
                constraints: RosterConstraints | None = None) -> Recommendation:
    """Enumerate every roster-sized subset. Independent of the DP: vectorized
    subset sums over cached combination tables, scanned in lexicographic
    order so the first maximum is also the tie-break winner."""
    constraints = constraints or RosterConstraints()
    constraints.validate()
    _check_cards(cards)
    active = sorted((c for c in cards if not c.excluded), key=lambda c: c.player)
    n = len(active)
    if n > _BRUTE_MAX_CARDS:
        raise TooLarge(f"{n} cards exceed the enumeration guard of {_BRUTE_MAX_CARDS}")
    k = constraints.roster_size
    if n < k:
        raise TooFewPlayers(f"{n} selectable cards < roster of {k}")
    budget2 = _half_credits(constraints.budget, "budget")
    wt2 = np.array([_half_credits(c.credit, c.player) for c in active], dtype=np.int64)
    points = np.array([c.projected_points for c in active], dtype=np.float64)
    team = np.array([c.team_index for c in active], dtype=np.int64)
    lockedv = np.array([1 if c.locked else 0 for c in active], dtype=np.int64)
    n_locked = int(lockedv.sum())

    key = (n, k)
    if key not in _combo_cache:
        _combo_cache[key] = np.array(
            list(itertools.combinations(range(n), k)), dtype=np.int8)
    combos = _combo_cache[key]

    best_value = -np.inf
    best_combo = None
    for start in range(0, len(combos), _BRUTE_CHUNK):
        chunk = combos[start:start + _BRUTE_CHUNK].astype(np.int64)
        wsum = wt2[chunk].sum(axis=1)
        tcount = team[chunk].sum(axis=1)
        lcount = lockedv[chunk].sum(axis=1)
        feasible = (
            (wsum <= budget2)
            & (tcount <= constraints.max_per_team)
            & ((k - tcount) <= constraints.max_per_team)
            & (lcount == n_locked)
        )
        if not feasible.any():
            continue
        psum = np.where(feasible, points[chunk].sum(axis=1), -np.inf)
        pos = int(np.argmax(psum))
        if psum[pos] > best_value:
            best_value = float(psum[pos])
            best_combo = chunk[pos]
    if best_combo is None:
        raise Infeasible("no roster satisfies budget and team caps")
    return _finish([active[int(i)] for i in best_combo], BRUTE_FORCE)


# -- captain choice and credit estimation ----------------------------------------

def choose_captain(selection: list[PlayerCard]) -> tuple[str, str]:
    """Highest projected points is captain, second is vice; name breaks ties."""
    if len(selection) < 2:
        raise TooFewPlayers("captain choice needs at least 2 players")
    ranked = sorted(selection, key=lambda c: (-c.projected_points, c.player))
    return ranked[0].player, ranked[1].player


def estimate_credits(history: list[float], league_low: float, league_high: float,
                     window: int = 5) -> float:
    """Fallback pricing: trailing moving average mapped onto [7.0, 11.0] and
    snapped to half-credit steps. Card files are the normal credit source."""
    if not history:
        raise EmptyHistory("cannot price a player with no scores")
    ma = moving_average(history, window)[-1]
    if league_high <= league_low:
        return 9.0
    x = 7.0 + (ma - league_low) / (league_high - league_low) * 4.0
    x = min(11.0, max(7.0, x))
    snapped = int(x * 2 + 0.5) / 2
    return min(11.0, max(7.0, snapped))


# -- card file io -----------------------------------------------------------------

CARD_HEADER = ["player", "team", "credit", "points", "locked", "excluded"]

_TRUTHY = {"1", "true", "yes", "y"}


def load_cards(path: str) -> tuple[list[PlayerCard], list[str]]:
    """CSV card file -> (cards, [team0 name, team1 name]). The points column
    may be blank; callers fill it from the projector."""
    cards = []
    team_names: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CARD_HEADER:
            raise InvalidConfig(f"{path}: header must be {','.join(CARD_HEADER)}")
        for rec in reader:
            team = rec["team"]
            if team not in team_names:
                if len(team_names) == 2:
                    raise InvalidConfig(f"{path}: more than two teams")
                team_names.append(team)
            points = rec["points"].strip()
            cards.append(PlayerCard(
                player=rec["player"],
                team_index=team_names.index(team),
                credit=float(rec["credit"]),
                projected_points=float(points) if points else float("nan"),
                locked=rec["locked"].strip().lower() in _TRUTHY,
                excluded=rec["excluded"].strip().lower() in _TRUTHY,
            ))
    return cards, team_names


def save_cards(cards: list[PlayerCard], team_names: list[str], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CARD_HEADER)
        for c in cards:
            has_points = c.projected_points == c.projected_points  # NaN -> blank
            writer.writerow([
                c.player, team_names[c.team_index], "%g" % c.credit,
                repr(c.projected_points) if has_points else "",
                int(c.locked), int(c.excluded),
            ])
