"""JSON input documents: posets, games, operators, schedules, Bertrand models.

Document layout (every section optional, every entry named)::

    {
      "settings":  {"chain_cap": 20, "profile_cap": 10000, "cycle_cap": 100000},
      "posets":    {"P": {"elements": ["lo", "hi"], "covers": [["lo", "hi"]]},
                    "Q": {"elements": ["a", "b"], "relation": [["a", "a"], ["b", "b"]]}},
      "games":     {"g": {"players": ["P", "P"],
                          "payoffs": [{"profile": ["lo", "lo"], "utilities": ["1", "-1/2"]}, ...]}},
      "operators": {"A": {"game": "g", "table": [{"from": ["lo", "hi"], "to": ["hi", "lo"]}, ...]}},
      "maps":      {"m": {"poset": "P", "values": {"lo": ["hi"], "hi": ["hi"]}}},
      "duals":     {"d": {"game": "g", "operator": "A"}},
      "repeated":  {"r": {"game": "g", "prefix": ["A"], "cycle": ["identity"], "rho": "1/2"}},
      "bertrand":  {"b": {"costs": ["1", "2"], "caps": ["4", "4"], "demand": ["12", "1", "1"],
                          "grid": {"step": "1/4"},
                          "transforms": {"prefix": [], "cycle": [["1", "1"]]}, "rho": "1/2"}}
    }

Rationals are ``"p/q"`` or integer strings (JSON integers are accepted too).
The operator name ``identity`` is built in for every game.  Operator tables
must be total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .bertrand import BertrandModel, ModelError, PriceTransform, TransformSchedule
from .common import Caps, parse_rational
from .dual import DualGame, ProfileOperator
from .fixedpoint import EmptyValueError, SetValuedMap
from .game import GameError, StaticGame
from .poset import FinitePoset, PosetError, validate_poset
from .repeated import OperatorSchedule, RepeatedGame, ScheduleError

SECTIONS = ("posets", "games", "operators", "maps", "duals", "repeated", "bertrand")


class SpecError(ValueError):
    """Input document is malformed; ``where`` locates the problem."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class BertrandEntry:
    model: BertrandModel
    schedule: TransformSchedule
    rho: Fraction | None
    step: Fraction | None = None


@dataclass
class GameSpec:
    caps: Caps = field(default_factory=Caps)
    posets: dict[str, FinitePoset] = field(default_factory=dict)
    games: dict[str, StaticGame] = field(default_factory=dict)
    game_players: dict[str, list[str]] = field(default_factory=dict)
    operators: dict[str, tuple[str, ProfileOperator]] = field(default_factory=dict)
    maps: dict[str, tuple[str, SetValuedMap]] = field(default_factory=dict)
    duals: dict[str, tuple[DualGame, str]] = field(default_factory=dict)
    repeated: dict[str, tuple[RepeatedGame, list[str], list[str]]] = field(default_factory=dict)
    bertrand: dict[str, BertrandEntry] = field(default_factory=dict)
    dual_games: dict[str, str] = field(default_factory=dict)
    repeated_games: dict[str, str] = field(default_factory=dict)

    def to_document(self) -> dict:
        return to_document(self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GameSpec) and self.to_document() == other.to_document()


def _rat(value: Any, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise SpecError(where, str(exc)) from None


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise SpecError(name, "section must be an object of named entries")
    return sec


def _ref(table: dict, name: Any, where: str, kind: str):
    if name not in table:
        raise SpecError(where, f"unknown {kind} {name!r}")
    return table[name]


def _profile(game: StaticGame, labels: Any, where: str) -> tuple[int, ...]:
    if not isinstance(labels, list) or len(labels) != game.n:
        raise SpecError(where, f"profile must list {game.n} strategy labels")
    try:
        return tuple(p.index(s) for p, s in zip(game.posets, labels))
    except PosetError as exc:
        raise SpecError(where, str(exc)) from None


def _parse_poset(name: str, entry: dict) -> FinitePoset:
    where = f"posets.{name}"
    elements = entry.get("elements")
    if not isinstance(elements, list) or not elements:
        raise SpecError(where, "elements must be a nonempty list")
    try:
        if "relation" in entry:
            return validate_poset(elements, [tuple(p) for p in entry["relation"]])
        return FinitePoset.from_covers(elements, [tuple(p) for p in entry.get("covers", [])])
    except PosetError as exc:
        raise SpecError(where, str(exc)) from None


def _parse_game(name: str, entry: dict, posets: dict) -> tuple[StaticGame, list[str]]:
    where = f"games.{name}"
    players = entry.get("players")
    if not isinstance(players, list):
        raise SpecError(where, "players must be a list of poset names")
    if len(players) < 2:
        raise SpecError(where, f"a game needs n >= 2 players, got {len(players)}")
    ps = [_ref(posets, p, where, "poset") for p in players]
    payoffs = {}
    try:
        from .poset import ProductPoset

        space = ProductPoset(ps)
    except PosetError as exc:
        raise SpecError(where, str(exc)) from None
    for k, row in enumerate(entry.get("payoffs", [])):
        rw = f"{where}.payoffs[{k}]"
        try:
            prof = tuple(p.index(s) for p, s in zip(ps, row["profile"]))
        except (KeyError, TypeError):
            raise SpecError(rw, "entry needs 'profile' and 'utilities'") from None
        except PosetError as exc:
            raise SpecError(rw, str(exc)) from None
        if len(row["profile"]) != len(ps):
            raise SpecError(rw, "profile has the wrong number of coordinates")
        utils = row.get("utilities")
        if not isinstance(utils, list) or len(utils) != len(ps):
            raise SpecError(rw, f"utilities must list {len(ps)} rationals")
        if prof in payoffs:
            raise SpecError(rw, "duplicate profile")
        payoffs[prof] = [_rat(u, rw) for u in utils]
    missing = [p for p in space.profiles() if p not in payoffs]
    if missing:
        raise SpecError(where, f"utility table is not total; missing {list(space.labels_of(missing[0]))}")
    try:
        return StaticGame.from_mappings(ps, payoffs), list(players)
    except GameError as exc:
        raise SpecError(where, str(exc)) from None


def _parse_operator(name: str, entry: dict, games: dict) -> tuple[str, ProfileOperator]:
    where = f"operators.{name}"
    gname = entry.get("game")
    game = _ref(games, gname, where, "game")
    sp = game.profiles
    table: list[int | None] = [None] * sp.size
    for k, row in enumerate(entry.get("table", [])):
        rw = f"{where}.table[{k}]"
        src = _profile(game, row.get("from"), rw)
        dst = _profile(game, row.get("to"), rw)
        table[sp.index(src)] = sp.index(dst)
    if any(t is None for t in table):
        first = next(i for i, t in enumerate(table) if t is None)
        raise SpecError(where, f"operator is not total; no image for {list(sp.labels_of(sp.profile(first)))}")
    return gname, ProfileOperator(sp, table)


def _operator_ref(spec: GameSpec, gname: str, oname: Any, where: str) -> ProfileOperator:
    if oname == "identity":
        return ProfileOperator.identity(spec.games[gname].profiles)
    owner, op = _ref(spec.operators, oname, where, "operator")
    if owner != gname:
        raise SpecError(where, f"operator {oname!r} belongs to game {owner!r}, not {gname!r}")
    return op


def _parse_map(name: str, entry: dict, posets: dict) -> tuple[str, SetValuedMap]:
    where = f"maps.{name}"
    pname = entry.get("poset")
    poset = _ref(posets, pname, where, "poset")
    values = entry.get("values", {})
    try:
        rows = [[poset.index(v) for v in values[poset.label(x)]] for x in range(poset.size)]
        return pname, SetValuedMap(poset, rows)
    except KeyError as exc:
        raise SpecError(where, f"no value given for element {exc.args[0]!r}") from None
    except (PosetError, EmptyValueError) as exc:
        raise SpecError(where, str(exc)) from None


def _parse_bertrand(name: str, entry: dict) -> BertrandEntry:
    where = f"bertrand.{name}"
    try:
        c1, c2 = (_rat(v, where + ".costs") for v in entry["costs"])
        cap1, cap2 = (_rat(v, where + ".caps") for v in entry["caps"])
    except (KeyError, ValueError, TypeError):
        raise SpecError(where, "costs and caps must each list two rationals") from None
    demand = tuple(_rat(v, where + ".demand") for v in entry.get("demand", ["12", "1", "1"]))
    grid = entry.get("grid", {})
    step = None
    try:
        if "step" in grid:
            step = _rat(grid["step"], where + ".grid.step")
            model = BertrandModel.uniform(c1, c2, cap1, cap2, step, demand)
        elif "prices1" in grid and "prices2" in grid:
            model = BertrandModel(
                c1, c2, cap1, cap2,
                tuple(_rat(v, where + ".grid") for v in grid["prices1"]),
                tuple(_rat(v, where + ".grid") for v in grid["prices2"]),
                demand,
            )
        else:
            raise SpecError(where, "grid needs 'step' or both 'prices1' and 'prices2'")
    except ModelError as exc:
        raise SpecError(where, str(exc)) from None
    tr = entry.get("transforms", {"prefix": [], "cycle": [["1", "1"]]})

    def transforms(key):
        out = []
        for k, pair in enumerate(tr.get(key, [])):
            try:
                out.append(PriceTransform(_rat(pair[0], where), _rat(pair[1], where)))
            except (ModelError, IndexError, TypeError) as exc:
                raise SpecError(f"{where}.transforms.{key}[{k}]", str(exc)) from None
        return out

    try:
        schedule = TransformSchedule(tuple(transforms("prefix")), tuple(transforms("cycle")))
    except ModelError as exc:
        raise SpecError(where + ".transforms", str(exc)) from None
    rho = _rat(entry["rho"], where + ".rho") if "rho" in entry else None
    if rho is not None and not 0 < rho < 1:
        raise SpecError(where + ".rho", "discount factor must lie in (0, 1)")
    return BertrandEntry(model, schedule, rho, step)


def parse_spec(document: dict | str) -> GameSpec:
    """Build and validate every entry of an input document."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(document, dict):
        raise SpecError("document", "top level must be an object")
    unknown = set(document) - set(SECTIONS) - {"settings"}
    if unknown:
        raise SpecError("document", f"unknown sections {sorted(unknown)}")
    settings = _section(document, "settings")
    try:
        caps = Caps(
            chain=int(settings.get("chain_cap", Caps.chain)),
            profiles=int(settings.get("profile_cap", Caps.profiles)),
            cycle=int(settings.get("cycle_cap", Caps.cycle)),
        )
    except (TypeError, ValueError):
        raise SpecError("settings", "caps must be integers") from None
    spec = GameSpec(caps=caps)
    for name, entry in _section(document, "posets").items():
        spec.posets[name] = _parse_poset(name, entry)
    for name, entry in _section(document, "games").items():
        spec.games[name], spec.game_players[name] = _parse_game(name, entry, spec.posets)
    for name, entry in _section(document, "operators").items():
        if name == "identity":
            raise SpecError(f"operators.{name}", "'identity' is reserved")
        spec.operators[name] = _parse_operator(name, entry, spec.games)
    for name, entry in _section(document, "maps").items():
        spec.maps[name] = _parse_map(name, entry, spec.posets)
    for name, entry in _section(document, "duals").items():
        where = f"duals.{name}"
        gname = entry.get("game")
        game = _ref(spec.games, gname, where, "game")
        oname = entry.get("operator", "identity")
        spec.duals[name] = (DualGame(game, _operator_ref(spec, gname, oname, where)), oname)
        spec.dual_games[name] = gname
    for name, entry in _section(document, "repeated").items():
        where = f"repeated.{name}"
        gname = entry.get("game")
        game = _ref(spec.games, gname, where, "game")
        prefix = list(entry.get("prefix", []))
        cycle = list(entry.get("cycle", ["identity"]))
        try:
            sched = OperatorSchedule(
                [_operator_ref(spec, gname, o, where) for o in prefix],
                [_operator_ref(spec, gname, o, where) for o in cycle],
            )
            rg = RepeatedGame(game, sched, _rat(entry.get("rho", "1/2"), where + ".rho"), cycle_cap=caps.cycle)
        except (ScheduleError, GameError) as exc:
            raise SpecError(where, str(exc)) from None
        spec.repeated[name] = (rg, prefix, cycle)
        spec.repeated_games[name] = gname
    for name, entry in _section(document, "bertrand").items():
        spec.bertrand[name] = _parse_bertrand(name, entry)
    return spec


def load_spec(path: str) -> GameSpec:
    with open(path) as fh:
        return parse_spec(fh.read())


def _poset_doc(p: FinitePoset) -> dict:
    return {"elements": list(p.labels), "covers": [[p.label(a), p.label(b)] for a, b in p.covers()]}


def to_document(spec: GameSpec) -> dict:
    """Serialize back to the input layout (covers form for posets)."""
    doc: dict[str, Any] = {
        "settings": {"chain_cap": spec.caps.chain, "profile_cap": spec.caps.profiles, "cycle_cap": spec.caps.cycle}
    }
    doc["posets"] = {n: _poset_doc(p) for n, p in spec.posets.items()}
    games = {}
    for n, g in spec.games.items():
        sp = g.profiles
        games[n] = {
            "players": spec.game_players[n],
            "payoffs": [
                {"profile": list(sp.labels_of(p)), "utilities": [str(t[k]) for t in g.tables]}
                for k, p in enumerate(sp.profiles())
            ],
        }
    doc["games"] = games
    ops = {}
    for n, (gname, op) in spec.operators.items():
        sp = op.space
        ops[n] = {
            "game": gname,
            "table": [
                {"from": list(sp.labels_of(sp.profile(k))), "to": list(sp.labels_of(sp.profile(t)))}
                for k, t in enumerate(op.table)
            ],
        }
    doc["operators"] = ops
    doc["maps"] = {
        n: {"poset": pname, "values": {m.domain.label(x): [m.domain.label(v) for v in m(x)] for x in range(m.domain.size)}}
        for n, (pname, m) in spec.maps.items()
    }
    doc["duals"] = {n: {"game": spec.dual_games[n], "operator": oname} for n, (_, oname) in spec.duals.items()}
    doc["repeated"] = {
        n: {"game": spec.repeated_games[n], "prefix": prefix, "cycle": cycle, "rho": str(rg.rho)}
        for n, (rg, prefix, cycle) in spec.repeated.items()
    }
    bert = {}
    for n, e in spec.bertrand.items():
        m = e.model
        entry = {
            "costs": [str(m.c1), str(m.c2)],
            "caps": [str(m.p_bar1), str(m.p_bar2)],
            "demand": [str(v) for v in m.demand_coeffs],
            "grid": {"step": str(e.step)} if e.step is not None else {
                "prices1": [str(v) for v in m.grid1], "prices2": [str(v) for v in m.grid2]},
            "transforms": {
                "prefix": [[str(t.alpha), str(t.beta)] for t in e.schedule.prefix],
                "cycle": [[str(t.alpha), str(t.beta)] for t in e.schedule.cycle],
            },
        }
        if e.rho is not None:
            entry["rho"] = str(e.rho)
        bert[n] = entry
    doc["bertrand"] = bert
    return doc
