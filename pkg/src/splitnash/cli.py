"""Command-line front end.

    splitnash <command> --spec FILE [--game NAME] [--format text|machine] [--out FILE]

Exit status: 0 when every asserted claim verified, 1 when an asserted claim
failed (the report carries the witness), 2 on input errors.  Reports list
players from 1 and strategies by label; equilibrium sets are in ascending
profile index order.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import bertrand as bt
from .campaigns import CAMPAIGNS
from .common import CapExceeded, Caps, Check, fmt_rational
from .dual import ExistenceReport, check_theorem1, is_split_ne, split_ne_set
from .fixedpoint import verify_theorem_a
from .game import StaticGame, is_nash, is_order_positive, nash_set
from .poset import ProductPoset, is_chain_complete
from .repeated import (
    HorizonCheck,
    H,
    check_proposition1,
    check_theorem2,
    h,
    inf_split_ne_set,
    is_inf_split_ne,
)
from .specfile import GameSpec, SpecError, load_spec

COMMANDS = (
    "validate",
    "nash",
    "split",
    "infsplit",
    "discounted",
    "theoremA",
    "theorem1",
    "theorem2",
    "prop1",
    "bertrand-theorem3",
    "bertrand-corollary4",
    "bertrand-static",
    "campaign",
)

TIMING_FIELD = "elapsed_seconds"


class InputError(Exception):
    pass


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Check):
        return {"holds": obj.holds, "certificate": obj.certificate, "witness": jsonable(obj.witness)}
    if isinstance(obj, HorizonCheck):
        return {"holds": obj.holds, "partial": obj.partial, "horizon": obj.horizon, "witness": jsonable(obj.witness)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


class Report:
    def __init__(self, command: str, spec_path: str | None, caps: Caps):
        self.data: dict[str, Any] = {"command": command, "spec": spec_path, "caps": caps.as_dict(), "claims": []}
        self.failed = False

    def claim(self, name: str, holds: bool, witness: Any = None, asserted: bool = True) -> None:
        self.data["claims"].append({"claim": name, "asserted": asserted, "holds": bool(holds), "witness": jsonable(witness)})
        if asserted and not holds:
            self.failed = True

    def __setitem__(self, key: str, value: Any) -> None:
        self.data[key] = jsonable(value)

    def finish(self, elapsed: float) -> dict:
        self.data["status"] = self.data.get("status") or ("claim-failed" if self.failed else "ok")
        self.data[TIMING_FIELD] = round(elapsed, 6)
        return self.data


def _pick(section: dict, name: str | None, kind: str):
    if name is not None:
        if name not in section:
            raise InputError(f"no {kind} named {name!r}; available: {sorted(section)}")
        return name, section[name]
    if len(section) == 1:
        return next(iter(section.items()))
    if not section:
        raise InputError(f"the spec defines no {kind}")
    raise InputError(f"several {kind} entries {sorted(section)}; choose one with --game")


def _labels(space: ProductPoset, p: Sequence[int]) -> list[str]:
    return list(space.labels_of(p))


def _parse_profile(space: ProductPoset, text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != len(space.factors):
        raise InputError(f"profile {text!r} needs {len(space.factors)} comma-separated labels")
    try:
        return tuple(f.index(s) for f, s in zip(space.factors, parts))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _game_for(spec: GameSpec, name: str | None) -> tuple[str, StaticGame]:
    # any entry that owns a game may be addressed by name
    if name is not None and name not in spec.games:
        if name in spec.duals:
            return name, spec.duals[name][0].game
        if name in spec.repeated:
            return name, spec.repeated[name][0].game
    return _pick(spec.games, name, "game")


# witness rendering -------------------------------------------------------


def _stage_witness(space: ProductPoset, w) -> dict | None:
    if w is None:
        return None
    i, z, extra = w
    return {"player": i + 1, "deviation": _labels(space, z), "step": extra}


def _order_positive_witness(game: StaticGame, w) -> dict:
    i, lo, hi, z, t = w
    opp = game.profiles.omit(i)
    lab = game.posets[i].label
    return {
        "player": i + 1,
        "opponents_low": _labels(opp, lo),
        "opponents_high": _labels(opp, hi),
        "z": lab(z),
        "t": lab(t),
    }


def _existence(game: StaticGame, rep: ExistenceReport) -> dict:
    sp = game.profiles
    lab = lambda p: _labels(sp, p)  # noqa: E731

    def check(c: Check | None, render) -> dict | None:
        if c is None:
            return None
        return {"holds": c.holds, "certificate": c.certificate, "witness": render(c.witness) if c.witness is not None else None}

    def chain(w):
        # chain witnesses are element indices
        return [lab(sp.profile(x)) for x in w]

    def cond_c(w):
        if len(w) == 4:
            return {"schedule_part": w[0], "position": w[1], "x": lab(w[2]), "y": lab(w[3])}
        return {"x": lab(w[0]), "y": lab(w[1])}

    out = {
        "condition_a_order_positive": check(rep.condition_a, lambda w: _order_positive_witness(game, w)),
        "condition_b_values_inductive": check(rep.condition_b, lambda w: {"profile": lab(w[0]), "reason": w[1]}),
        "condition_c_increasing": check(rep.condition_c, cond_c),
        "condition_d_witness": check(rep.condition_d, lambda w: {"x_prime": lab(w[0]), "u_prime": lab(w[1])}),
        "conditions_hold": rep.conditions_hold,
        "equilibria": [lab(p) for p in rep.split_ne],
        "fixed_point_crosscheck": rep.fixed_point_crosscheck,
        "inductive": check(rep.inductive, chain),
        "above_witness": [lab(p) for p in rep.above_witness],
        "inductive_above_witness": check(rep.inductive_above_witness, chain),
        "maximal_above_witness": lab(rep.maximal_above_witness) if rep.maximal_above_witness else None,
        "monotone_growth": check(rep.monotone_growth, lambda w: {"x": lab(w[0]), "y": lab(w[1])}),
        "violations": rep.violations,
        "notes": rep.notes,
    }
    if hasattr(rep, "partial"):
        out["partial"] = rep.partial
    return out


def _prices(p) -> list[str]:
    return [fmt_rational(v) for v in p]


# commands ----------------------------------------------------------------


def cmd_validate(spec: GameSpec, args, rep: Report) -> None:
    rep["entries"] = {
        "posets": sorted(spec.posets),
        "games": sorted(spec.games),
        "operators": sorted(spec.operators),
        "maps": sorted(spec.maps),
        "duals": sorted(spec.duals),
        "repeated": sorted(spec.repeated),
        "bertrand": sorted(spec.bertrand),
    }
    rep["posets"] = {
        n: {"size": p.size, "covers": len(p.covers()), "chain_complete": is_chain_complete(p, spec.caps.chain)}
        for n, p in sorted(spec.posets.items())
    }
    rep["games"] = {n: {"players": g.n, "profiles": g.profiles.size} for n, g in sorted(spec.games.items())}


def cmd_nash(spec, args, rep):
    name, game = _game_for(spec, args.game)
    sp = game.profiles
    rep["target"] = name
    rep["nash_set"] = [_labels(sp, p) for p in nash_set(game, cap=spec.caps.profiles)]
    x = _parse_profile(sp, args.profile)
    if x is not None:
        res = is_nash(game, x)
        w = None if res else {"player": res.witness[0] + 1, "deviation": game.posets[res.witness[0]].label(res.witness[1])}
        rep["profile"] = _labels(sp, x)
        rep["is_nash"] = {"holds": res.holds, "witness": w}


def cmd_split(spec, args, rep):
    name, (dual, oname) = _pick(spec.duals, args.game, "dual game")
    sp = dual.game.profiles
    rep["target"] = name
    rep["operator"] = oname
    rep["split_ne_set"] = [_labels(sp, p) for p in split_ne_set(dual, cap=spec.caps.profiles)]
    rep["nash_set"] = [_labels(sp, p) for p in nash_set(dual.game, cap=spec.caps.profiles)]
    x = _parse_profile(sp, args.profile)
    if x is not None:
        res = is_split_ne(dual, x)
        rep["profile"] = _labels(sp, x)
        rep["is_split_ne"] = {"holds": res.holds, "witness": _stage_witness(sp, res.witness)}


def _schedule_info(rg) -> dict:
    t = rg.trajectory
    return {"k0": t.k0, "q": t.q, "exact": t.exact, "horizon": t.horizon, "rho": rg.rho}


def cmd_infsplit(spec, args, rep):
    name, (rg, prefix, cycle) = _pick(spec.repeated, args.game, "repeated game")
    sp = rg.game.profiles
    rep["target"] = name
    rep["schedule"] = dict(_schedule_info(rg), prefix=prefix, cycle=cycle)
    rep["inf_split_ne_set"] = [_labels(sp, p) for p in inf_split_ne_set(rg, cap=spec.caps.profiles)]
    rep["nash_set"] = [_labels(sp, p) for p in nash_set(rg.game, cap=spec.caps.profiles)]
    rep["partial"] = not rg.trajectory.exact
    x = _parse_profile(sp, args.profile)
    if x is not None:
        res = is_inf_split_ne(rg, x)
        rep["profile"] = _labels(sp, x)
        rep["is_inf_split_ne"] = {"holds": res.holds, "partial": res.partial, "witness": _stage_witness(sp, res.witness)}


def cmd_discounted(spec, args, rep):
    name, (rg, prefix, cycle) = _pick(spec.repeated, args.game, "repeated game")
    sp = rg.game.profiles
    rep["target"] = name
    rep["schedule"] = dict(_schedule_info(rg), prefix=prefix, cycle=cycle)
    x = _parse_profile(sp, args.profile)
    targets = [x] if x is not None else list(sp.profiles())
    if len(targets) > spec.caps.profiles:
        raise CapExceeded("profile space", len(targets), spec.caps.profiles)
    z = _parse_profile(sp, args.deviation)
    rows = []
    for p in targets:
        row = {"profile": _labels(sp, p), "h": [h(rg, i, p) for i in range(rg.game.n)]}
        if z is not None:
            row["deviation"] = _labels(sp, z)
            row["H"] = [H(rg, i, z, p) for i in range(rg.game.n)]
        rows.append(row)
    rep["values"] = rows


def cmd_theorem_a(spec, args, rep):
    name, (pname, gm) = _pick(spec.maps, args.game, "map")
    dom = gm.domain
    r = verify_theorem_a(gm, cap=spec.caps.chain)
    lab = dom.label

    def check(c):
        return None if c is None else {"holds": c.holds, "certificate": c.certificate, "witness": jsonable(_lab_any(dom, c.witness))}

    rep["target"] = name
    rep["poset"] = pname
    rep["result"] = {
        "a1_increasing_upward": check(r.a1),
        "a1_subset_growth": check(r.a1_subset),
        "a2_values_inductive": check(r.a2),
        "a3_witness": None if r.witness is None else {"y_star": lab(r.witness.y_star), "v_star": lab(r.witness.v_star)},
        "hypotheses_hold": r.hypotheses_hold,
        "fixed_points": [lab(x) for x in r.fixed_points],
        "fixed_points_inductive": check(r.fixed_points_inductive),
        "above_witness": [lab(x) for x in r.above_witness],
        "above_witness_inductive": check(r.above_witness_inductive),
        "ascent_endpoint": None if r.ascent_endpoint is None else lab(r.ascent_endpoint),
        "maximal_above_witness": None if r.maximal_above_witness is None else lab(r.maximal_above_witness),
        "violations": r.violations,
        "notes": r.notes,
    }
    if r.hypotheses_hold:
        rep.claim("fixed point conclusions hold", not r.violations, r.violations or None)


def _lab_any(dom, w):
    if isinstance(w, int) and not isinstance(w, bool):
        return dom.label(w)
    if isinstance(w, (list, tuple)):
        return [_lab_any(dom, v) for v in w]
    return w


def cmd_theorem1(spec, args, rep):
    name, (dual, oname) = _pick(spec.duals, args.game, "dual game")
    r = check_theorem1(dual, spec.caps)
    rep["target"] = name
    rep["operator"] = oname
    rep["result"] = _existence(dual.game, r)
    if r.conditions_hold:
        rep.claim("split equilibrium conclusions hold", not r.violations, r.violations or None)
    else:
        rep.claim("split equilibria coincide with fixed points", not r.violations, r.violations or None)


def cmd_theorem2(spec, args, rep):
    name, (rg, prefix, cycle) = _pick(spec.repeated, args.game, "repeated game")
    r = check_theorem2(rg, spec.caps)
    rep["target"] = name
    rep["schedule"] = dict(_schedule_info(rg), prefix=prefix, cycle=cycle)
    rep["result"] = _existence(rg.game, r)
    if r.conditions_hold:
        rep.claim("infinitely split equilibrium conclusions hold", not r.violations, r.violations or None)
    else:
        rep.claim("equilibria coincide with fixed points", not r.violations, r.violations or None)
    if r.partial:
        rep["status"] = "partial"


def cmd_prop1(spec, args, rep):
    name, (rg, prefix, cycle) = _pick(spec.repeated, args.game, "repeated game")
    sp = rg.game.profiles
    r = check_proposition1(rg, cap=spec.caps.profiles)
    rep["target"] = name
    rep["schedule"] = dict(_schedule_info(rg), prefix=prefix, cycle=cycle)
    rep["inf_split_ne_set"] = [_labels(sp, p) for p in r.inf_split_ne]
    rep["repeated_ne_set"] = [_labels(sp, p) for p in r.repeated_ne]
    rep["partial"] = r.partial
    rep.claim("infinitely split equilibria are repeated-game equilibria", r.holds, [_labels(sp, p) for p in r.missing] or None)


def _bertrand_entry(spec, args):
    name, entry = _pick(spec.bertrand, args.game, "Bertrand model")
    return name, entry


def _model_info(m: bt.BertrandModel) -> dict:
    return {
        "costs": _prices(m.costs),
        "caps": _prices((m.p_bar1, m.p_bar2)),
        "demand": [fmt_rational(Fraction(v)) for v in m.demand_coeffs],
        "lambda": fmt_rational(m.lam),
        "grid_sizes": [len(m.grid1), len(m.grid2)],
    }


def _period_witness(w: bt.PeriodWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "k": w.k,
        "firm": w.firm,
        "deviation": _prices(w.deviation),
        "deviation_price": fmt_rational(w.deviation_price),
        "path_point": _prices(w.path_point),
        "deviation_profit": fmt_rational(w.deviation_profit),
        "path_profit": fmt_rational(w.path_profit),
    }


def cmd_bertrand_theorem3(spec, args, rep):
    name, entry = _bertrand_entry(spec, args)
    r = bt.verify_theorem3(entry.model, entry.schedule, spec.caps)
    rep["target"] = name
    rep["model"] = _model_info(entry.model)
    rep["schedule"] = {
        "prefix": [[t.alpha, t.beta] for t in entry.schedule.prefix],
        "cycle": [[t.alpha, t.beta] for t in entry.schedule.cycle],
        "identity": r.identity_schedule,
    }
    w = r.member.witness
    rep["result"] = {
        "case": r.case,
        "candidate": _prices(r.candidate),
        "member": {"holds": r.member.holds, "partial": r.member.partial, "horizon": r.member.horizon, "witness": _period_witness(w)},
        "witness_replays": None if w is None else w.replay(entry.model),
        "on_grid": r.on_grid,
        "off_grid_reason": r.off_grid_reason,
        "inf_split_ne_set": None if r.members is None else [_prices(p) for p in r.members],
        "extra_equilibria": [{"prices": _prices(p), "grid_steps": list(d)} for p, d in r.extra_equilibria],
        "table_crosscheck": r.table_crosscheck,
        "candidate_path": [_prices(p) for p in r.candidate_path.points],
        "candidate_path_flags": [{"p1_nondecreasing": a, "p2_nonincreasing": b} for a, b in r.candidate_path.monotone_flags],
        "notes": r.notes,
    }
    for c in r.claims:
        rep.claim(c.name, c.holds, c.detail or None, asserted=c.asserted)
    if r.member.partial:
        rep["status"] = "partial"


def cmd_bertrand_corollary4(spec, args, rep):
    name, entry = _bertrand_entry(spec, args)
    rho = Fraction(args.rho) if args.rho else (entry.rho if entry.rho is not None else Fraction(1, 2))
    if not 0 < rho < 1:
        raise InputError("discount factor must lie in (0, 1)")
    h1, h2 = bt.corollary4(entry.model, rho)
    rep["target"] = name
    rep["model"] = _model_info(entry.model)
    rep["rho"] = rho
    rep["profile"] = _prices(entry.model.costs)
    rep["h"] = [h1, h2]
    rep.claim("discounted profits at the cost profile are zero", h1 == 0 and h2 == 0, None if h1 == h2 == 0 else [h1, h2])


def cmd_bertrand_static(spec, args, rep):
    name, entry = _bertrand_entry(spec, args)
    r = bt.verify_static(entry.model, spec.caps)
    rep["target"] = name
    rep["model"] = _model_info(entry.model)
    rep["nash_set"] = [_prices(p) for p in r["nash_set"]]
    rep["max_unilateral_deviation_profit"] = r["max_unilateral_deviation_profit"]
    rep["extra_equilibria"] = [{"prices": _prices(p), "grid_steps": list(d)} for p, d in r["extra_equilibria"]]
    game = bt.static_game(entry.model)
    # measured only; nothing downstream assumes it
    rep["order_positive"] = {
        f"firm{i + 1}": {"holds": c.holds, "witness": None if c else _order_positive_witness(game, (i,) + c.witness)}
        for i, c in ((i, is_order_positive(game, i, cap=spec.caps.profiles)) for i in range(2))
    }
    rep.claim("the cost profile is a Nash equilibrium of the grid game", r["cost_profile_is_nash"])


def cmd_campaign(spec, args, rep):
    names = [args.campaign] if args.campaign else list(CAMPAIGNS)
    results = []
    for n in names:
        fn = CAMPAIGNS[n]
        res = fn(seed=args.seed, attempts=args.count) if args.count else fn(seed=args.seed)
        results.append(res.as_dict())
        rep.claim(f"{n} campaign has no violations", res.ok, res.violations[:5] or None)
    rep["seed"] = args.seed
    rep["campaigns"] = results


HANDLERS = {
    "validate": cmd_validate,
    "nash": cmd_nash,
    "split": cmd_split,
    "infsplit": cmd_infsplit,
    "discounted": cmd_discounted,
    "theoremA": cmd_theorem_a,
    "theorem1": cmd_theorem1,
    "theorem2": cmd_theorem2,
    "prop1": cmd_prop1,
    "bertrand-theorem3": cmd_bertrand_theorem3,
    "bertrand-corollary4": cmd_bertrand_corollary4,
    "bertrand-static": cmd_bertrand_static,
    "campaign": cmd_campaign,
}


def run(command: str, spec: GameSpec | None, args: argparse.Namespace, spec_path: str | None = None) -> tuple[dict, int]:
    """Dispatch one command; returns the report and the exit status."""
    if command not in HANDLERS:
        raise InputError(f"unknown command {command!r}")
    caps = spec.caps if spec is not None else Caps()
    rep = Report(command, spec_path, caps)
    t0 = time.perf_counter()
    try:
        HANDLERS[command](spec, args, rep)
    except CapExceeded as exc:
        rep["status"] = "partial"
        rep["cap_exceeded"] = {"what": exc.what, "size": exc.size, "cap": exc.cap}
    data = rep.finish(time.perf_counter() - t0)
    return data, 1 if rep.failed else 0


def machine(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def text(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    for key in sorted(report):
        if key in ("command", "status", "claims", TIMING_FIELD):
            continue
        lines.append(f"  {key}: {json.dumps(report[key], sort_keys=True)}")
    for c in report["claims"]:
        tag = "PASS" if c["holds"] else ("FAIL" if c["asserted"] else "info")
        line = f"  [{tag}] {c['claim']}"
        if c["witness"] is not None:
            line += f"  witness={json.dumps(c['witness'], sort_keys=True)}"
        lines.append(line)
    lines.append(f"  {TIMING_FIELD}: {report[TIMING_FIELD]}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="splitnash", description="Split and infinitely split Nash equilibrium analyses.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--spec", help="input document (JSON)")
    ap.add_argument("--game", help="entry name within the relevant section")
    ap.add_argument("--out", help="also write the machine-readable report here")
    ap.add_argument("--format", choices=("text", "machine"), default="text")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized campaigns")
    ap.add_argument("--count", type=int, help="attempts per campaign")
    ap.add_argument("--campaign", choices=sorted(CAMPAIGNS), help="run a single campaign")
    ap.add_argument("--profile", help="comma-separated strategy labels")
    ap.add_argument("--deviation", help="deviation profile for discounted H values")
    ap.add_argument("--rho", help="discount factor override for bertrand-corollary4")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.rho is not None:
            from .common import parse_rational

            args.rho = str(parse_rational(args.rho))
        spec = None
        if args.command != "campaign":
            if not args.spec:
                raise InputError(f"{args.command} needs --spec")
            spec = load_spec(args.spec)
        report, status = run(args.command, spec, args, args.spec)
    except (InputError, SpecError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(machine(report))
    sys.stdout.write(machine(report) if args.format == "machine" else text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
