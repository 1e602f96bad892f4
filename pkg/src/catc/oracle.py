"""Brute-force reference for conflict detection.

Implements the pairwise conflict definitions directly from positions,
runway entries, runway indices, and directions of travel, one rule per
clearance-type pair. It deliberately shares no logic with the
route-based engine: routes are only consulted for entry segments, the
take-off/landing/crossing runs, exits, and directions, so the two
implementations can check each other.

The definitions assume mobiles that have not already moved past each
other and routes of the usual operational shape; oracle_domain_violations
spells out that domain and oracle_detect refuses worlds outside it. See
docs/oracle-domain.md for why the domain is restricted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .airport import AirportModel, runway_index
from .clearances import ClearanceType, Mobile, is_effective
from .detection import ConflictType, World, classify
from .errors import OracleDomainError

_S = ClearanceType


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _is_runway(model: AirportModel, seg: str) -> bool:
    return model.segment(seg).kind.value == "runway"


def _runways_of(model: AirportModel, seg: str) -> frozenset[str]:
    return model.segment(seg).runways


def _trailing_run(model: AirportModel, segs: tuple[str, ...]) -> tuple[str, ...]:
    """Take-off run: maximal one-runway suffix of runway segments."""
    if not _is_runway(model, segs[-1]):
        return ()
    common = _runways_of(model, segs[-1])
    cut = len(segs) - 1
    for i in range(len(segs) - 2, -1, -1):
        if not _is_runway(model, segs[i]):
            break
        narrowed = common & _runways_of(model, segs[i])
        if not narrowed:
            break
        common = narrowed
        cut = i
    return segs[cut:]


def _leading_run(model: AirportModel, segs: tuple[str, ...]) -> tuple[str, ...]:
    """Landing roll: maximal prefix of runway segments."""
    n = 0
    while n < len(segs) and _is_runway(model, segs[n]):
        n += 1
    return segs[:n]


def _first_run(model: AirportModel, segs: tuple[str, ...]) -> tuple[str, ...]:
    """The first contiguous block of runway segments along the route."""
    start = next((i for i, s in enumerate(segs) if _is_runway(model, s)), None)
    if start is None:
        return ()
    end = start
    while end + 1 < len(segs) and _is_runway(model, segs[end + 1]):
        end += 1
    return segs[start : end + 1]


def _common_ids(model: AirportModel, run: tuple[str, ...]) -> frozenset[str]:
    common = _runways_of(model, run[0])
    for s in run[1:]:
        common = common & _runways_of(model, s)
    return common


def _dir_on(model: AirportModel, rwy: str, run: tuple[str, ...]) -> int:
    """Direction of travel along a runway: +1, -1, or 0 if undeterminable."""
    idxs = [runway_index(model, rwy, s) for s in run if rwy in _runways_of(model, s)]
    for p, q in zip(idxs, idxs[1:]):
        return _sign(q - p)
    return 0


@dataclass
class _Use:
    """How one effective clearance uses a runway, in reference-rule terms."""

    mobile: Mobile
    ctype: ClearanceType
    run: tuple[str, ...]
    run_ids: frozenset[str] = frozenset()
    entry: str | None = None
    entered_from: str | None = None


def _use_of(model: AirportModel, m: Mobile) -> _Use:
    segs = m.route.segments
    ctype = m.clearance.ctype
    if ctype in (_S.LINE_UP, _S.TAKE_OFF):
        run = _trailing_run(model, segs)
        run_ids = _common_ids(model, run) if run else frozenset()
    elif ctype is _S.LAND:
        run = _leading_run(model, segs)
        run_ids = _common_ids(model, run) if run else frozenset()
    else:
        run = _first_run(model, segs)
        run_ids = frozenset().union(*(_runways_of(model, s) for s in run)) if run else frozenset()
    entry = next((s for s in segs if _is_runway(model, s)), None)
    entered_from = None
    if entry is not None:
        i = segs.index(entry)
        entered_from = segs[i - 1] if i > 0 else None
    return _Use(m, ctype, run, run_ids, entry, entered_from)


def _ahead(model: AirportModel, rwy: str, seg: str, pos_idx: int, direction: int) -> bool:
    """Whether seg lies at or in front of pos in the direction of travel."""
    d = runway_index(model, rwy, seg) - pos_idx
    return d == 0 if direction == 0 else d * direction >= 0


def _tof_covers(model: AirportModel, tof: _Use, seg: str) -> bool:
    """The segment is on the take-off runway, at or beyond the position."""
    for rwy in sorted(tof.run_ids):
        if rwy not in _runways_of(model, seg):
            continue
        pos = runway_index(model, rwy, tof.run[0])
        if _ahead(model, rwy, seg, pos, _dir_on(model, rwy, tof.run)):
            return True
    return False


def _lnd_covers(model: AirportModel, lnd: _Use, seg: str) -> bool:
    """In front of the lander and not past where it will vacate."""
    for rwy in sorted(lnd.run_ids):
        if rwy not in _runways_of(model, seg):
            continue
        pos = runway_index(model, rwy, lnd.run[0])
        vacate = runway_index(model, rwy, lnd.run[-1])
        direction = _dir_on(model, rwy, lnd.run)
        if _ahead(model, rwy, seg, pos, direction) and _ahead(
            model, rwy, seg, vacate, -direction
        ):
            return True
    return False


def _multiple_lineup_ok(model: AirportModel, x: _Use, y: _Use) -> bool:
    """Multiple line-up authorised on x's runway and both face the same way."""
    if not x.run_ids:
        return False
    for rwy in sorted(x.run_ids):
        if not model.runway(rwy).multiple_line_up_authorised:
            return False
        dx = _dir_on(model, rwy, x.run)
        if dx == 0 or dx != _dir_on(model, rwy, y.run):
            return False
    return True


def _pred_in_run(use: _Use, seg: str) -> str | None:
    i = use.run.index(seg)
    return use.run[i - 1] if i > 0 else use.entered_from


def _lup_lup(model: AirportModel, a: _Use, b: _Use) -> bool:
    # Same line-up point reached from different (or unknown) sides.
    if a.entry == b.entry and not (
        a.entered_from is not None and a.entered_from == b.entered_from
    ):
        return True
    # One aircraft lined up inside the other's take-off run.
    if b.entry in a.run and not _multiple_lineup_ok(model, a, b):
        return True
    if a.entry in b.run and not _multiple_lineup_ok(model, b, a):
        return True
    return False


def _lup_crs(model: AirportModel, lup: _Use, crs: _Use) -> bool:
    if lup.entry not in crs.run:
        return False
    pred = _pred_in_run(crs, lup.entry)
    return not (lup.entered_from is not None and lup.entered_from == pred)


def _crs_crs(model: AirportModel, a: _Use, b: _Use) -> bool:
    for seg in a.run:
        if seg not in b.run:
            continue
        pa, pb = _pred_in_run(a, seg), _pred_in_run(b, seg)
        if pa is None or pb is None or pa != pb:
            return True
    return False


def _lup_tof(model: AirportModel, lup: _Use, tof: _Use) -> bool:
    return _tof_covers(model, tof, lup.entry)


def _lup_lnd(model: AirportModel, lup: _Use, lnd: _Use) -> bool:
    return _lnd_covers(model, lnd, lup.entry)


def _crs_tof(model: AirportModel, crs: _Use, tof: _Use) -> bool:
    return any(_tof_covers(model, tof, s) for s in crs.run)


def _crs_lnd(model: AirportModel, crs: _Use, lnd: _Use) -> bool:
    return any(_lnd_covers(model, lnd, s) for s in crs.run)


def _fast_fast(model: AirportModel, a: _Use, b: _Use) -> bool:
    # Same runway: always a conflict (the domain rules out "already
    # past each other"). Intersecting runways: a conflict while both
    # runs still converge on a shared segment.
    if a.run_ids & b.run_ids:
        return True
    return bool(set(a.run) & set(b.run))


_RULES = {
    (_S.LINE_UP, _S.LINE_UP): _lup_lup,
    (_S.LINE_UP, _S.CROSS): _lup_crs,
    (_S.LINE_UP, _S.TAKE_OFF): _lup_tof,
    (_S.LINE_UP, _S.LAND): _lup_lnd,
    (_S.CROSS, _S.CROSS): _crs_crs,
    (_S.CROSS, _S.TAKE_OFF): _crs_tof,
    (_S.CROSS, _S.LAND): _crs_lnd,
    (_S.TAKE_OFF, _S.TAKE_OFF): _fast_fast,
    (_S.TAKE_OFF, _S.LAND): _fast_fast,
    (_S.LAND, _S.LAND): _fast_fast,
}

_ORDER = {_S.LINE_UP: 0, _S.CROSS: 1, _S.TAKE_OFF: 2, _S.LAND: 3}


def oracle_domain_violations(world: World) -> list[str]:
    """Why this world falls outside the reference definitions' domain.

    Out of domain are: crossing routes that never leave a runway,
    departure routes that cross a runway before the take-off run or
    stop short of the runway end, landing rolls that leave the landing
    runway, and same-runway take-off/landing pairs that are already
    past each other (where a clearance pair stops being a conflict the
    written definitions still call one).
    """
    model = world.model
    v: list[str] = []
    uses: dict[str, _Use] = {}
    for mid in sorted(world.mobiles):
        m = world.mobiles[mid]
        if not is_effective(m.clearance):
            continue
        use = _use_of(model, m)
        uses[mid] = use
        segs = m.route.segments
        if use.ctype in (_S.LINE_UP, _S.TAKE_OFF):
            if not use.run:
                v.append(f"mobile {mid}: departure route does not end on a runway")
                continue
            before = segs[: len(segs) - len(use.run)]
            if any(_is_runway(model, s) for s in before):
                v.append(f"mobile {mid}: route crosses a runway before the take-off run")
            for rwy in sorted(use.run_ids):
                end = runway_index(model, rwy, use.run[-1])
                if end not in (0, len(model.runway(rwy).segments) - 1):
                    v.append(f"mobile {mid}: take-off run stops short of a runway end")
        elif use.ctype is _S.LAND:
            if not use.run:
                v.append(f"mobile {mid}: landing route does not start on a runway")
            elif not use.run_ids:
                v.append(f"mobile {mid}: landing roll leaves its runway")
        elif use.ctype is _S.CROSS:
            if not use.run or len(use.run) == len(segs) - segs.index(use.run[0]):
                v.append(f"mobile {mid}: crossing route never leaves the runway")
    fast = {
        mid: u for mid, u in uses.items() if u.ctype in (_S.TAKE_OFF, _S.LAND) and u.run
    }
    ids = sorted(fast)
    for i, a_id in enumerate(ids):
        for b_id in ids[i + 1 :]:
            a, b = fast[a_id], fast[b_id]
            if a.run_ids & b.run_ids and not (set(a.run) & set(b.run)):
                v.append(f"mobiles {a_id}/{b_id}: already past each other on their runway")
    return v


def oracle_detect(world: World) -> set[tuple[tuple[str, str], ConflictType]]:
    """All conflicting pairs, straight from the pairwise definitions.

    Returns {((id, id) sorted, ConflictType)}. Raises OracleDomainError
    when the world is outside the domain the definitions cover.
    """
    violations = oracle_domain_violations(world)
    if violations:
        raise OracleDomainError(violations)
    model = world.model
    uses = {
        mid: _use_of(model, m)
        for mid, m in world.mobiles.items()
        if is_effective(m.clearance)
    }
    out: set[tuple[tuple[str, str], ConflictType]] = set()
    ids = sorted(uses)
    for i, a_id in enumerate(ids):
        for b_id in ids[i + 1 :]:
            a, b = uses[a_id], uses[b_id]
            if _ORDER[a.ctype] <= _ORDER[b.ctype]:
                first, second = a, b
            else:
                first, second = b, a
            rule = _RULES[(first.ctype, second.ctype)]
            if rule(model, first, second):
                out.add(((a_id, b_id), classify(a.ctype, b.ctype)))
    return out
