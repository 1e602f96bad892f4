// Message schema of the gateway WebSocket, mirrored field by field.
// The server is the authority on all safety verdicts; this module only
// types and validates what crosses the wire.

export type ClearanceType = "NONE" | "LUP" | "CRS" | "TOF" | "LND";
export type Verdict = "green" | "red";
export type MobileKind = "aircraft" | "vehicle";

export interface SegmentEntry {
  id: string;
  kind: "runway" | "taxiway" | "apron" | "stand";
  neighbors: string[];
  runways: string[];
  polygon: number[][] | null;
  centerline: number[][] | null;
}

export interface RunwayEntry {
  id: string;
  segments: string[];
  thresholds: string[];
  multiple_line_up_authorised: boolean;
}

export interface AirportEntry {
  name: string;
  segments: SegmentEntry[];
  runways: RunwayEntry[];
}

export interface ConflictEntry {
  pair: string[];
  type: string;
  segments: string[];
}

export interface MobileEntry {
  id: string;
  kind: MobileKind;
  airborne: boolean;
  position: string | null;
  route: string[];
  cleared_boundary: number;
  clearance: ClearanceType;
  condition: string | null;
  next_expected: ClearanceType;
  probe: { clearance: ClearanceType; verdict: Verdict } | null;
  in_conflict: boolean;
}

export interface Snapshot {
  tick: number;
  airport: AirportEntry;
  mobiles: MobileEntry[];
  conflicts: ConflictEntry[];
}

export interface EventRecord {
  t: number;
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface SnapshotFrame {
  type: "snapshot";
  id?: unknown;
  payload: Snapshot;
}

export interface EventsFrame {
  type: "events";
  events: EventRecord[];
}

export interface ProbeResultFrame {
  type: "probe_result";
  id: unknown;
  mobile: string;
  clearance: ClearanceType;
  verdict: Verdict;
  conflicts: ConflictEntry[];
}

export interface ErrorFrame {
  type: "error";
  id: unknown;
  reason: string;
}

export type ServerFrame = SnapshotFrame | EventsFrame | ProbeResultFrame | ErrorFrame;

export type ClientMessage =
  | { type: "snapshot_request"; id: number }
  | { type: "probe"; id: number; mobile: string; clearance: ClearanceType; condition?: string | null }
  | { type: "step"; n: number }
  | { type: "clear"; mobile: string; clearance: ClearanceType; condition?: string | null }
  | { type: "set_route"; mobile: string; route?: string[]; route_to?: string }
  | { type: "advance"; mobile: string; n?: number }
  | { type: "load_airport"; text: string }
  | { type: "load_scenario"; text: string };

/** A frame that does not match the schema. The app shows these as a
 * connection-error banner instead of rendering from garbage. */
export class ProtocolError extends Error {}

const CLEARANCES: ReadonlySet<string> = new Set(["NONE", "LUP", "CRS", "TOF", "LND"]);

function fail(where: string, what: string): never {
  throw new ProtocolError(`${where}: ${what}`);
}

function record(value: unknown, where: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(where, "expected an object");
  }
  return value as Record<string, unknown>;
}

function str(obj: Record<string, unknown>, key: string, where: string): string {
  const v = obj[key];
  if (typeof v !== "string") fail(where, `field ${key} must be a string`);
  return v;
}

function num(obj: Record<string, unknown>, key: string, where: string): number {
  const v = obj[key];
  if (typeof v !== "number") fail(where, `field ${key} must be a number`);
  return v;
}

function bool(obj: Record<string, unknown>, key: string, where: string): boolean {
  const v = obj[key];
  if (typeof v !== "boolean") fail(where, `field ${key} must be a boolean`);
  return v;
}

function strList(obj: Record<string, unknown>, key: string, where: string): string[] {
  const v = obj[key];
  if (!Array.isArray(v) || !v.every((s) => typeof s === "string")) {
    fail(where, `field ${key} must be a list of strings`);
  }
  return v as string[];
}

function clearance(obj: Record<string, unknown>, key: string, where: string): ClearanceType {
  const v = str(obj, key, where);
  if (!CLEARANCES.has(v)) fail(where, `unknown clearance ${v}`);
  return v as ClearanceType;
}

function points(value: unknown, where: string): number[][] | null {
  if (value === null || value === undefined) return null;
  if (
    !Array.isArray(value) ||
    !value.every((p) => Array.isArray(p) && p.length === 2 && p.every((c) => typeof c === "number"))
  ) {
    fail(where, "geometry must be a list of [x, y] pairs");
  }
  return value as number[][];
}

function parseConflict(value: unknown, where: string): ConflictEntry {
  const c = record(value, where);
  return {
    pair: strList(c, "pair", where),
    type: str(c, "type", where),
    segments: strList(c, "segments", where),
  };
}

function parseMobile(value: unknown, where: string): MobileEntry {
  const m = record(value, where);
  const probeRaw = m["probe"];
  let probe: MobileEntry["probe"] = null;
  if (probeRaw !== null && probeRaw !== undefined) {
    const p = record(probeRaw, `${where}.probe`);
    const verdict = str(p, "verdict", `${where}.probe`);
    if (verdict !== "green" && verdict !== "red") fail(where, `unknown verdict ${verdict}`);
    probe = { clearance: clearance(p, "clearance", `${where}.probe`), verdict };
  }
  const position = m["position"];
  if (position !== null && typeof position !== "string") {
    fail(where, "field position must be a string or null");
  }
  const condition = m["condition"];
  if (condition !== null && condition !== undefined && typeof condition !== "string") {
    fail(where, "field condition must be a string or null");
  }
  const kind = str(m, "kind", where);
  if (kind !== "aircraft" && kind !== "vehicle") fail(where, `unknown mobile kind ${kind}`);
  return {
    id: str(m, "id", where),
    kind,
    airborne: bool(m, "airborne", where),
    position: (position as string | null) ?? null,
    route: strList(m, "route", where),
    cleared_boundary: num(m, "cleared_boundary", where),
    clearance: clearance(m, "clearance", where),
    condition: (condition as string | null) ?? null,
    next_expected: clearance(m, "next_expected", where),
    probe,
    in_conflict: bool(m, "in_conflict", where),
  };
}

function parseSegment(value: unknown, where: string): SegmentEntry {
  const s = record(value, where);
  const kind = str(s, "kind", where);
  if (kind !== "runway" && kind !== "taxiway" && kind !== "apron" && kind !== "stand") {
    fail(where, `unknown segment kind ${kind}`);
  }
  return {
    id: str(s, "id", where),
    kind,
    neighbors: strList(s, "neighbors", where),
    runways: strList(s, "runways", where),
    polygon: points(s["polygon"], where),
    centerline: points(s["centerline"], where),
  };
}

function parseAirport(value: unknown): AirportEntry {
  const a = record(value, "airport");
  const segments = a["segments"];
  const runways = a["runways"];
  if (!Array.isArray(segments)) fail("airport", "field segments must be a list");
  if (!Array.isArray(runways)) fail("airport", "field runways must be a list");
  return {
    name: str(a, "name", "airport"),
    segments: segments.map((s, i) => parseSegment(s, `airport.segments[${i}]`)),
    runways: runways.map((r) => {
      const rw = record(r, "airport.runways");
      return {
        id: str(rw, "id", "runway"),
        segments: strList(rw, "segments", "runway"),
        thresholds: strList(rw, "thresholds", "runway"),
        multiple_line_up_authorised: bool(rw, "multiple_line_up_authorised", "runway"),
      };
    }),
  };
}

export function parseSnapshot(value: unknown): Snapshot {
  const s = record(value, "snapshot");
  const mobiles = s["mobiles"];
  const conflicts = s["conflicts"];
  if (!Array.isArray(mobiles)) fail("snapshot", "field mobiles must be a list");
  if (!Array.isArray(conflicts)) fail("snapshot", "field conflicts must be a list");
  return {
    tick: num(s, "tick", "snapshot"),
    airport: parseAirport(s["airport"]),
    mobiles: mobiles.map((m, i) => parseMobile(m, `snapshot.mobiles[${i}]`)),
    conflicts: conflicts.map((c, i) => parseConflict(c, `snapshot.conflicts[${i}]`)),
  };
}

/** Parse one incoming frame, throwing ProtocolError on anything that
 * is not valid JSON matching the documented schema. */
export function parseServerFrame(raw: string): ServerFrame {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    fail("frame", "not JSON");
  }
  const frame = record(value, "frame");
  const type = frame["type"];
  switch (type) {
    case "snapshot":
      return { type, id: frame["id"], payload: parseSnapshot(frame["payload"]) };
    case "events": {
      const events = frame["events"];
      if (!Array.isArray(events)) fail("events", "field events must be a list");
      return {
        type,
        events: events.map((e) => {
          const ev = record(e, "event");
          return {
            t: num(ev, "t", "event"),
            seq: num(ev, "seq", "event"),
            kind: str(ev, "kind", "event"),
            payload: record(ev["payload"], "event.payload"),
          };
        }),
      };
    }
    case "probe_result": {
      const verdict = str(frame, "verdict", "probe_result");
      if (verdict !== "green" && verdict !== "red") {
        fail("probe_result", `unknown verdict ${verdict}`);
      }
      const conflicts = frame["conflicts"];
      if (!Array.isArray(conflicts)) fail("probe_result", "field conflicts must be a list");
      return {
        type,
        id: frame["id"],
        mobile: str(frame, "mobile", "probe_result"),
        clearance: clearance(frame, "clearance", "probe_result"),
        verdict,
        conflicts: conflicts.map((c) => parseConflict(c, "probe_result.conflicts")),
      };
    }
    case "error":
      return { type, id: frame["id"], reason: str(frame, "reason", "error") };
    default:
      fail("frame", `unknown type ${JSON.stringify(type)}`);
  }
}
