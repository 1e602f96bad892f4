// Pure projections from a gateway snapshot to what the console draws.
// No safety logic lives here: every verdict, boundary, and conflict is
// taken verbatim from the server, so rendering is a function of the
// latest snapshot and nothing else.

import type { ClearanceType, ConflictEntry, MobileEntry, Snapshot } from "./protocol.js";

export type ProbeLight = "green" | "red" | "none";
export type StripGroup = "arrival" | "departure" | "vehicle";

export interface StripWarning {
  conflictType: string;
  otherCallsign: string;
  segments: string[];
}

export interface StripViewModel {
  callsign: string;
  group: StripGroup;
  airborne: boolean;
  position: string | null;
  clearanceLabel: string;
  /** Callsign the clearance waits on; null once effective (or unconditional). */
  conditionCallsign: string | null;
  /** One banner per active conflict naming this mobile. */
  warnings: StripWarning[];
  /** Clearance the probe light is for, i.e. the next expected one. */
  probeClearance: ClearanceType | null;
  probeLight: ProbeLight;
}

export interface MapSegment {
  id: string;
  kind: "runway" | "taxiway" | "apron" | "stand";
  neighbors: string[];
  runways: string[];
  outline: number[][] | null;
  centerline: number[][] | null;
  /** Anchor for labels and route polylines, in either coordinate space. */
  anchor: [number, number];
  inConflict: boolean;
}

export interface MapRoute {
  callsign: string;
  airborne: boolean;
  position: string | null;
  /** Route prefix the mobile may execute now; drawn solid. */
  clearedPath: string[];
  /** Rest of the route; drawn dashed. */
  plannedPath: string[];
  highlighted: boolean;
}

export interface MapViewModel {
  airportName: string;
  /** False when any segment lacks a polygon; the map then draws the
   * schematic node-link picture from the anchors alone. */
  geometric: boolean;
  segments: MapSegment[];
  routes: MapRoute[];
}

export interface ConsoleViewModel {
  tick: number;
  strips: StripViewModel[];
  map: MapViewModel;
  conflicts: ConflictEntry[];
}

function groupOf(mobile: MobileEntry): StripGroup {
  if (mobile.kind === "vehicle") return "vehicle";
  if (mobile.airborne || mobile.clearance === "LND" || mobile.next_expected === "LND") {
    return "arrival";
  }
  return "departure";
}

const GROUP_ORDER: Record<StripGroup, number> = { arrival: 0, departure: 1, vehicle: 2 };

function warningsFor(mobile: MobileEntry, conflicts: ConflictEntry[]): StripWarning[] {
  const out: StripWarning[] = [];
  for (const c of conflicts) {
    if (!c.pair.includes(mobile.id)) continue;
    const other = c.pair.find((p) => p !== mobile.id) ?? mobile.id;
    out.push({ conflictType: c.type, otherCallsign: other, segments: [...c.segments] });
  }
  return out;
}

function stripOf(mobile: MobileEntry, conflicts: ConflictEntry[]): StripViewModel {
  // The light only ever decorates a real next clearance; when the
  // server expects nothing (or sent no probe) there is no light.
  let light: ProbeLight = "none";
  let probeClearance: ClearanceType | null = null;
  if (mobile.next_expected !== "NONE" && mobile.probe !== null) {
    probeClearance = mobile.probe.clearance;
    light = mobile.probe.verdict;
  }
  return {
    callsign: mobile.id,
    group: groupOf(mobile),
    airborne: mobile.airborne,
    position: mobile.position,
    clearanceLabel: mobile.clearance,
    conditionCallsign: mobile.condition,
    warnings: warningsFor(mobile, conflicts),
    probeClearance,
    probeLight: light,
  };
}

/** Deterministic positions for airports without drawn geometry: a
 * breadth-first grid over the adjacency, smallest ids first. */
function schematicAnchors(snapshot: Snapshot): Map<string, [number, number]> {
  const neighbors = new Map<string, string[]>();
  for (const seg of snapshot.airport.segments) {
    neighbors.set(seg.id, [...seg.neighbors].sort());
  }
  const anchors = new Map<string, [number, number]>();
  const depthCounts = new Map<number, number>();
  const pending = new Set([...neighbors.keys()].sort());
  while (pending.size > 0) {
    const root = pending.values().next().value as string;
    const queue: Array<[string, number]> = [[root, 0]];
    pending.delete(root);
    while (queue.length > 0) {
      const [id, depth] = queue.shift() as [string, number];
      const row = depthCounts.get(depth) ?? 0;
      depthCounts.set(depth, row + 1);
      anchors.set(id, [depth, row]);
      for (const n of neighbors.get(id) ?? []) {
        if (pending.delete(n)) queue.push([n, depth + 1]);
      }
    }
  }
  return anchors;
}

function centroid(points: number[][]): [number, number] {
  let x = 0;
  let y = 0;
  for (const p of points) {
    x += p[0] ?? 0;
    y += p[1] ?? 0;
  }
  const n = Math.max(points.length, 1);
  return [x / n, y / n];
}

function mapOf(snapshot: Snapshot): MapViewModel {
  const geometric = snapshot.airport.segments.every((s) => s.polygon !== null);
  const schematic = geometric ? null : schematicAnchors(snapshot);
  const conflictSegments = new Set(snapshot.conflicts.flatMap((c) => c.segments));
  const segments = snapshot.airport.segments.map((seg): MapSegment => {
    let anchor: [number, number];
    if (schematic !== null) {
      anchor = schematic.get(seg.id) ?? [0, 0];
    } else if (seg.centerline !== null && seg.centerline.length > 0) {
      anchor = centroid(seg.centerline);
    } else {
      anchor = centroid(seg.polygon ?? []);
    }
    return {
      id: seg.id,
      kind: seg.kind,
      neighbors: [...seg.neighbors],
      runways: [...seg.runways],
      outline: geometric ? seg.polygon : null,
      centerline: geometric ? seg.centerline : null,
      anchor,
      inConflict: conflictSegments.has(seg.id),
    };
  });
  const routes = snapshot.mobiles.map((m): MapRoute => {
    const split = m.cleared_boundary + 1;
    return {
      callsign: m.id,
      airborne: m.airborne,
      position: m.position,
      clearedPath: m.route.slice(0, Math.max(split, 0)),
      plannedPath: m.route.slice(Math.max(split, 0)),
      highlighted: m.in_conflict,
    };
  });
  return { airportName: snapshot.airport.name, geometric, segments, routes };
}

/** Project one snapshot to everything the console shows. Strips come
 * out arrivals first, then departures, then vehicles, by callsign
 * within each group. */
export function renderSnapshot(snapshot: Snapshot): ConsoleViewModel {
  const strips = snapshot.mobiles
    .map((m) => stripOf(m, snapshot.conflicts))
    .sort((a, b) => {
      const byGroup = GROUP_ORDER[a.group] - GROUP_ORDER[b.group];
      if (byGroup !== 0) return byGroup;
      return a.callsign < b.callsign ? -1 : a.callsign > b.callsign ? 1 : 0;
    });
  return {
    tick: snapshot.tick,
    strips,
    map: mapOf(snapshot),
    conflicts: snapshot.conflicts.map((c) => ({
      pair: [...c.pair],
      type: c.type,
      segments: [...c.segments],
    })),
  };
}
