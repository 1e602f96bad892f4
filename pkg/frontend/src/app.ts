// The console itself: strip board on the left, surface map on the
// right, one step button, one warnings toggle. Everything shown is a
// projection of the last snapshot; user actions only send messages.

import { GatewayClient } from "./client.js";
import { ClearanceType, Snapshot } from "./protocol.js";
import {
  ConsoleViewModel,
  MapViewModel,
  StripViewModel,
  renderSnapshot,
} from "./viewmodel.js";

const MENU_ENTRIES: ClearanceType[] = ["LUP", "CRS", "TOF", "LND", "NONE"];

const KIND_FILL: Record<string, string> = {
  runway: "#555b66",
  taxiway: "#3c4754",
  apron: "#35404c",
  stand: "#2f3a45",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ConsoleApp {
  private root: HTMLElement;
  private client: GatewayClient;
  private view: ConsoleViewModel | null = null;
  private warningsOn = true;
  private inlineErrors = new Map<string, string>();
  private banner: HTMLElement;
  private tickLabel: HTMLElement;
  private board: HTMLElement;
  private canvas: HTMLCanvasElement;
  private openMenu: HTMLElement | null = null;

  constructor(root: HTMLElement, client: GatewayClient) {
    this.root = root;
    this.client = client;

    const header = el("div", "header");
    this.tickLabel = el("span", "tick", "tick 0");
    const stepButton = el("button", "step", "step");
    stepButton.onclick = () => this.client.step(1);
    const warningsToggle = el("label", "toggle");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = true;
    box.onchange = () => {
      // Working-position filter: purely cosmetic, the server keeps
      // detecting either way.
      this.warningsOn = box.checked;
      this.redraw();
    };
    warningsToggle.append(box, document.createTextNode(" warnings"));
    header.append(this.tickLabel, stepButton, warningsToggle);

    this.banner = el("div", "banner hidden");
    this.board = el("div", "board");
    this.canvas = el("canvas", "map") as HTMLCanvasElement;
    this.canvas.width = 900;
    this.canvas.height = 520;

    const main = el("div", "main");
    main.append(this.board, this.canvas);
    root.append(header, this.banner, main);

    client.onSnapshot((snapshot) => this.accept(snapshot));
    client.onServerError((reason, cause) => {
      const mobile = cause !== null && "mobile" in cause ? String(cause.mobile) : null;
      if (mobile !== null) {
        this.inlineErrors.set(mobile, reason);
        this.redraw();
      } else {
        this.showBanner(`server: ${reason}`);
      }
    });
    client.onProtocolError((err) => this.showBanner(`bad frame from server: ${err.message}`));
    client.onClose(() => this.showBanner("connection lost"));
  }

  async start(): Promise<void> {
    await this.client.ready();
    this.accept(await this.client.requestSnapshot());
  }

  private accept(snapshot: Snapshot): void {
    this.view = renderSnapshot(snapshot);
    this.inlineErrors.clear();
    this.banner.classList.add("hidden");
    this.redraw();
  }

  private showBanner(text: string): void {
    this.banner.textContent = text;
    this.banner.classList.remove("hidden");
  }

  private redraw(): void {
    if (this.view === null) return;
    this.tickLabel.textContent = `tick ${this.view.tick}`;
    this.board.replaceChildren(...this.view.strips.map((s) => this.strip(s)));
    this.drawMap(this.view.map);
  }

  private strip(strip: StripViewModel): HTMLElement {
    const node = el("div", `strip ${strip.group}`);
    node.dataset.callsign = strip.callsign;

    const head = el("div", "strip-head");
    head.append(el("span", "callsign", strip.callsign));
    if (strip.airborne) head.append(el("span", "tag", "airborne"));
    else if (strip.position !== null) head.append(el("span", "tag", strip.position));
    node.append(head);

    const clearanceRow = el("div", "clearance-row");
    clearanceRow.append(el("span", "clearance", strip.clearanceLabel));
    if (strip.conditionCallsign !== null) {
      clearanceRow.append(el("span", "condition", `after ${strip.conditionCallsign}`));
    }
    const menuButton = el("button", "menu-button", "clear...");
    menuButton.onclick = () => this.toggleMenu(node, strip.callsign);
    clearanceRow.append(menuButton);
    if (strip.probeClearance !== null) {
      const light = el("span", `light ${strip.probeLight}`, strip.probeClearance);
      light.title = `probe: ${strip.probeClearance} would be ${strip.probeLight}`;
      clearanceRow.append(light);
    }
    node.append(clearanceRow);

    if (this.warningsOn) {
      for (const w of strip.warnings) {
        node.append(
          el("div", "warning", `${w.conflictType} with ${w.otherCallsign} on ${w.segments.join(" ")}`),
        );
      }
    }
    const inline = this.inlineErrors.get(strip.callsign);
    if (inline !== undefined) node.append(el("div", "inline-error", inline));
    return node;
  }

  /** Clearance menu with on-demand probes: every entry gets probed when
   * the menu opens and coloured from the reply. A red entry still
   * sends on click after a confirm; the system advises, the
   * controller decides. */
  private toggleMenu(stripNode: HTMLElement, callsign: string): void {
    if (this.openMenu !== null) {
      const sameStrip = this.openMenu.parentElement === stripNode;
      this.openMenu.remove();
      this.openMenu = null;
      if (sameStrip) return;
    }
    const menu = el("div", "menu");
    for (const ctype of MENU_ENTRIES) {
      const entry = el("button", "entry", ctype);
      entry.dataset.clearance = ctype;
      if (ctype !== "NONE") {
        this.client
          .probe(callsign, ctype)
          .then((result) => entry.classList.add(result.verdict))
          .catch(() => entry.classList.add("invalid"));
      }
      entry.onclick = () => {
        const red = entry.classList.contains("red");
        if (red && !window.confirm(`${ctype} for ${callsign} would conflict. Issue anyway?`)) {
          return;
        }
        this.client.clear(callsign, ctype);
        menu.remove();
        this.openMenu = null;
      };
      menu.append(entry);
    }
    stripNode.append(menu);
    this.openMenu = menu;
  }

  private drawMap(map: MapViewModel): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10151b";
    ctx.fillRect(0, 0, width, height);

    const anchors = new Map(map.segments.map((s) => [s.id, s.anchor]));
    const fit = fitTransform(map, width, height);

    if (map.geometric) {
      for (const seg of map.segments) {
        if (seg.outline === null) continue;
        ctx.beginPath();
        for (const [i, p] of seg.outline.entries()) {
          const [x, y] = fit(p[0] ?? 0, p[1] ?? 0);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        }
        ctx.closePath();
        ctx.fillStyle = seg.inConflict ? "#7a2f2f" : KIND_FILL[seg.kind] ?? "#3c4754";
        ctx.fill();
        ctx.strokeStyle = "#1b222b";
        ctx.stroke();
        if (seg.centerline !== null) {
          ctx.beginPath();
          for (const [i, p] of seg.centerline.entries()) {
            const [x, y] = fit(p[0] ?? 0, p[1] ?? 0);
            if (i === 0) ctx.moveTo(x, y);
            else ctx.lineTo(x, y);
          }
          ctx.strokeStyle = "#8d97a5";
          ctx.setLineDash([4, 4]);
          ctx.stroke();
          ctx.setLineDash([]);
        }
      }
    } else {
      // No drawn geometry: node-link picture over the grid anchors.
      ctx.strokeStyle = "#2c3640";
      for (const seg of map.segments) {
        const [ax, ay] = fit(...(anchors.get(seg.id) as [number, number]));
        for (const n of seg.neighbors) {
          if (n < seg.id) continue;
          const to = anchors.get(n);
          if (to === undefined) continue;
          const [bx, by] = fit(...to);
          ctx.beginPath();
          ctx.moveTo(ax, ay);
          ctx.lineTo(bx, by);
          ctx.stroke();
        }
      }
      for (const seg of map.segments) {
        const [x, y] = fit(...(anchors.get(seg.id) as [number, number]));
        ctx.beginPath();
        ctx.arc(x, y, 9, 0, Math.PI * 2);
        ctx.fillStyle = seg.inConflict ? "#7a2f2f" : KIND_FILL[seg.kind] ?? "#3c4754";
        ctx.fill();
      }
    }

    for (const seg of map.segments) {
      const [x, y] = fit(...(anchors.get(seg.id) as [number, number]));
      ctx.fillStyle = "#aab4c0";
      ctx.font = "10px sans-serif";
      ctx.fillText(seg.id, x + 4, y - 4);
    }

    for (const route of map.routes) {
      const color = route.highlighted ? "#ff5c5c" : "#69c06f";
      this.polyline(ctx, anchors, fit, route.clearedPath, color, []);
      const tail =
        route.clearedPath.length > 0
          ? [route.clearedPath[route.clearedPath.length - 1] as string, ...route.plannedPath]
          : route.plannedPath;
      this.polyline(ctx, anchors, fit, tail, color, [6, 6]);
      if (route.position !== null) {
        const at = anchors.get(route.position);
        if (at !== undefined) {
          const [x, y] = fit(...at);
          ctx.beginPath();
          ctx.arc(x, y, 5, 0, Math.PI * 2);
          ctx.fillStyle = color;
          ctx.fill();
          ctx.fillStyle = "#e8edf2";
          ctx.font = "bold 11px sans-serif";
          ctx.fillText(route.callsign + (route.airborne ? " ^" : ""), x + 7, y + 12);
        }
      }
    }
  }

  private polyline(
    ctx: CanvasRenderingContext2D,
    anchors: Map<string, [number, number]>,
    fit: (x: number, y: number) => [number, number],
    ids: string[],
    color: string,
    dash: number[],
  ): void {
    if (ids.length < 2) return;
    ctx.beginPath();
    for (const [i, id] of ids.entries()) {
      const at = anchors.get(id);
      if (at === undefined) return;
      const [x, y] = fit(...at);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.setLineDash(dash);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.lineWidth = 1;
  }
}

/** Scale model coordinates (polygon space or schematic grid) into the
 * canvas with a uniform margin. */
function fitTransform(
  map: MapViewModel,
  width: number,
  height: number,
): (x: number, y: number) => [number, number] {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  const take = (x: number, y: number) => {
    minX = Math.min(minX, x);
    minY = Math.min(minY, y);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
  };
  for (const seg of map.segments) {
    if (map.geometric && seg.outline !== null) {
      for (const p of seg.outline) take(p[0] ?? 0, p[1] ?? 0);
    } else {
      take(seg.anchor[0], seg.anchor[1]);
    }
  }
  if (!Number.isFinite(minX)) {
    minX = 0;
    minY = 0;
    maxX = 1;
    maxY = 1;
  }
  const margin = 30;
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  return (x, y) => [
    margin + (x - minX) * scale,
    height - margin - (y - minY) * scale,
  ];
}
