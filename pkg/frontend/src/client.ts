// One gateway session. The client stamps every outgoing message with a
// correlation id, matches direct replies back to their callers, and
// hands broadcasts (event batches, snapshots) to the rendering loop in
// arrival order.

import {
  ClearanceType,
  ClientMessage,
  EventRecord,
  ProbeResultFrame,
  ProtocolError,
  Snapshot,
  parseServerFrame,
} from "./protocol.js";

/** Structural subset of both the browser WebSocket and the ws package's. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  readyState?: number;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

const SOCKET_OPEN = 1;

/** An error frame the gateway sent back for one of our messages. */
export class ServerError extends Error {}

interface Pending {
  resolve: (frame: never) => void;
  reject: (err: Error) => void;
}

// Successful mutations are answered by broadcast, not by ack, so the
// id -> message map for inline error reporting is trimmed by age.
const MUTATION_MEMORY = 64;

export class GatewayClient {
  private next = 1;
  private pending = new Map<number, Pending>();
  private mutations = new Map<number, ClientMessage>();
  private opened: Promise<void>;
  private snapshotHandlers: Array<(s: Snapshot) => void> = [];
  private eventHandlers: Array<(events: EventRecord[]) => void> = [];
  private errorHandlers: Array<(reason: string, cause: ClientMessage | null) => void> = [];
  private protocolErrorHandlers: Array<(err: ProtocolError) => void> = [];
  private closeHandlers: Array<() => void> = [];

  constructor(private socket: SocketLike) {
    this.opened = new Promise((resolve, reject) => {
      if (socket.readyState === SOCKET_OPEN) {
        resolve();
        return;
      }
      socket.onopen = () => resolve();
      socket.onerror = (ev) => reject(ev instanceof Error ? ev : new Error("socket error"));
    });
    socket.onmessage = (ev) => this.receive(String(ev.data));
    socket.onclose = () => {
      const gone = new ServerError("connection closed");
      for (const p of this.pending.values()) p.reject(gone);
      this.pending.clear();
      for (const h of this.closeHandlers) h();
    };
  }

  ready(): Promise<void> {
    return this.opened;
  }

  close(): void {
    this.socket.close();
  }

  onSnapshot(handler: (s: Snapshot) => void): void {
    this.snapshotHandlers.push(handler);
  }

  onEvents(handler: (events: EventRecord[]) => void): void {
    this.eventHandlers.push(handler);
  }

  /** Error frames that do not belong to an in-flight request; cause is
   * the mutation that triggered them when the id is still known. */
  onServerError(handler: (reason: string, cause: ClientMessage | null) => void): void {
    this.errorHandlers.push(handler);
  }

  /** Frames that do not match the documented schema. */
  onProtocolError(handler: (err: ProtocolError) => void): void {
    this.protocolErrorHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  private receive(raw: string): void {
    let frame;
    try {
      frame = parseServerFrame(raw);
    } catch (err) {
      if (err instanceof ProtocolError) {
        for (const h of this.protocolErrorHandlers) h(err);
        return;
      }
      throw err;
    }
    if (frame.type === "events") {
      for (const h of this.eventHandlers) h(frame.events);
      return;
    }
    const corr = typeof frame.id === "number" ? frame.id : null;
    const waiter = corr !== null ? this.pending.get(corr) : undefined;
    if (frame.type === "error") {
      if (waiter !== undefined && corr !== null) {
        this.pending.delete(corr);
        waiter.reject(new ServerError(frame.reason));
        return;
      }
      const cause = corr !== null ? this.mutations.get(corr) ?? null : null;
      if (corr !== null) this.mutations.delete(corr);
      for (const h of this.errorHandlers) h(frame.reason, cause);
      return;
    }
    if (waiter !== undefined && corr !== null) {
      this.pending.delete(corr);
      const payload = frame.type === "snapshot" ? frame.payload : frame;
      (waiter.resolve as (value: unknown) => void)(payload);
      return;
    }
    if (frame.type === "snapshot") {
      for (const h of this.snapshotHandlers) h(frame.payload);
    }
    // A probe_result nobody waits for can only follow a rejected
    // request; there is nothing left to deliver it to.
  }

  private send(message: ClientMessage & { id?: number }): void {
    this.socket.send(JSON.stringify(message));
  }

  private request<T>(message: ClientMessage & { id: number }): Promise<T> {
    return new Promise<T>((resolve, reject) => {
      this.pending.set(message.id, { resolve: resolve as Pending["resolve"], reject });
      this.send(message);
    });
  }

  /** Fire a state-changing message; the reply is the broadcast. Returns
   * the correlation id an eventual error frame will carry. */
  private mutate(message: ClientMessage): number {
    const id = this.next++;
    this.mutations.set(id, message);
    for (const key of this.mutations.keys()) {
      if (this.mutations.size <= MUTATION_MEMORY) break;
      this.mutations.delete(key);
    }
    this.send({ ...message, id });
    return id;
  }

  requestSnapshot(): Promise<Snapshot> {
    return this.request<Snapshot>({ type: "snapshot_request", id: this.next++ });
  }

  probe(
    mobile: string,
    clearance: ClearanceType,
    condition?: string | null,
  ): Promise<ProbeResultFrame> {
    return this.request<ProbeResultFrame>({
      type: "probe",
      id: this.next++,
      mobile,
      clearance,
      ...(condition === undefined ? {} : { condition }),
    });
  }

  step(n = 1): number {
    return this.mutate({ type: "step", n });
  }

  clear(mobile: string, clearance: ClearanceType, condition?: string | null): number {
    return this.mutate({
      type: "clear",
      mobile,
      clearance,
      ...(condition === undefined ? {} : { condition }),
    });
  }

  setRoute(mobile: string, route: string[]): number {
    return this.mutate({ type: "set_route", mobile, route });
  }

  advance(mobile: string, n = 1): number {
    return this.mutate({ type: "advance", mobile, n });
  }

  loadAirport(text: string): number {
    return this.mutate({ type: "load_airport", text });
  }

  loadScenario(text: string): number {
    return this.mutate({ type: "load_scenario", text });
  }
}
