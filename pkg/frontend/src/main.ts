import { ConsoleApp } from "./app.js";
import { GatewayClient, SocketLike } from "./client.js";

// ?server=host:port picks the gateway; default matches catc serve.
const params = new URLSearchParams(window.location.search);
const server = params.get("server") ?? `${window.location.hostname || "127.0.0.1"}:8700`;

const socket = new WebSocket(`ws://${server}/ws`) as unknown as SocketLike;
const client = new GatewayClient(socket);
const root = document.getElementById("console");
if (root === null) throw new Error("missing #console element");

const app = new ConsoleApp(root, client);
app.start().catch((err) => {
  root.textContent = `cannot reach gateway at ${server}: ${err}`;
});
