import { Session } from "./session.js";
import { webSocketTransport } from "./transport.js";
import { Console } from "./ui.js";

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? `ws://${location.hostname || "localhost"}:8080`;

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const session = new Session(webSocketTransport(url), {
  onView: (view) => ui.renderView(view),
  onStatus: (status) => ui.setStatus(status === "retrying" ? "connection lost, retrying" : status),
  onNotice: (notice) => ui.addNotice(notice),
  onLatency: (ms) => ui.setLatency(ms),
});

const ui = new Console(root, {
  onTap: (ev) => session.sendTap(ev),
});

void session.connect();
