/** Transport abstraction: the session logic is identical over a browser
 * WebSocket (via the bridge) and a raw TCP socket (tests, Node tools). */

export interface Transport {
  send(line: string): void;
  close(): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
}

export type TransportFactory = () => Promise<Transport>;

/** Browser transport: one text frame per protocol line over a WebSocket
 * bridge (see bridge.mjs). */
export function webSocketTransport(url: string): TransportFactory {
  return () =>
    new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      let lineCb: (line: string) => void = () => {};
      let closeCb: () => void = () => {};
      let opened = false;
      let buffer = "";
      ws.onopen = () => {
        opened = true;
        resolve({
          send: (line) => ws.send(line),
          close: () => ws.close(),
          onLine: (cb) => (lineCb = cb),
          onClose: (cb) => (closeCb = cb),
        });
      };
      ws.onmessage = (ev) => {
        buffer += String(ev.data);
        let idx;
        while ((idx = buffer.indexOf("\n")) >= 0) {
          const line = buffer.slice(0, idx).trim();
          buffer = buffer.slice(idx + 1);
          if (line) lineCb(line);
        }
        // bridges may also deliver one frame per line without newlines
        if (buffer.trim() && !buffer.includes("\n") && String(ev.data).endsWith("}")) {
          const line = buffer.trim();
          buffer = "";
          lineCb(line);
        }
      };
      ws.onerror = () => {
        if (!opened) reject(new Error(`connection to ${url} refused`));
      };
      ws.onclose = () => {
        if (!opened) reject(new Error(`connection to ${url} refused`));
        else closeCb();
      };
    });
}
