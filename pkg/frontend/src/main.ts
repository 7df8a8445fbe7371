import { ProofApp } from './app.js';
import { Connection, defaultServerUrl, SocketLike } from './connection.js';
import { buildPanels, wire } from './ui.js';

function boot(): void {
  const mount = document.getElementById('app');
  if (!mount) throw new Error('missing #app mount point');
  const params = new URLSearchParams(window.location.search);
  const url = params.get('server') ?? defaultServerUrl(window.location);

  let app: ProofApp;
  // a browser WebSocket satisfies SocketLike at runtime; the handler
  // parameter types are narrower, which structural typing rejects
  const sockets = (u: string) => new WebSocket(u) as unknown as SocketLike;
  const conn = new Connection(url, sockets, {
    onStatus: (status) => app?.setConnection(status),
    onSessionRestart: () => void app?.onSessionRestart(),
  });
  app = new ProofApp(conn);
  const panels = buildPanels(document, mount);
  wire(document, panels, app);
}

boot();
