/** Connection wrapper: one duplex WebSocket, messages applied in arrival
 * order. The socket constructor is injectable so tests can drive the same
 * code from Node. */

import { encode, parseServerMsg, type ClientMsg, type ServerMsg } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionHandlers {
  onMessage: (msg: ServerMsg) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

export class Connection {
  private socket: SocketLike | null = null;
  private closed = false;
  /** every message sent, for the protocol-log invariant and debugging */
  readonly sentLog: ClientMsg[] = [];

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
    private readonly factory: SocketFactory = (u) =>
      new WebSocket(u) as unknown as SocketLike,
    private readonly reconnectDelayMs: number | null = 1000,
  ) {}

  open(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => this.handlers.onOpen?.();
    socket.onmessage = (ev) => {
      const msg = parseServerMsg(String(ev.data));
      if (msg !== null) {
        this.handlers.onMessage(msg);
      }
    };
    socket.onclose = () => {
      this.socket = null;
      this.handlers.onClose?.();
      if (!this.closed && this.reconnectDelayMs !== null) {
        setTimeout(() => {
          if (!this.closed) {
            this.open();
          }
        }, this.reconnectDelayMs);
      }
    };
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  send(msg: ClientMsg): boolean {
    if (this.socket === null) {
      return false;
    }
    this.sentLog.push(msg);
    this.socket.send(encode(msg));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }
}
