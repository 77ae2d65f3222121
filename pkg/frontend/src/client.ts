/**
 * Thin protocol client. The socket is injected so tests can drive the same
 * code over `ws` in Node while the browser passes the native WebSocket.
 */

import {
  ClientFrame,
  ServerFrame,
  encodeClientFrame,
  parseServerFrame,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class GauiClient {
  private socket: SocketLike | null = null;
  private readonly url: string;
  private readonly makeSocket: SocketFactory;
  onFrame: (frame: ServerFrame) => void = () => {};
  onOpen: () => void = () => {};
  onClose: () => void = () => {};

  constructor(url: string, makeSocket: SocketFactory) {
    this.url = url;
    this.makeSocket = makeSocket;
  }

  connect(): void {
    const socket = this.makeSocket(this.url);
    socket.onopen = () => this.onOpen();
    socket.onclose = () => {
      this.socket = null;
      this.onClose();
    };
    socket.onmessage = (event) => {
      this.onFrame(parseServerFrame(String(event.data)));
    };
    this.socket = socket;
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  send(frame: ClientFrame): void {
    if (this.socket === null) return; // dropped on the floor while offline
    this.socket.send(encodeClientFrame(frame));
  }

  hello(interfaceType: string, initialDistanceCm: number): void {
    this.send({ type: "hello", interface: interfaceType, initial_distance_cm: initialDistanceCm });
  }

  gaze(t_ms: number, x: number, y: number): void {
    this.send({ type: "gaze", t_ms, x, y });
  }

  distance(t_ms: number, cm: number): void {
    this.send({ type: "distance", t_ms, cm });
  }

  esmAnswer(t_ms: number, answers: Record<string, string | number | boolean>): void {
    this.send({ type: "esm_answer", t_ms, answers });
  }

  reset(): void {
    this.send({ type: "reset" });
  }

  close(): void {
    this.socket?.close();
  }
}

export function browserSocketFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}
