"""Real-time transports: an in-process queue-pumped network for the daemon
service, and a length-prefixed TCP transport reusing the wire encoding.

The in-process network serializes all protocol handling under one lock so
the sequential per-process handlers never see concurrent calls; HTTP
threads and timers inject work through the same funnel.
"""

from __future__ import annotations

import socket
import struct
import threading
import time
from collections import deque
from typing import Callable, Optional

from .transport import Message, decode_message, encode_message


class LocalNet:
    """Synchronous in-process message fabric; also serves as the clock."""

    def __init__(self):
        self._lock = threading.RLock()
        self._queue: deque[Message] = deque()
        self._pumping = False
        self.nodes: dict[int, object] = {}
        self._timers: list[threading.Timer] = []
        self._closed = False

    def add_node(self, pid: int, node) -> None:
        self.nodes[pid] = node

    # Transport
    def send(self, msg: Message) -> None:
        with self._lock:
            self._queue.append(msg)
            self._pump()

    def _pump(self) -> None:
        if self._pumping:
            return
        self._pumping = True
        try:
            while self._queue:
                msg = self._queue.popleft()
                node = self.nodes.get(msg.recipient)
                if node is not None:
                    node.receive(msg)
        finally:
            self._pumping = False

    def run(self, fn: Callable[[], None]):
        """Execute fn inside the network's serialization domain and drain
        any messages it produced."""
        with self._lock:
            result = fn()
            self._pump()
            return result

    # Clock
    def now(self) -> float:
        return time.monotonic()

    def call_later(self, delay: float, fn: Callable[[], None]) -> None:
        timer = threading.Timer(delay, lambda: None if self._closed else self.run(fn))
        timer.daemon = True
        with self._lock:
            if self._closed:
                return
            self._timers.append(timer)
        timer.start()

    def close(self) -> None:
        with self._lock:
            self._closed = True
            timers = list(self._timers)
        for t in timers:
            t.cancel()


_LEN = struct.Struct(">I")


class TcpEndpoint:
    """One process reachable over TCP; frames are 4-byte big-endian length
    prefixes followed by the canonical JSON message encoding."""

    def __init__(self, handler, host: str = "127.0.0.1", port: int = 0):
        self.handler = handler
        self._server = socket.create_server((host, port))
        self.address = self._server.getsockname()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._serve, daemon=True)
        self._thread.start()

    def _serve(self) -> None:
        self._server.settimeout(0.2)
        while not self._stop.is_set():
            try:
                conn, _ = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            threading.Thread(target=self._drain, args=(conn,), daemon=True).start()

    def _drain(self, conn: socket.socket) -> None:
        with conn:
            while True:
                header = self._recv_exact(conn, _LEN.size)
                if header is None:
                    return
                (length,) = _LEN.unpack(header)
                body = self._recv_exact(conn, length)
                if body is None:
                    return
                try:
                    msg = decode_message(body)
                except ValueError:
                    continue
                self.handler(msg)

    @staticmethod
    def _recv_exact(conn: socket.socket, n: int) -> Optional[bytes]:
        buf = b""
        while len(buf) < n:
            try:
                chunk = conn.recv(n - len(buf))
            except OSError:
                return None
            if not chunk:
                return None
            buf += chunk
        return buf

    def close(self) -> None:
        self._stop.set()
        self._server.close()
        self._thread.join(timeout=1.0)


class TcpTransport:
    """Transport that routes by a pid -> (host, port) directory, keeping one
    connection per peer."""

    def __init__(self, directory: dict[int, tuple[str, int]]):
        self.directory = dict(directory)
        self._conns: dict[int, socket.socket] = {}
        self._lock = threading.Lock()

    def send(self, msg: Message) -> None:
        addr = self.directory.get(msg.recipient)
        if addr is None:
            return
        data = encode_message(msg)
        frame = _LEN.pack(len(data)) + data
        with self._lock:
            conn = self._conns.get(msg.recipient)
            try:
                if conn is None:
                    conn = socket.create_connection(tuple(addr), timeout=2.0)
                    self._conns[msg.recipient] = conn
                conn.sendall(frame)
            except OSError:
                self._conns.pop(msg.recipient, None)

    def close(self) -> None:
        with self._lock:
            for conn in self._conns.values():
                try:
                    conn.close()
                except OSError:
                    pass
            self._conns.clear()


class SerializedHandler:
    """Wraps a node so TCP delivery threads never run its handler
    concurrently."""

    def __init__(self, node):
        self.node = node
        self._lock = threading.Lock()

    def __call__(self, msg: Message) -> None:
        with self._lock:
            self.node.receive(msg)
