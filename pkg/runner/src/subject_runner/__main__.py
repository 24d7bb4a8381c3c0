"""Line-delimited JSON protocol loop over stdin/stdout.

Requests: {"op": "init", ...}, {"op": "exec", "buf": "<base64>"},
{"op": "shutdown"}. One JSON reply per request on stdout; subject code
never sees the protocol stream (stdout is redirected around it, and the
reply writer keeps its own handle).
"""

from __future__ import annotations

import base64
import json
import os
import socket
import sys
import tempfile

from subject_runner.session import Session


def _install_guards() -> None:
    # best-effort jail: neutral working directory, no sockets in-process
    os.chdir(tempfile.mkdtemp(prefix="semdiff-runner-"))

    def _blocked(*_args, **_kwargs):
        raise RuntimeError("network access is disabled inside the runner")

    socket.socket = _blocked  # type: ignore[assignment,misc]


def main() -> int:
    _install_guards()
    protocol_out = sys.stdout
    session = Session()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            reply = {"ok": False, "err": "protocol: request is not JSON"}
            print(json.dumps(reply, separators=(",", ":")), file=protocol_out, flush=True)
            continue
        op = msg.get("op")
        if op == "init":
            reply = session.init(msg)
        elif op == "exec":
            try:
                buf = base64.b64decode(msg.get("buf", ""), validate=True)
            except (ValueError, TypeError):
                reply = {"ok": False, "err": "protocol: buf is not base64"}
            else:
                reply = session.execute(buf)
        elif op == "shutdown":
            return 0
        else:
            reply = {"ok": False, "err": f"protocol: unknown op {op!r}"}
        print(json.dumps(reply, separators=(",", ":")), file=protocol_out, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
