"""Minimal runner-protocol subject for harness tests.

Each side's "code" is a Python expression over an integer ``x`` decoded
from the first four buffer bytes (big-endian). Keeps the harness tests
independent of the real subject runner.
"""

import base64
import json
import sys
import time


def main() -> int:
    code_a = code_b = None
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        msg = json.loads(line)
        op = msg.get("op")
        if op == "init":
            try:
                code_a = compile(msg["code_a"], "<toy-a>", "eval")
                code_b = compile(msg["code_b"], "<toy-b>", "eval")
            except SyntaxError as e:
                print(json.dumps({"ok": False, "err": f"compile: {e}"}), flush=True)
                continue
            print(json.dumps({"ok": True}), flush=True)
        elif op == "exec":
            buf = base64.b64decode(msg["buf"])
            x = int.from_bytes(buf[:4], "big")
            outs = []
            for code in (code_a, code_b):
                try:
                    value = eval(code, {"x": x, "time": time})  # noqa: S307
                    outs.append(f"OUT:{value}")
                except Exception as e:  # noqa: BLE001
                    outs.append(f"ERROR:{type(e).__name__}")
            print(json.dumps({"ok": True, "out_a": outs[0], "out_b": outs[1]}), flush=True)
        elif op == "shutdown":
            return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
