"""Hosts one code pair and answers exec requests.

Function mode loads both sides into in-process namespaces (reloaded
every RELOAD_EVERY execs to curb module-state leakage) and calls the
entry point with arguments built by the binding program. Program mode
writes both sides to files and spawns each as a child per input with
the binding-built stdin text.

Subject exceptions become "ERROR:<class>" outcome tokens; binding
failures become "BINDERR:<class>" on both sides. Only protocol-level
problems may escape as exceptions.
"""

from __future__ import annotations

import contextlib
import copy
import io
import re
import subprocess
import sys
import tempfile
from pathlib import Path

from subject_runner.canon import UncanonicalizableValue, canonicalize, canonicalize_stdout
from subject_runner.provider import FuzzedDataProvider

RELOAD_EVERY = 200

_TRACEBACK_CLASS = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*?)(?::.*)?$")


class BindingContractError(Exception):
    """Binding ran but did not produce the required variable."""


class Session:
    def __init__(self):
        self.mode: str | None = None
        self.binding_code = None
        self.entry: str | None = None
        self.sources: tuple[str, str] | None = None
        self.funcs: list | None = None
        self.program_files: list[Path] | None = None
        self.workdir: tempfile.TemporaryDirectory | None = None
        self.exec_count = 0

    # --- init ---------------------------------------------------------------

    def init(self, msg: dict) -> dict:
        mode = msg.get("mode")
        if mode not in ("function", "program"):
            return {"ok": False, "err": f"init: unknown mode {mode!r}"}
        try:
            binding_code = compile(msg["binding"], "<binding>", "exec")
        except (SyntaxError, KeyError) as e:
            return {"ok": False, "err": f"binding:{e}"}
        code_a = msg.get("code_a")
        code_b = msg.get("code_b")
        if not isinstance(code_a, str) or not isinstance(code_b, str):
            return {"ok": False, "err": "init: code_a and code_b are required"}

        if mode == "function":
            entry = msg.get("entry")
            if not entry:
                return {"ok": False, "err": "init: function mode requires entry"}
            funcs = []
            for side, source in (("a", code_a), ("b", code_b)):
                try:
                    fn = self._load_function(source, entry)
                except Exception as e:  # noqa: BLE001 - reported, not raised
                    return {"ok": False, "err": f"compile:{side}:{e}"}
                funcs.append(fn)
            self.entry = entry
            self.funcs = funcs
            self.sources = (code_a, code_b)
        else:
            for side, source in (("a", code_a), ("b", code_b)):
                try:
                    compile(source, f"<program-{side}>", "exec")
                except SyntaxError as e:
                    return {"ok": False, "err": f"compile:{side}:{e}"}
            self.workdir = tempfile.TemporaryDirectory(prefix="semdiff-subject-")
            root = Path(self.workdir.name)
            self.program_files = []
            for side, source in (("a", code_a), ("b", code_b)):
                path = root / f"program_{side}.py"
                path.write_text(source, encoding="utf-8")
                self.program_files.append(path)

        self.mode = mode
        self.binding_code = binding_code
        self.exec_count = 0
        return {"ok": True}

    @staticmethod
    def _load_function(source: str, entry: str):
        namespace: dict = {}
        with contextlib.redirect_stdout(io.StringIO()):
            exec(compile(source, "<subject>", "exec"), namespace)  # noqa: S102
        fn = namespace.get(entry)
        if not callable(fn):
            raise NameError(f"entry {entry!r} not defined")
        return fn

    def _maybe_reload(self) -> None:
        if self.mode != "function" or self.sources is None:
            return
        if self.exec_count % RELOAD_EVERY == 0 and self.exec_count > 0:
            self.funcs = [
                self._load_function(source, self.entry) for source in self.sources
            ]

    # --- exec ---------------------------------------------------------------

    def execute(self, buf: bytes) -> dict:
        if self.mode is None:
            return {"ok": False, "err": "exec before init"}
        self._maybe_reload()
        self.exec_count += 1
        provider = FuzzedDataProvider(buf)
        namespace = {"fdp": provider}
        try:
            with contextlib.redirect_stdout(io.StringIO()):
                exec(self.binding_code, namespace)  # noqa: S102
        except Exception as e:  # noqa: BLE001
            token = f"BINDERR:{type(e).__name__}"
            return {"ok": True, "out_a": token, "out_b": token}

        if self.mode == "function":
            if "args" not in namespace:
                token = f"BINDERR:{BindingContractError.__name__}"
                return {"ok": True, "out_a": token, "out_b": token}
            args = namespace["args"]
            if not isinstance(args, (list, tuple)):
                token = f"BINDERR:{BindingContractError.__name__}"
                return {"ok": True, "out_a": token, "out_b": token}
            outs = [self._call_side(fn, args) for fn in self.funcs]
        else:
            stdin_text = namespace.get("stdin_text")
            if not isinstance(stdin_text, str):
                token = f"BINDERR:{BindingContractError.__name__}"
                return {"ok": True, "out_a": token, "out_b": token}
            outs = [self._run_program(path, stdin_text) for path in self.program_files]
        return {"ok": True, "out_a": outs[0], "out_b": outs[1]}

    @staticmethod
    def _call_side(fn, args) -> str:
        try:
            call_args = copy.deepcopy(list(args))
        except Exception as e:  # noqa: BLE001
            return f"BINDERR:{type(e).__name__}"
        try:
            with contextlib.redirect_stdout(io.StringIO()):
                value = fn(*call_args)
            return f"OUT:{canonicalize(value)}"
        except UncanonicalizableValue:
            return "ERROR:Canon"
        except Exception as e:  # noqa: BLE001
            return f"ERROR:{type(e).__name__}"

    @staticmethod
    def _run_program(path: Path, stdin_text: str) -> str:
        try:
            completed = subprocess.run(
                [sys.executable, str(path)],
                input=stdin_text,
                capture_output=True,
                text=True,
            )
        except OSError as e:
            return f"ERROR:{type(e).__name__}"
        if completed.returncode == 0:
            return f"OUT:{canonicalize_stdout(completed.stdout)}"
        for line in reversed(completed.stderr.splitlines()):
            line = line.strip()
            if not line or line.startswith(("File ", "Traceback", " ")):
                continue
            match = _TRACEBACK_CLASS.match(line)
            if match:
                return f"ERROR:{match.group(1).rsplit('.', 1)[-1]}"
            break
        return f"ERROR:Exit{completed.returncode}"
