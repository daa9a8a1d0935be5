"""Run recipes: flat INI files with one section per concern.

Grammar (configparser): sections ``[run]``, ``[geometry]``, ``[model]``,
``[sweep]`` and ``[output]``; each key holds a scalar. Values are parsed as
int, then float, then bool (true/false), else kept as strings. Lists are
comma separated. Integer ranges use ``start:stop[:step]`` with an
inclusive stop.
"""
from __future__ import annotations

import configparser
import hashlib
import io
import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import RecipeError

__all__ = ["RunRecipe", "parse_value", "parse_int_list", "parse_float_list", "load_recipe", "load_preset",
           "list_presets", "COMMANDS"]

COMMANDS = ("butterfly", "confinement", "portrait", "harper", "fractal")
SECTIONS = ("run", "geometry", "model", "sweep", "output")
FAMILIES = ("dimer-chain", "trimer-chain", "hedgehog")


def parse_value(text: str):
    s = text.strip()
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    if s.lower() in ("true", "false"):
        return s.lower() == "true"
    return s


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(_fmt_value(x) for x in v)
    return str(v)


def parse_int_list(v) -> list[int]:
    """'0:200' (inclusive), '0:200:4', '0, 1, 2' or a bare int."""
    if isinstance(v, int):
        return [v]
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    s = str(v).strip()
    if not s:
        return []
    if ":" in s:
        parts = [int(x) for x in s.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + (1 if step > 0 else -1), step))
    return [int(x) for x in s.split(",") if x.strip()]


def parse_float_list(v) -> list[float]:
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(x) for x in str(v).split(",") if x.strip()]


@dataclass
class RunRecipe:
    sections: dict = field(default_factory=dict)
    name: str = ""

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def section(self, name) -> dict:
        return dict(self.sections.get(name, {}))

    @property
    def command(self) -> str:
        return self.get("run", "command", "")

    @property
    def family(self) -> str:
        return self.get("run", "family", "")

    @property
    def seed(self) -> int:
        return int(self.get("run", "seed", 0))

    def formats(self) -> list[str]:
        f = self.get("output", "formats", "csv, json")
        return [x.strip() for x in str(f).split(",") if x.strip()]

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        for sec in SECTIONS:
            if sec in self.sections:
                cp[sec] = {k: _fmt_value(v) for k, v in self.sections[sec].items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, name: str = "") -> "RunRecipe":
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as e:
            raise RecipeError([f"parse error: {e}"]) from None
        unknown = [s for s in cp.sections() if s not in SECTIONS]
        if unknown:
            raise RecipeError([f"unknown section [{s}]" for s in unknown])
        secs = {s: {k: parse_value(v) for k, v in cp[s].items()} for s in cp.sections()}
        return cls(secs, name)

    def to_dict(self) -> dict:
        return {s: dict(self.sections[s]) for s in SECTIONS if s in self.sections}

    @classmethod
    def from_dict(cls, d: dict, name: str = "") -> "RunRecipe":
        return cls({s: dict(v) for s, v in d.items()}, name)

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_command(self, command: str) -> "RunRecipe":
        secs = {k: dict(v) for k, v in self.sections.items()}
        secs.setdefault("run", {})["command"] = command
        return RunRecipe(secs, self.name)

    def validate(self, command: str | None = None) -> "RunRecipe":
        command = command or self.command
        bad = []
        if command not in COMMANDS:
            bad.append(f"run.command: expected one of {', '.join(COMMANDS)}, got {command!r}")
        fam = self.family
        if command in ("butterfly", "fractal") and fam not in ("dimer-chain", "trimer-chain"):
            bad.append(f"run.family: {command} needs dimer-chain or trimer-chain, got {fam!r}")
        if command in ("confinement", "portrait") and fam != "hedgehog":
            bad.append(f"run.family: {command} needs hedgehog, got {fam!r}")
        g = self.section("geometry")
        need = {"dimer-chain": ("N", "L", "d"), "trimer-chain": ("N_cells",), "hedgehog": ("n", "d")}
        if command != "harper":
            for k in need.get(fam, ()):
                if k not in g:
                    bad.append(f"geometry.{k}: missing")
        for k, v in g.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool) and v < 0:
                bad.append(f"geometry.{k}: must be nonnegative, got {v}")
        m = self.section("model")
        for k in ("delta0", "lam"):
            if k in m and not (isinstance(m[k], (int, float)) and m[k] > 0):
                bad.append(f"model.{k}: must be a positive number, got {m[k]!r}")
        for f in self.formats():
            if f not in ("csv", "json", "svg"):
                bad.append(f"output.formats: unknown format {f!r}")
        if bad:
            raise RecipeError(bad)
        return self


def load_recipe(path) -> RunRecipe:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise RecipeError([f"cannot read recipe {path}: {e.strerror}"]) from None
    return RunRecipe.from_ini(text, str(path))


def list_presets() -> list[str]:
    root = resources.files("gaugelat") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_preset(name: str) -> RunRecipe:
    root = resources.files("gaugelat") / "presets"
    f = root / f"{name}.ini"
    if not f.is_file():
        raise RecipeError([f"unknown preset {name!r}; available: {', '.join(list_presets())}"])
    return RunRecipe.from_ini(f.read_text(), name)
