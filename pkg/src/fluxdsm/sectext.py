"""Line-anchored parser for the sectioned key=value config format.

The format is deliberately tiny:

    # comment
    [section]
    key = value

Blank lines and '#' comments are ignored. Keys are lowercase
identifiers. Every entry must live inside a section. Errors carry the
1-based line number they were found on so the CLI can print
"file:line: message" and callers can distinguish syntax problems from
unknown keys.
"""

import re
from dataclasses import dataclass, field

from .errors import ConfigSyntaxError, UnknownKeyError, ConfigError

_SECTION_RE = re.compile(r"^\[([a-z0-9_-]+)\]$")
_KEY_RE = re.compile(r"^[a-z0-9_.-]+$")


@dataclass
class Entry:
    key: str
    value: str
    line: int


@dataclass
class Section:
    name: str
    line: int
    entries: list = field(default_factory=list)
    path: str | None = None

    def keys(self):
        return [e.key for e in self.entries]

    def _find(self, key):
        for e in self.entries:
            if e.key == key:
                return e
        return None

    def has(self, key):
        return self._find(key) is not None

    def get_str(self, key, default=None):
        e = self._find(key)
        if e is None:
            if default is None:
                raise ConfigError(
                    f"section [{self.name}] is missing required key '{key}'",
                    line=self.line, path=self.path)
            return default
        return e.value

    def get_float(self, key, default=None):
        e = self._find(key)
        if e is None:
            if default is None:
                raise ConfigError(
                    f"section [{self.name}] is missing required key '{key}'",
                    line=self.line, path=self.path)
            return default
        try:
            return float(e.value)
        except ValueError:
            raise ConfigError(f"key '{key}' expects a number, got '{e.value}'",
                              line=e.line, path=self.path) from None

    def get_int(self, key, default=None):
        e = self._find(key)
        if e is None:
            if default is None:
                raise ConfigError(
                    f"section [{self.name}] is missing required key '{key}'",
                    line=self.line, path=self.path)
            return default
        try:
            return int(e.value, 0)
        except ValueError:
            raise ConfigError(f"key '{key}' expects an integer, got '{e.value}'",
                              line=e.line, path=self.path) from None

    def get_bool(self, key, default=None):
        e = self._find(key)
        if e is None:
            if default is None:
                raise ConfigError(
                    f"section [{self.name}] is missing required key '{key}'",
                    line=self.line, path=self.path)
            return default
        low = e.value.lower()
        if low in ("true", "on", "yes", "1"):
            return True
        if low in ("false", "off", "no", "0"):
            return False
        raise ConfigError(f"key '{key}' expects a boolean, got '{e.value}'",
                          line=e.line, path=self.path)

    def reject_unknown(self, allowed):
        """Raise UnknownKeyError for any key not in allowed."""
        for e in self.entries:
            if e.key not in allowed:
                raise UnknownKeyError(
                    f"unknown key '{e.key}' in section [{self.name}]",
                    line=e.line, path=self.path)


def parse_sections(text, path=None, allow_duplicate_sections=False):
    """Parse config text into an ordered list of Section objects."""
    sections = []
    seen = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if m is None:
                raise ConfigSyntaxError(
                    f"malformed section header '{raw.strip()}'",
                    line=lineno, path=path)
            name = m.group(1)
            if not allow_duplicate_sections and name in seen:
                raise ConfigSyntaxError(
                    f"duplicate section [{name}] (first defined on line "
                    f"{seen[name]})", line=lineno, path=path)
            seen.setdefault(name, lineno)
            current = Section(name=name, line=lineno, path=path)
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigSyntaxError(
                f"expected 'key = value', got '{raw.strip()}'",
                line=lineno, path=path)
        if current is None:
            raise ConfigSyntaxError(
                "key=value entry before any [section] header",
                line=lineno, path=path)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise ConfigSyntaxError(f"invalid key '{key}'",
                                    line=lineno, path=path)
        if key in current.keys():
            raise ConfigSyntaxError(
                f"duplicate key '{key}' in section [{current.name}]",
                line=lineno, path=path)
        current.entries.append(Entry(key=key, value=value, line=lineno))
    return sections


def load_sections(path, allow_duplicate_sections=False):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sections(fh.read(), path=str(path),
                              allow_duplicate_sections=allow_duplicate_sections)
