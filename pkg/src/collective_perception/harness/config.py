"""Batch configuration files.

Files are INI-style text. ``[batch]`` names the run matrix, ``[scenario]``
fixes everything else about each episode, and any number of
``[weighting NAME]`` sections add fusion rules to sweep over::

    [batch]
    name = formative
    root_seed = 2022
    repetitions = 10
    ratios = 0.52, 0.62, 0.72
    kinds = uniform, clustered-majority-first, clustered-minority-first
    malicious_fractions = 0.0

    [scenario]
    preset = formative          # or give length/width/agents/t_max
    navigation = rules          # rules | random
    broadcast = parameterised   # parameterised | random
    commit = quorum             # quorum | random-commit | none
    malicious = constant        # constant | mimic
    theta = 0.1
    commit_probability = 0.05
    weighting = static          # used when no [weighting ...] sections
    w_max = 0.1

    [weighting eq]
    method = equation
    w_max = 1.0

Every value is range-checked. Errors name the file, line and key.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterator

from ..behavior import BroadcastPolicy, CommitPolicy, MaliciousMode
from ..engine import PRESETS, NavigationKind, ScenarioConfig
from ..environment import DistributionKind, round_half_up
from ..fusion import WeightingMethod
from ..seeding import derive_seed

BATCH_KEYS = {"name", "root_seed", "repetitions", "ratios", "kinds", "malicious_fractions"}
SCENARIO_KEYS = {"preset", "length", "width", "agents", "t_max", "navigation", "broadcast",
                 "commit", "theta", "commit_probability", "weighting", "w_max",
                 "malicious", "deliver_broadcasts"}
WEIGHTING_KEYS = {"method", "w_max"}


class ConfigError(ValueError):
    def __init__(self, source: str, line: int | None, message: str):
        self.source, self.line = source, line
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Coordinates:
    """Position of one episode in a batch matrix."""

    index: int
    malicious_index: int
    weighting_index: int
    ratio_index: int
    kind_index: int
    repetition: int


@dataclass(frozen=True)
class BatchConfig:
    name: str
    template: ScenarioConfig
    ratios: tuple[float, ...]
    kinds: tuple[DistributionKind, ...]
    repetitions: int
    malicious_fractions: tuple[float, ...] = (0.0,)
    weightings: tuple[WeightingMethod, ...] = ()
    root_seed: int = 0

    @property
    def weighting_methods(self) -> tuple[WeightingMethod, ...]:
        return self.weightings or (self.template.weighting,)

    @property
    def size(self) -> int:
        return (len(self.malicious_fractions) * len(self.weighting_methods)
                * len(self.ratios) * len(self.kinds) * self.repetitions)

    def episode_seed(self, ratio_index: int, kind_index: int, repetition: int,
                     malicious_index: int) -> int:
        """Seed of one matrix cell; independent of the matrix size.

        The weighting index is deliberately absent: every fusion rule sees
        the same environments and starting swarms.
        """
        return derive_seed(self.root_seed, ratio_index, kind_index, repetition, malicious_index)

    def matrix(self) -> Iterator[tuple[Coordinates, ScenarioConfig]]:
        """Scenarios in output order: malicious, weighting, ratio, kind, repetition."""
        index = 0
        for mi, frac in enumerate(self.malicious_fractions):
            for wi, method in enumerate(self.weighting_methods):
                for ri, ratio in enumerate(self.ratios):
                    for ki, kind in enumerate(self.kinds):
                        for rep in range(self.repetitions):
                            seed = self.episode_seed(ri, ki, rep, mi)
                            scenario = replace(self.template, ratio=ratio, kind=kind,
                                               malicious_fraction=frac, weighting=method,
                                               seed=seed)
                            yield Coordinates(index, mi, wi, ri, ki, rep), scenario
                            index += 1


def preset_path(name: str) -> Path:
    return Path(str(resources.files("collective_perception") / "presets" / f"{name}.cfg"))


def resolve_config_path(target: str | Path) -> Path:
    """A file path, or the name of a shipped preset such as ``formative``."""
    path = Path(target)
    if path.exists():
        return path
    candidate = preset_path(str(target).removesuffix(".cfg"))
    if candidate.exists():
        return candidate
    raise FileNotFoundError(f"no config file or preset named {target!r}")


class _Lines:
    """Maps (section, key) to the line it was written on."""

    def __init__(self, text: str):
        self.where: dict[tuple[str, str], int] = {}
        self.sections: dict[str, int] = {}
        section = ""
        for no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            head = re.match(r"\[(.+)\]$", line)
            if head:
                section = head.group(1).strip()
                self.sections.setdefault(section, no)
                continue
            key = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", line)
            if key:
                self.where.setdefault((section, key.group(1).strip().lower()), no)

    def __call__(self, section: str, key: str | None = None) -> int | None:
        if key is None:
            return self.sections.get(section)
        return self.where.get((section, key), self.sections.get(section))


class _Reader:
    def __init__(self, source: str, parser: configparser.ConfigParser, lines: _Lines):
        self.source, self.parser, self.lines = source, parser, lines

    def fail(self, section: str, key: str | None, message: str):
        label = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(self.source, self.lines(section, key), f"{label}: {message}")

    def raw(self, section: str, key: str, default=None):
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        if default is None:
            self.fail(section, key, "missing required key")
        return default

    def convert(self, section: str, key: str, value: str, kind):
        try:
            return kind(value)
        except (ValueError, TypeError):
            self.fail(section, key, f"cannot read {value!r} as {getattr(kind, '__name__', kind)}")

    def number(self, section: str, key: str, kind=float, default=None):
        value = self.raw(section, key, None if default is None else str(default))
        return self.convert(section, key, value, kind)

    def items(self, section: str, key: str, kind=float, default=None) -> tuple:
        value = self.raw(section, key, default)
        parts = [p.strip() for p in value.split(",") if p.strip()]
        if not parts:
            self.fail(section, key, "empty list")
        return tuple(self.convert(section, key, p, kind) for p in parts)

    def check_keys(self, section: str, allowed: set[str]) -> None:
        for key in self.parser.options(section):
            if key not in allowed:
                self.fail(section, key, f"unknown key (expected one of {sorted(allowed)})")

    def build(self, section: str, key: str | None, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ValueError as exc:
            self.fail(section, key, str(exc))


def _enum(enum_cls):
    def parse(value: str):
        return enum_cls(value.lower())
    parse.__name__ = "one of " + "|".join(m.value for m in enum_cls)
    return parse


def _boolean(value: str) -> bool:
    lowered = value.lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    raise ValueError(value)


def parse_config(text: str, source: str = "<config>") -> BatchConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(source, line, f"parse error: {exc.message.splitlines()[0]}") from exc
    lines = _Lines(text)
    r = _Reader(source, parser, lines)

    for section in ("batch", "scenario"):
        if not parser.has_section(section):
            raise ConfigError(source, None, f"missing [{section}] section")
    for section in parser.sections():
        if section not in ("batch", "scenario") and not section.startswith("weighting "):
            r.fail(section, None, "unknown section")
    r.check_keys("batch", BATCH_KEYS)
    r.check_keys("scenario", SCENARIO_KEYS)

    # batch matrix
    name = r.raw("batch", "name")
    root_seed = r.number("batch", "root_seed", int, 0)
    if root_seed < 0:
        r.fail("batch", "root_seed", "must be non-negative")
    repetitions = r.number("batch", "repetitions", int)
    if repetitions < 1:
        r.fail("batch", "repetitions", "must be at least 1")
    ratios = r.items("batch", "ratios", float)
    for ratio in ratios:
        if not 0.0 < ratio < 1.0 or ratio == 0.5:
            r.fail("batch", "ratios", f"{ratio} must lie in (0, 1) and differ from 0.5")
    kinds = r.items("batch", "kinds", _enum(DistributionKind), "uniform")
    fractions = r.items("batch", "malicious_fractions", float, "0.0")
    for frac in fractions:
        if not 0.0 <= frac < 1.0:
            r.fail("batch", "malicious_fractions", f"{frac} must lie in [0, 1)")

    # scenario template
    s = "scenario"
    dims = {}
    if parser.has_option(s, "preset"):
        preset = r.raw(s, "preset")
        if preset not in PRESETS:
            r.fail(s, "preset", f"unknown preset {preset!r} (expected one of {sorted(PRESETS)})")
        dims = dict(PRESETS[preset])
    for key, field_name in (("length", "length"), ("width", "width"),
                            ("agents", "n_agents"), ("t_max", "t_max")):
        if parser.has_option(s, key) or field_name not in dims:
            dims[field_name] = r.number(s, key, int)
    for key, field_name in (("length", "length"), ("width", "width"), ("agents", "n_agents")):
        if dims[field_name] < (2 if key != "agents" else 1):
            r.fail(s, key, f"{dims[field_name]} is too small")
    if dims["t_max"] < 0:
        r.fail(s, "t_max", "must be non-negative")
    if dims["n_agents"] > dims["length"] * dims["width"]:
        r.fail(s, "agents", f"{dims['n_agents']} agents exceed the {dims['length'] * dims['width']} cells")

    navigation = r.convert(s, "navigation", r.raw(s, "navigation", "rules"), _enum(NavigationKind))
    broadcast = r.build(s, "broadcast", BroadcastPolicy,
                        r.raw(s, "broadcast", "parameterised").lower())
    commit_kind = r.raw(s, "commit", "quorum").lower()
    theta = r.number(s, "theta", float, 0.1)
    commit_p = r.number(s, "commit_probability", float, 0.05)
    commit_key = "theta" if commit_kind == "quorum" and parser.has_option(s, "theta") else "commit"
    commit = r.build(s, commit_key, CommitPolicy, commit_kind, theta, commit_p)
    weighting = r.build(s, "w_max", WeightingMethod,
                        r.raw(s, "weighting", "static").lower(), r.number(s, "w_max", float, 0.1))
    malicious = r.convert(s, "malicious", r.raw(s, "malicious", "constant"), _enum(MaliciousMode))
    deliver = r.convert(s, "deliver_broadcasts", r.raw(s, "deliver_broadcasts", "true"), _boolean)

    weightings = []
    for section in parser.sections():
        if section.startswith("weighting "):
            r.check_keys(section, WEIGHTING_KEYS)
            weightings.append(r.build(section, "w_max", WeightingMethod,
                                      r.raw(section, "method").lower(),
                                      r.number(section, "w_max", float)))

    template = r.build(s, None, ScenarioConfig, ratio=ratios[0], kind=kinds[0],
                       malicious_fraction=fractions[0], broadcast_policy=broadcast,
                       commit_policy=commit, weighting=weighting, navigation=navigation,
                       malicious_mode=malicious, deliver_broadcasts=deliver, **dims)
    for frac in fractions:
        if round_half_up(frac * template.n_agents) >= template.n_agents:
            r.fail("batch", "malicious_fractions", f"{frac} leaves no regular agents")

    return BatchConfig(name, template, ratios, kinds, repetitions, fractions,
                       tuple(weightings), root_seed)


def load_config(path: str | Path) -> BatchConfig:
    path = resolve_config_path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))
