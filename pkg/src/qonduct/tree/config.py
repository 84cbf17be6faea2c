"""Tree and path configuration, including the YAML file formats."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NodeSpec:
    name: str
    type: str
    children: tuple[str, ...] = ()
    init_args: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TreeConfig:
    node_sources: tuple[str, ...]
    nodes: tuple[NodeSpec, ...]
    root: str
    flags: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class PathSpec:
    assignments: dict[str, Any] = field(default_factory=dict)


_TOP_KEYS = {"node_sources", "nodes", "root", "flags"}
_NODE_KEYS = {"name", "type", "children", "init_args"}
_FLAG_KEYS = {"automation_mode", "verbosity"}


def tree_config_from_dict(raw: Mapping[str, Any]) -> TreeConfig:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    for required in ("node_sources", "nodes", "root"):
        if required not in raw:
            raise ConfigError(f"missing top-level key '{required}'")
    nodes = []
    for entry in raw["nodes"]:
        bad = set(entry) - _NODE_KEYS
        if bad:
            raise ConfigError(f"unknown node keys: {sorted(bad)}")
        if "name" not in entry or "type" not in entry:
            raise ConfigError(f"node entry missing name/type: {entry}")
        nodes.append(
            NodeSpec(
                name=str(entry["name"]),
                type=str(entry["type"]),
                children=tuple(entry.get("children") or ()),
                init_args=dict(entry.get("init_args") or {}),
            )
        )
    flags = dict(raw.get("flags") or {})
    bad_flags = set(flags) - _FLAG_KEYS
    if bad_flags:
        raise ConfigError(f"unknown flags: {sorted(bad_flags)}")
    mode = flags.setdefault("automation_mode", "automatic")
    if mode not in ("automatic", "manual"):
        raise ConfigError(f"automation_mode must be automatic or manual, got {mode!r}")
    flags.setdefault("verbosity", "info")
    return TreeConfig(
        node_sources=tuple(raw["node_sources"]),
        nodes=tuple(nodes),
        root=str(raw["root"]),
        flags=flags,
    )


def load_tree_config(path: str | Path) -> TreeConfig:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return tree_config_from_dict(raw)


def load_path_spec(path: str | Path) -> PathSpec:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        return PathSpec()
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: path file must be a flat mapping")
    return PathSpec(assignments=dict(raw))
