"""Node contract and the type registry trees draw their nodes from."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable

if TYPE_CHECKING:
    from .data import ProblemData
    from .engine import RunContext


class NodeFailure(RuntimeError):
    def __init__(self, node: str, cause: str):
        super().__init__(f"node '{node}' failed: {cause}")
        self.node = node
        self.cause = cause


class NoViableChild(LookupError):
    pass


class UnknownTopic(KeyError):
    pass


class Node:
    """Base class for tree nodes.

    Class-level declarations describe the data contract; instances are wired
    with their name and ordered children at tree build time. Subclasses
    override :meth:`execute` (returning a delta of created keys),
    :meth:`next_node` when they branch, and :meth:`interpret_result` for the
    backward pass.
    """

    requires: frozenset[str] = frozenset()
    creates: frozenset[str] = frozenset()
    path_keys: frozenset[str] = frozenset()

    def __init__(self, name: str, children: tuple[str, ...] = (), **init_args: Any):
        self.name = name
        self.children = tuple(children)
        self.init_args = dict(init_args)

    def execute(self, data: "ProblemData", ctx: "RunContext") -> dict[str, Any]:
        return {}

    def next_node(self, data: "ProblemData", ctx: "RunContext") -> str:
        raise NoViableChild(f"node '{self.name}' branches but defines no next_node")

    def interpret_result(self, data: "ProblemData", ctx: "RunContext") -> dict[str, Any]:
        return {}

    def select_child(
        self,
        data: "ProblemData",
        ctx: "RunContext",
        key: str,
        mapping: dict[str, str] | None = None,
    ) -> str:
        """Branch on `key`: a path assignment overrides the stored entry.

        `mapping` translates a value to a child name; without it the value is
        the child name itself.
        """
        from_path = key in self.path_keys and key in ctx.path
        value = ctx.path.get(key) if from_path else data.get(key)
        if from_path and key in data and data[key] != ctx.path[key]:
            ctx.log(
                f"path assignment {key}={ctx.path[key]!r} overrides stored "
                f"value {data[key]!r} at node '{self.name}'"
            )
        if value is None:
            raise NoViableChild(f"node '{self.name}': no value for branching key '{key}'")
        child = mapping.get(value, value) if mapping else value
        if child not in self.children:
            raise NoViableChild(
                f"node '{self.name}': '{value}' does not select a declared child"
            )
        return child


_REGISTRY: dict[str, dict[str, type[Node]]] = {}

# namespaces whose node classes live in a module that registers them on import
_NAMESPACE_MODULES: dict[str, str] = {"basic": "qonduct.nodes"}


def register_node(namespace: str, type_name: str) -> Callable[[type[Node]], type[Node]]:
    def decorator(cls: type[Node]) -> type[Node]:
        bucket = _REGISTRY.setdefault(namespace, {})
        if type_name in bucket:
            raise ValueError(f"node type '{namespace}.{type_name}' already registered")
        bucket[type_name] = cls
        return cls

    return decorator


def node_registry(namespaces: tuple[str, ...] | list[str]) -> dict[str, type[Node]]:
    """Merge the requested namespaces; later namespaces shadow earlier ones."""
    merged: dict[str, type[Node]] = {}
    for ns in namespaces:
        if ns not in _REGISTRY and ns in _NAMESPACE_MODULES:
            import importlib

            importlib.import_module(_NAMESPACE_MODULES[ns])
        merged.update(_REGISTRY.get(ns, {}))
    return merged


def unregister_namespace(namespace: str) -> None:
    _REGISTRY.pop(namespace, None)
