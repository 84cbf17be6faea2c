"""Uniform wrapping of optimizers and ansatz generators.

Nodes offer whatever builders are registered for a kind without knowing
construction details; registering a new builder extends the option set with
no node changes. Each builder declares its hyperparameters, and defaults
always construct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .vqa.ansatz import AnsatzSpec
from .vqa.optimizers import Nft, ParameterShiftGd, Spsa


class UnknownBuilder(KeyError):
    pass


class MissingHyperParam(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class HyperParam:
    name: str
    value_kind: str  # integer | real | choice
    default: Any = None
    minimum: float | None = None
    maximum: float | None = None
    exclusive_minimum: bool = False
    options: tuple = ()
    description: str = ""

    def check(self, value):
        if self.value_kind == "integer":
            value = int(value)
        elif self.value_kind == "real":
            value = float(value)
        elif value not in self.options:
            raise OutOfRange(f"{self.name}={value!r} not in {list(self.options)}")
        if self.minimum is not None:
            if value < self.minimum or (self.exclusive_minimum and value == self.minimum):
                raise OutOfRange(f"{self.name}={value} below minimum {self.minimum}")
        if self.maximum is not None and value > self.maximum:
            raise OutOfRange(f"{self.name}={value} above maximum {self.maximum}")
        return value

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value_kind": self.value_kind,
            "default": self.default,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "options": list(self.options),
            "description": self.description,
        }


@dataclass(frozen=True)
class BuilderDescriptor:
    builder_id: str
    kind: str  # optimizer | ansatz
    display_name: str
    hyperparams: tuple[HyperParam, ...] = ()

    def to_dict(self) -> dict:
        return {
            "builder_id": self.builder_id,
            "kind": self.kind,
            "display_name": self.display_name,
            "hyperparams": [h.to_dict() for h in self.hyperparams],
        }


_REGISTRY: dict[tuple[str, str], tuple[BuilderDescriptor, Callable[..., Any]]] = {}


def register_builder(descriptor: BuilderDescriptor, factory: Callable[..., Any]) -> None:
    key = (descriptor.kind, descriptor.builder_id)
    if key in _REGISTRY:
        raise ValueError(f"builder '{descriptor.builder_id}' already registered for {descriptor.kind}")
    # defaults must construct
    factory(**{h.name: h.default for h in descriptor.hyperparams if h.default is not None})
    _REGISTRY[key] = (descriptor, factory)


def unregister_builder(kind: str, builder_id: str) -> None:
    _REGISTRY.pop((kind, builder_id), None)


def list_builders(kind: str) -> list[BuilderDescriptor]:
    found = [desc for (k, _), (desc, _) in _REGISTRY.items() if k == kind]
    return sorted(found, key=lambda d: d.builder_id)


def hyperparams(builder_id: str) -> list[HyperParam]:
    for (_, bid), (desc, _) in _REGISTRY.items():
        if bid == builder_id:
            return list(desc.hyperparams)
    raise UnknownBuilder(f"no builder '{builder_id}' registered")


def build(builder_id: str, values: dict[str, Any] | None = None, kind: str | None = None):
    values = dict(values or {})
    match = None
    for (k, bid), entry in _REGISTRY.items():
        if bid == builder_id and (kind is None or k == kind):
            match = entry
            break
    if match is None:
        raise UnknownBuilder(f"no builder '{builder_id}' registered")
    descriptor, factory = match
    kwargs = {}
    declared = {h.name: h for h in descriptor.hyperparams}
    for name, value in values.items():
        if name not in declared:
            raise MissingHyperParam(f"'{builder_id}' has no hyperparameter '{name}'")
        kwargs[name] = declared[name].check(value)
    for name, hp in declared.items():
        if name not in kwargs:
            if hp.default is None:
                raise MissingHyperParam(f"'{builder_id}' requires '{name}'")
            kwargs[name] = hp.default
    return factory(**kwargs)


# --- stock registry -----------------------------------------------------------

register_builder(
    BuilderDescriptor(
        builder_id="spsa",
        kind="optimizer",
        display_name="SPSA",
        hyperparams=(
            HyperParam("a", "real", default=1.0, minimum=0.0, exclusive_minimum=True,
                       description="step gain"),
            HyperParam("c", "real", default=0.3, minimum=0.0, exclusive_minimum=True,
                       description="perturbation gain"),
            HyperParam("max_iters", "integer", default=200, minimum=1),
            HyperParam("init_probes", "integer", default=20, minimum=0,
                       description="random starting points probed before descending"),
            HyperParam("restarts", "integer", default=1, minimum=1),
        ),
    ),
    Spsa,
)

register_builder(
    BuilderDescriptor(
        builder_id="nft",
        kind="optimizer",
        display_name="sequential sinusoidal updates",
        hyperparams=(HyperParam("max_sweeps", "integer", default=20, minimum=1),),
    ),
    Nft,
)

register_builder(
    BuilderDescriptor(
        builder_id="ps_gd",
        kind="optimizer",
        display_name="parameter-shift gradient descent",
        hyperparams=(
            HyperParam("step_length", "real", default=0.1, minimum=0.0, maximum=1.0,
                       exclusive_minimum=True),
            HyperParam("max_iters", "integer", default=100, minimum=1),
        ),
    ),
    ParameterShiftGd,
)

register_builder(
    BuilderDescriptor(
        builder_id="qaoa",
        kind="ansatz",
        display_name="alternating cost/mixer ansatz",
        hyperparams=(HyperParam("p", "integer", default=2, minimum=1, description="depth"),),
    ),
    lambda p: AnsatzSpec("qaoa", depth=p),
)

register_builder(
    BuilderDescriptor(
        builder_id="lr_qaoa",
        kind="ansatz",
        display_name="linear-ramp fixed-schedule ansatz",
        hyperparams=(
            HyperParam("p", "integer", default=8, minimum=1, description="schedule length"),
            HyperParam("delta", "real", default=0.7, minimum=0.0, exclusive_minimum=True,
                       description="ramp height"),
        ),
    ),
    lambda p, delta: AnsatzSpec("lr_qaoa", depth=p, delta=delta),
)

register_builder(
    BuilderDescriptor(
        builder_id="hardware_efficient",
        kind="ansatz",
        display_name="layered RY + CX chain ansatz",
        hyperparams=(HyperParam("layers", "integer", default=2, minimum=1),),
    ),
    lambda layers: AnsatzSpec("hardware_efficient", depth=layers),
)

# Identifiers the scaling-database schema accepts beyond the builders above;
# records imported from external benchmarks may reference them.
DECLARED_OPTIMIZER_IDS = ("spsa", "nft", "ps_gd", "cobyla", "powell", "ngd")
