import math

import numpy as np
import pytest

from qonduct import builders
from qonduct.builders import (
    BuilderDescriptor,
    HyperParam,
    MissingHyperParam,
    OutOfRange,
    UnknownBuilder,
    build,
    hyperparams,
    list_builders,
    register_builder,
    unregister_builder,
)
from qonduct.vqa.ansatz import AnsatzSpec
from qonduct.vqa.optimizers import Nft, ParameterShiftGd, Spsa


def test_stock_optimizers_listed():
    ids = [d.builder_id for d in list_builders("optimizer")]
    assert {"spsa", "nft", "ps_gd"} <= set(ids)
    assert ids == sorted(ids)


def test_stock_ansatz_listed():
    ids = [d.builder_id for d in list_builders("ansatz")]
    assert {"qaoa", "lr_qaoa", "hardware_efficient"} <= set(ids)


def test_hyperparams_complete_and_buildable():
    # building with exactly the declared defaults must succeed for every builder
    for kind in ("optimizer", "ansatz"):
        for desc in list_builders(kind):
            values = {h.name: h.default for h in desc.hyperparams}
            assert None not in values.values(), desc.builder_id
            artifact = build(desc.builder_id, values, kind=kind)
            assert artifact is not None


def test_spsa_hyperparams_include_standard_gains():
    names = {h.name for h in hyperparams("spsa")}
    assert {"a", "c", "max_iters"} <= names


def test_ps_gd_step_length_bounds():
    opt = build("ps_gd", {"step_length": 0.25, "max_iters": 7})
    assert isinstance(opt, ParameterShiftGd)
    assert opt.step_length == 0.25 and opt.max_iters == 7
    with pytest.raises(OutOfRange):
        build("ps_gd", {"step_length": 0.0})
    with pytest.raises(OutOfRange):
        build("ps_gd", {"step_length": 1.5})


def test_build_optimizer_types():
    assert isinstance(build("spsa", {"a": 0.5, "c": 0.1, "max_iters": 10}), Spsa)
    assert isinstance(build("nft", {"max_sweeps": 3}), Nft)


def test_build_ansatz_specs():
    spec = build("qaoa", {"p": 3})
    assert spec == AnsatzSpec("qaoa", depth=3)
    spec = build("lr_qaoa", {"p": 5, "delta": 0.4})
    assert spec.kind == "lr_qaoa" and spec.depth == 5 and spec.delta == 0.4
    spec = build("hardware_efficient", {"layers": 4})
    assert spec.kind == "hardware_efficient" and spec.depth == 4


def test_unknown_builder():
    with pytest.raises(UnknownBuilder):
        build("cmaes", {})
    with pytest.raises(UnknownBuilder):
        hyperparams("cmaes")


def test_unknown_hyperparam_rejected():
    with pytest.raises(MissingHyperParam):
        build("nft", {"momentum": 0.9})


def test_integer_coercion():
    opt = build("nft", {"max_sweeps": 5.0})
    assert opt.max_sweeps == 5 and isinstance(opt.max_sweeps, int)
    with pytest.raises(OutOfRange):
        build("nft", {"max_sweeps": 0})


def test_runtime_registration_extends_options():
    class Dummy:
        def __init__(self, strength=1.0):
            self.strength = strength

        def minimize(self, loss, params0):
            return np.asarray(params0, dtype=float)

    desc = BuilderDescriptor(
        builder_id="dummy_opt",
        kind="optimizer",
        display_name="dummy",
        hyperparams=(HyperParam("strength", "real", default=1.0, minimum=0.0),),
    )
    register_builder(desc, Dummy)
    try:
        assert "dummy_opt" in [d.builder_id for d in list_builders("optimizer")]
        opt = build("dummy_opt", {"strength": 2.5})
        assert isinstance(opt, Dummy) and opt.strength == 2.5
        with pytest.raises(ValueError):
            register_builder(desc, Dummy)
    finally:
        unregister_builder("optimizer", "dummy_opt")
    assert "dummy_opt" not in [d.builder_id for d in list_builders("optimizer")]


def test_descriptor_serializes():
    d = list_builders("optimizer")[0].to_dict()
    assert set(d) == {"builder_id", "kind", "display_name", "hyperparams"}
    for h in d["hyperparams"]:
        assert "name" in h and "value_kind" in h


def test_choice_hyperparam_validation():
    hp = HyperParam("mode", "choice", default="fast", options=("fast", "slow"))
    assert hp.check("slow") == "slow"
    with pytest.raises(OutOfRange):
        hp.check("medium")
