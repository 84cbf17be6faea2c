from .config import NodeSpec, PathSpec, TreeConfig, load_path_spec, load_tree_config
from .data import MissingKey, ProblemData, ProvenanceRecord, UndeclaredWrite
from .engine import (
    DecisionTree,
    DuplicateName,
    InvalidTree,
    MissingRoot,
    RunResult,
    UnknownNode,
    ValidationReport,
    build_tree,
)
from .node import Node, NodeFailure, NoViableChild, UnknownTopic, node_registry, register_node

__all__ = [
    "DecisionTree",
    "DuplicateName",
    "InvalidTree",
    "MissingKey",
    "MissingRoot",
    "Node",
    "NodeFailure",
    "NodeSpec",
    "NoViableChild",
    "PathSpec",
    "ProblemData",
    "ProvenanceRecord",
    "RunResult",
    "TreeConfig",
    "UndeclaredWrite",
    "UnknownNode",
    "UnknownTopic",
    "ValidationReport",
    "build_tree",
    "load_path_spec",
    "load_tree_config",
    "node_registry",
    "register_node",
]
