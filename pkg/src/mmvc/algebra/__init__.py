from mmvc.algebra.counters import FIELDS, OpCounters, counter_scope, record
from mmvc.algebra.groups import (
    Ed25519Group,
    Group,
    GroupElement,
    ToyGroup,
    get_group,
    group_by_id,
)
from mmvc.algebra.ops import (
    dot,
    exp,
    field_mul,
    multi_exp,
    sample_element,
    sample_scalar,
    sample_scalars,
    scale,
)

__all__ = [
    "FIELDS", "OpCounters", "counter_scope", "record",
    "Ed25519Group", "Group", "GroupElement", "ToyGroup", "get_group", "group_by_id",
    "dot", "exp", "field_mul", "multi_exp", "sample_element", "sample_scalar",
    "sample_scalars", "scale",
]
