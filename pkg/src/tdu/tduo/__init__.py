"""Trust data usage model: data items, conditions, operators and usage policies."""

from .codec import (
    TDUO_DTD,
    TDUOParseError,
    data_item_from_dict,
    data_item_to_dict,
    parse_data_item,
    parse_usage_policy,
    policy_from_dict,
    policy_to_dict,
    serialize_data_item,
    serialize_usage_policy,
)
from .model import (
    Condition,
    DataItem,
    DeonticOperator,
    EntityAttribute,
    EntityId,
    EntityMetadata,
    ModelError,
    PolicyRule,
    UsagePolicy,
)
from .scopes import ANY, Actor, Dimension, coarser_levels, normalize, subsumes

__all__ = [
    "TDUO_DTD", "TDUOParseError", "parse_data_item", "serialize_data_item",
    "parse_usage_policy", "serialize_usage_policy", "data_item_to_dict",
    "data_item_from_dict", "policy_to_dict", "policy_from_dict", "Condition",
    "DataItem", "DeonticOperator", "EntityAttribute", "EntityId", "EntityMetadata",
    "ModelError", "PolicyRule", "UsagePolicy", "ANY", "Actor", "Dimension",
    "coarser_levels", "normalize", "subsumes",
]
