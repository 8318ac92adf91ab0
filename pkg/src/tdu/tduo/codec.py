"""XML and JSON encodings of data items and usage policies.

XML follows the TDUO document types below.  JSON mirrors it one key per
element, with repeated elements as lists and scope values by element name.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from typing import Any, Dict, Iterable, List, Optional, Union

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
from .scopes import ELEMENT_NAMES, ELEMENT_ORDER, Actor, Dimension

# Listing-style document types; AbstractScope carries the Statistic extension.
TDUO_DTD = """\
<!ELEMENT DataItem (EntityElement)>
<!ELEMENT EntityElement (EntityID, AttributeDomainName?, EntityAttributeList, DomainMetadata?)>
<!ELEMENT EntityID (Id, Type)>
<!ELEMENT Id (#PCDATA)>
<!ELEMENT Type (#PCDATA)>
<!ELEMENT AttributeDomainName (#PCDATA)>
<!ELEMENT EntityAttributeList (EntityAttribute*)>
<!ELEMENT EntityAttribute (Name, Type, EntityValue, EntityMetadata+)>
<!ELEMENT EntityValue (#PCDATA)>
<!ELEMENT DomainMetadata (EntityMetadata*)>
<!ELEMENT EntityMetadata (Name, Type, Value)>
<!ELEMENT Value (#PCDATA)>
<!ELEMENT Condition (Temporality*, Spatiality*, Abstraction*, Actor*, Purpose*)>
<!ELEMENT Spatiality (SpatialScope*)>
<!ELEMENT Temporality (TemporalScope*)>
<!ELEMENT Abstraction (AbstractScope*)>
<!ELEMENT Actor (ActorScope*)>
<!ELEMENT Purpose (PurposeScope*)>
<!ELEMENT TemporalScope (Secondly?, Minutely?, Hourly?, Daily?, Weekly?, Monthly?, Yearly?, Any?)>
<!ELEMENT SpatialScope (Street?, Zone?, Any?)>
<!ELEMENT ActorScope (DataOwner?, MunicipalAuthority?, CommercialOperator?)>
<!ELEMENT AbstractScope (Aggregation?, Detail?, Statistic?, Any?)>
<!ELEMENT PurposeScope (CommercialUse?, Any?)>
<!ELEMENT Operator (Obligation?, Forbidden?, Permission?)>
<!ELEMENT UsagePolicy (Name, Rule*)>
<!ELEMENT Rule (Operator?, Condition*)>
<!ELEMENT Name (#PCDATA | URI)*>
<!ELEMENT URI (#PCDATA)>
"""
for _empty in ("Secondly", "Minutely", "Hourly", "Daily", "Weekly", "Monthly", "Yearly", "Any",
               "Street", "Zone", "DataOwner", "MunicipalAuthority", "CommercialOperator",
               "Aggregation", "Detail", "Statistic", "CommercialUse",
               "Obligation", "Forbidden", "Permission"):
    TDUO_DTD += f"<!ELEMENT {_empty} EMPTY>\n"


class TDUOParseError(ModelError):
    """Raised for malformed or invalid documents; ``element`` names the culprit."""

    def __init__(self, message: str, element: Optional[str] = None):
        super().__init__(message)
        self.element = element


# -- XML helpers -------------------------------------------------------------

def _children(el: ET.Element, allowed: Iterable[str]) -> List[ET.Element]:
    allowed = set(allowed)
    kids = list(el)
    for k in kids:
        if k.tag not in allowed:
            raise TDUOParseError(f"unknown element <{k.tag}> inside <{el.tag}>", k.tag)
    return kids


def _one(el: ET.Element, tag: str, required: bool = True) -> Optional[ET.Element]:
    found = [k for k in el if k.tag == tag]
    if len(found) > 1:
        raise TDUOParseError(f"<{el.tag}> has more than one <{tag}>", tag)
    if not found:
        if required:
            raise TDUOParseError(f"<{el.tag}> is missing required element <{tag}>", tag)
        return None
    return found[0]


def _text(el: ET.Element, tag: str) -> str:
    child = _one(el, tag)
    if len(child):
        raise TDUOParseError(f"<{tag}> must contain text only", tag)
    return child.text or ""


def _sub_text(parent: ET.Element, tag: str, text: str) -> ET.Element:
    el = ET.SubElement(parent, tag)
    el.text = text
    return el


def _load_xml(document: Union[bytes, str], root: str) -> ET.Element:
    try:
        el = ET.fromstring(document)
    except ET.ParseError as exc:
        raise TDUOParseError(f"malformed XML: {exc}") from exc
    if el.tag != root:
        raise TDUOParseError(f"expected root element <{root}>, found <{el.tag}>", el.tag)
    return el


def _dump_xml(root: ET.Element) -> bytes:
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


# -- DataItem ------------------------------------------------------------------

def _metadata_from_xml(el: ET.Element) -> EntityMetadata:
    _children(el, ("Name", "Type", "Value"))
    return EntityMetadata(_text(el, "Name"), _text(el, "Type"), _text(el, "Value"))


def _data_item_from_xml(root: ET.Element) -> DataItem:
    _children(root, ("EntityElement",))
    element = _one(root, "EntityElement")
    _children(element, ("EntityID", "AttributeDomainName", "EntityAttributeList", "DomainMetadata"))
    eid = _one(element, "EntityID")
    _children(eid, ("Id", "Type"))
    domain_name = None
    if _one(element, "AttributeDomainName", required=False) is not None:
        domain_name = _text(element, "AttributeDomainName")
    attrs = []
    attr_list = _one(element, "EntityAttributeList")
    for a in _children(attr_list, ("EntityAttribute",)):
        _children(a, ("Name", "Type", "EntityValue", "EntityMetadata"))
        meta = [_metadata_from_xml(m) for m in a if m.tag == "EntityMetadata"]
        if not meta:
            raise TDUOParseError("<EntityAttribute> is missing required element <EntityMetadata>",
                                 "EntityMetadata")
        attrs.append(EntityAttribute(_text(a, "Name"), _text(a, "Type"), _text(a, "EntityValue"),
                                     tuple(meta)))
    domain_meta = None
    dm = _one(element, "DomainMetadata", required=False)
    if dm is not None:
        domain_meta = tuple(_metadata_from_xml(m) for m in _children(dm, ("EntityMetadata",)))
    try:
        return DataItem(EntityId(_text(eid, "Id"), _text(eid, "Type")), tuple(attrs),
                        domain_name, domain_meta)
    except TDUOParseError:
        raise
    except ModelError as exc:
        raise TDUOParseError(str(exc)) from exc


def _metadata_to_xml(parent: ET.Element, m: EntityMetadata) -> None:
    el = ET.SubElement(parent, "EntityMetadata")
    _sub_text(el, "Name", m.name)
    _sub_text(el, "Type", m.type)
    _sub_text(el, "Value", m.value)


def _data_item_to_xml(item: DataItem) -> ET.Element:
    root = ET.Element("DataItem")
    element = ET.SubElement(root, "EntityElement")
    eid = ET.SubElement(element, "EntityID")
    _sub_text(eid, "Id", item.entity_id.id)
    _sub_text(eid, "Type", item.entity_id.type)
    if item.attribute_domain_name is not None:
        _sub_text(element, "AttributeDomainName", item.attribute_domain_name)
    attr_list = ET.SubElement(element, "EntityAttributeList")
    for a in item.attributes:
        el = ET.SubElement(attr_list, "EntityAttribute")
        _sub_text(el, "Name", a.name)
        _sub_text(el, "Type", a.type)
        _sub_text(el, "EntityValue", a.value)
        for m in a.metadata:
            _metadata_to_xml(el, m)
    if item.domain_metadata is not None:
        dm = ET.SubElement(element, "DomainMetadata")
        for m in item.domain_metadata:
            _metadata_to_xml(dm, m)
    return root


def _require(obj: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise TDUOParseError(f"{where} must be an object", where)
    if key not in obj:
        raise TDUOParseError(f"{where} is missing required element {key!r}", key)
    return obj[key]


def _check_keys(obj: Dict[str, Any], allowed: Iterable[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise TDUOParseError(f"{where} must be an object", where)
    for k in obj:
        if k not in allowed:
            raise TDUOParseError(f"unknown element {k!r} in {where}", k)


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise TDUOParseError(f"{where} must be a string", where)
    return value


def _metadata_from_json(obj) -> EntityMetadata:
    _check_keys(obj, ("Name", "Type", "Value"), "EntityMetadata")
    return EntityMetadata(*(_str(_require(obj, k, "EntityMetadata"), k) for k in ("Name", "Type", "Value")))


def data_item_to_dict(item: DataItem) -> Dict[str, Any]:
    element: Dict[str, Any] = {"EntityID": {"Id": item.entity_id.id, "Type": item.entity_id.type}}
    if item.attribute_domain_name is not None:
        element["AttributeDomainName"] = item.attribute_domain_name
    element["EntityAttributeList"] = [
        {"Name": a.name, "Type": a.type, "EntityValue": a.value,
         "EntityMetadata": [{"Name": m.name, "Type": m.type, "Value": m.value} for m in a.metadata]}
        for a in item.attributes
    ]
    if item.domain_metadata is not None:
        element["DomainMetadata"] = [{"Name": m.name, "Type": m.type, "Value": m.value}
                                     for m in item.domain_metadata]
    return {"EntityElement": element}


def data_item_from_dict(obj: Dict[str, Any]) -> DataItem:
    _check_keys(obj, ("EntityElement",), "DataItem")
    element = _require(obj, "EntityElement", "DataItem")
    _check_keys(element, ("EntityID", "AttributeDomainName", "EntityAttributeList", "DomainMetadata"),
                "EntityElement")
    eid = _require(element, "EntityID", "EntityElement")
    _check_keys(eid, ("Id", "Type"), "EntityID")
    attrs = []
    for a in _require(element, "EntityAttributeList", "EntityElement"):
        _check_keys(a, ("Name", "Type", "EntityValue", "EntityMetadata"), "EntityAttribute")
        meta = _require(a, "EntityMetadata", "EntityAttribute")
        if not meta:
            raise TDUOParseError("EntityAttribute is missing required element 'EntityMetadata'",
                                 "EntityMetadata")
        attrs.append(EntityAttribute(
            _str(_require(a, "Name", "EntityAttribute"), "Name"),
            _str(_require(a, "Type", "EntityAttribute"), "Type"),
            _str(_require(a, "EntityValue", "EntityAttribute"), "EntityValue"),
            tuple(_metadata_from_json(m) for m in meta)))
    domain_meta = None
    if "DomainMetadata" in element:
        domain_meta = tuple(_metadata_from_json(m) for m in element["DomainMetadata"])
    domain_name = element.get("AttributeDomainName")
    try:
        return DataItem(EntityId(_str(_require(eid, "Id", "EntityID"), "Id"),
                                 _str(_require(eid, "Type", "EntityID"), "Type")),
                        tuple(attrs),
                        None if domain_name is None else _str(domain_name, "AttributeDomainName"),
                        domain_meta)
    except TDUOParseError:
        raise
    except ModelError as exc:
        raise TDUOParseError(str(exc)) from exc


def parse_data_item(document: Union[bytes, str], format: str = "xml") -> DataItem:
    if format == "xml":
        return _data_item_from_xml(_load_xml(document, "DataItem"))
    if format == "json":
        try:
            obj = json.loads(document)
        except ValueError as exc:
            raise TDUOParseError(f"malformed JSON: {exc}") from exc
        return data_item_from_dict(obj)
    raise ValueError(f"unknown format {format!r}")


def serialize_data_item(item: DataItem, format: str = "xml") -> bytes:
    if format == "xml":
        return _dump_xml(_data_item_to_xml(item))
    if format == "json":
        return json.dumps(data_item_to_dict(item), indent=2).encode() + b"\n"
    raise ValueError(f"unknown format {format!r}")


# -- UsagePolicy -----------------------------------------------------------------

_CONDITION_PARTS = (
    # (wrapper element, scope element, dimension or None for actors, Condition field)
    ("Temporality", "TemporalScope", Dimension.TEMPORAL, "temporality"),
    ("Spatiality", "SpatialScope", Dimension.SPATIAL, "spatiality"),
    ("Abstraction", "AbstractScope", Dimension.ABSTRACTION, "abstraction"),
    ("Actor", "ActorScope", None, "actor"),
    ("Purpose", "PurposeScope", Dimension.PURPOSE, "purpose"),
)


def _scope_value(name: str, scope_tag: str, dimension: Optional[Dimension]):
    if dimension is None:
        for actor in Actor:
            if actor.value == name:
                return actor
    else:
        for value, element in ELEMENT_NAMES[dimension].items():
            if element == name:
                return value
    raise TDUOParseError(f"unknown {scope_tag} value {name!r}", name)


def _condition_from_xml(el: ET.Element) -> Condition:
    _children(el, [p[0] for p in _CONDITION_PARTS])
    fields: Dict[str, list] = {}
    for wrapper, scope_tag, dim, field_name in _CONDITION_PARTS:
        values = fields.setdefault(field_name, [])
        for w in (k for k in el if k.tag == wrapper):
            for scope in _children(w, (scope_tag,)):
                for v in scope:
                    values.append(_scope_value(v.tag, scope_tag, dim))
    try:
        return Condition(**fields)
    except ModelError as exc:
        raise TDUOParseError(str(exc), "Condition") from exc


def _condition_to_xml(parent: ET.Element, cond: Condition) -> None:
    el = ET.SubElement(parent, "Condition")
    for wrapper, scope_tag, dim, field_name in _CONDITION_PARTS:
        values = getattr(cond, field_name)
        if not values:
            continue
        scope = ET.SubElement(ET.SubElement(el, wrapper), scope_tag)
        if dim is None:
            names = [a.value for a in values]
        else:
            names = [ELEMENT_NAMES[dim][v] for v in ELEMENT_ORDER[dim] if v in values]
        for n in names:
            ET.SubElement(scope, n)


def _policy_from_xml(root: ET.Element) -> UsagePolicy:
    _children(root, ("Name", "Rule"))
    name_el = _one(root, "Name")
    _children(name_el, ("URI",))
    uri = _one(name_el, "URI", required=False)
    name = (uri.text if uri is not None else name_el.text) or ""
    name = name.strip()
    if not name:
        raise TDUOParseError("<Name> of a UsagePolicy must be nonempty", "Name")
    rules = []
    for rule_el in (k for k in root if k.tag == "Rule"):
        _children(rule_el, ("Operator", "Condition"))
        op_el = _one(rule_el, "Operator")
        ops = _children(op_el, [o.value for o in DeonticOperator])
        if len(ops) != 1:
            raise TDUOParseError(f"<Operator> must set exactly one operator, found {len(ops)}",
                                 "Operator")
        operator = DeonticOperator(ops[0].tag)
        conditions = [k for k in rule_el if k.tag == "Condition"]
        if not conditions:
            raise TDUOParseError("<Rule> is missing required element <Condition>", "Condition")
        for c in conditions:
            rules.append(PolicyRule(operator, _condition_from_xml(c)))
    return UsagePolicy(name, tuple(rules))


def _policy_to_xml(policy: UsagePolicy) -> ET.Element:
    root = ET.Element("UsagePolicy")
    _sub_text(ET.SubElement(root, "Name"), "URI", policy.name)
    for rule in policy.rules:
        el = ET.SubElement(root, "Rule")
        ET.SubElement(ET.SubElement(el, "Operator"), rule.operator.value)
        _condition_to_xml(el, rule.condition)
    return root


def condition_to_dict(cond: Condition) -> Dict[str, List[str]]:
    out = {}
    for wrapper, _, dim, field_name in _CONDITION_PARTS:
        values = getattr(cond, field_name)
        if not values:
            continue
        if dim is None:
            out[wrapper] = [a.value for a in values]
        else:
            out[wrapper] = [ELEMENT_NAMES[dim][v] for v in ELEMENT_ORDER[dim] if v in values]
    return out


def condition_from_dict(obj: Dict[str, Any]) -> Condition:
    _check_keys(obj, [p[0] for p in _CONDITION_PARTS], "Condition")
    fields = {}
    for wrapper, scope_tag, dim, field_name in _CONDITION_PARTS:
        names = obj.get(wrapper, [])
        if isinstance(names, str):
            names = [names]
        values = []
        for n in names:
            n = _str(n, scope_tag)
            if dim is None:
                try:
                    values.append(Actor.parse(n))
                except ValueError:
                    raise TDUOParseError(f"unknown {scope_tag} value {n!r}", n) from None
            else:
                lookup = {e.lower(): v for v, e in ELEMENT_NAMES[dim].items()}
                lookup.update({v: v for v in dim.values})
                if n.lower() not in lookup and n not in lookup:
                    raise TDUOParseError(f"unknown {scope_tag} value {n!r}", n)
                values.append(lookup.get(n, lookup.get(n.lower())))
        fields[field_name] = values
    try:
        return Condition(**fields)
    except ModelError as exc:
        raise TDUOParseError(str(exc), "Condition") from exc


def policy_to_dict(policy: UsagePolicy) -> Dict[str, Any]:
    return {
        "Name": policy.name,
        "Rule": [{"Operator": r.operator.value, "Condition": condition_to_dict(r.condition)}
                 for r in policy.rules],
    }


def policy_from_dict(obj: Dict[str, Any]) -> UsagePolicy:
    _check_keys(obj, ("Name", "Rule"), "UsagePolicy")
    name = _str(_require(obj, "Name", "UsagePolicy"), "Name").strip()
    if not name:
        raise TDUOParseError("Name of a UsagePolicy must be nonempty", "Name")
    rules = []
    for r in obj.get("Rule", []):
        _check_keys(r, ("Operator", "Condition"), "Rule")
        op = _require(r, "Operator", "Rule")
        ops = [op] if isinstance(op, str) else list(op)
        if len(ops) != 1:
            raise TDUOParseError(f"Operator must set exactly one operator, found {len(ops)}",
                                 "Operator")
        try:
            operator = DeonticOperator(ops[0])
        except ValueError:
            raise TDUOParseError(f"unknown Operator value {ops[0]!r}", str(ops[0])) from None
        cond = _require(r, "Condition", "Rule")
        conds = cond if isinstance(cond, list) else [cond]
        if not conds:
            raise TDUOParseError("Rule is missing required element 'Condition'", "Condition")
        rules.extend(PolicyRule(operator, condition_from_dict(c)) for c in conds)
    return UsagePolicy(name, tuple(rules))


def parse_usage_policy(document: Union[bytes, str], format: str = "xml") -> UsagePolicy:
    if format == "xml":
        return _policy_from_xml(_load_xml(document, "UsagePolicy"))
    if format == "json":
        try:
            obj = json.loads(document)
        except ValueError as exc:
            raise TDUOParseError(f"malformed JSON: {exc}") from exc
        return policy_from_dict(obj)
    raise ValueError(f"unknown format {format!r}")


def serialize_usage_policy(policy: UsagePolicy, format: str = "xml") -> bytes:
    if format == "xml":
        return _dump_xml(_policy_to_xml(policy))
    if format == "json":
        return json.dumps(policy_to_dict(policy), indent=2).encode() + b"\n"
    raise ValueError(f"unknown format {format!r}")
