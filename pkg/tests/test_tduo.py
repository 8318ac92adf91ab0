from __future__ import annotations

import io
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from lxml import etree

from gen import random_data_item, random_policy
from tdu.scenario import MUNICIPAL_POLICY, POLICIES
from tdu.tduo import (ANY, TDUO_DTD, Actor, Condition, DataItem, DeonticOperator, Dimension,
                      EntityAttribute, EntityId, EntityMetadata, ModelError, PolicyRule,
                      TDUOParseError, UsagePolicy, coarser_levels, parse_data_item,
                      parse_usage_policy, serialize_data_item, serialize_usage_policy, subsumes)

DTD = etree.DTD(io.StringIO(TDUO_DTD))

SENSOR_XML = b"""<?xml version="1.0"?>
<DataItem>
  <EntityElement>
    <EntityID><Id>sensor-1</Id><Type>AirQualitySensor</Type></EntityID>
    <EntityAttributeList>
      <EntityAttribute>
        <Name>co2</Name><Type>Number</Type><EntityValue>412</EntityValue>
        <EntityMetadata><Name>unit</Name><Type>string</Type><Value>ppm</Value></EntityMetadata>
      </EntityAttribute>
    </EntityAttributeList>
  </EntityElement>
</DataItem>
"""

MA_XML = b"""<UsagePolicy>
  <Name><URI>urn:tdu:policy:municipal-authority</URI></Name>
  <Rule>
    <Operator><Permission/></Operator>
    <Condition>
      <Temporality><TemporalScope><Hourly/></TemporalScope></Temporality>
      <Spatiality><SpatialScope><Street/></SpatialScope></Spatiality>
      <Abstraction><AbstractScope><Aggregation/></AbstractScope></Abstraction>
      <Actor><ActorScope><MunicipalAuthority/></ActorScope></Actor>
    </Condition>
  </Rule>
</UsagePolicy>"""


def valid(document: bytes) -> bool:
    return DTD.validate(etree.fromstring(document))


def order_oracle(granted: str, requested: str, chain) -> bool:
    """Reference relation built from the chain as explicit pairs (i <= j)."""
    pairs = {(a, b) for i, a in enumerate(chain) for b in chain[i:]}
    pairs |= {(ANY, v) for v in chain + (ANY,)}
    return (granted, requested) in pairs


# -- scopes ------------------------------------------------------------------------

class TestSubsumes:
    @pytest.mark.parametrize("g,r,dim,expected", [
        ("hourly", "daily", Dimension.TEMPORAL, True),
        ("zone", "street", Dimension.SPATIAL, False),
        ("any", "secondly", Dimension.TEMPORAL, True),
        ("aggregation", "statistic", Dimension.ABSTRACTION, True),
        ("statistic", "aggregation", Dimension.ABSTRACTION, False),
        ("commercial_use", "commercial_use", Dimension.PURPOSE, True),
        ("commercial_use", "any", Dimension.PURPOSE, False),
    ])
    def test_examples(self, g, r, dim, expected):
        assert subsumes(g, r, dim) is expected

    @pytest.mark.parametrize("dim,size", [(Dimension.TEMPORAL, 8), (Dimension.SPATIAL, 3),
                                          (Dimension.ABSTRACTION, 4)])
    def test_exhaustive_table(self, dim, size):
        assert len(dim.values) == size
        for g, r in itertools.product(dim.values, repeat=2):
            assert subsumes(g, r, dim) == order_oracle(g, r, dim.levels), (g, r)

    @pytest.mark.parametrize("dim", list(Dimension))
    def test_order_laws(self, dim):
        vals = dim.values
        for v in vals:
            assert subsumes(v, v, dim)
            assert subsumes(ANY, v, dim)
            if v != ANY:
                assert not subsumes(v, ANY, dim)
        for a, b, c in itertools.product(vals, repeat=3):
            if subsumes(a, b, dim) and subsumes(b, c, dim):
                assert subsumes(a, c, dim)

    def test_mismatch_rejected(self):
        with pytest.raises(ValueError, match="zone"):
            subsumes("zone", "hourly", Dimension.TEMPORAL)

    def test_coarser_levels(self):
        assert coarser_levels("weekly", Dimension.TEMPORAL) == ("monthly", "yearly")
        assert coarser_levels("zone", Dimension.SPATIAL) == ()
        assert coarser_levels("commercial_use", Dimension.PURPOSE) == ()

    def test_actor_parse(self):
        assert Actor.parse("CO") is Actor.COMMERCIAL_OPERATOR
        assert Actor.parse("municipalauthority") is Actor.MUNICIPAL_AUTHORITY
        with pytest.raises(ValueError):
            Actor.parse("Mayor")


# -- model ---------------------------------------------------------------------------

class TestModel:
    def test_entity_id_nonempty(self):
        with pytest.raises(ModelError, match="EntityID"):
            EntityId("", "T")

    def test_attribute_needs_metadata(self):
        with pytest.raises(ModelError, match="EntityMetadata"):
            EntityAttribute("co2", "Number", "1", ())

    def test_condition_needs_a_field(self):
        with pytest.raises(ModelError, match="at least one"):
            Condition()

    def test_condition_rejects_unknown_value(self):
        with pytest.raises(ModelError, match="'block'"):
            Condition(spatiality=("block",))

    def test_condition_canonical_order(self):
        c = Condition(temporality=("yearly", "hourly", "hourly"))
        assert c.temporality == ("hourly", "yearly")

    def test_policy_name_nonempty(self):
        with pytest.raises(ModelError):
            UsagePolicy("")

    def test_mentions(self):
        assert MUNICIPAL_POLICY.mentions(Dimension.SPATIAL)
        assert not MUNICIPAL_POLICY.mentions(Dimension.PURPOSE)


# -- codec -----------------------------------------------------------------------------

class TestDataItemCodec:
    def test_sensor_example(self):
        assert valid(SENSOR_XML)
        item = parse_data_item(SENSOR_XML)
        assert item.entity_id == EntityId("sensor-1", "AirQualitySensor")
        assert len(item.attributes) == 1
        assert item.attribute("co2").value == "412"

    def test_missing_entity_id_named(self):
        doc = SENSOR_XML.replace(b"<EntityID><Id>sensor-1</Id><Type>AirQualitySensor</Type>"
                                 b"</EntityID>", b"")
        assert not valid(doc)
        with pytest.raises(TDUOParseError, match="EntityID") as err:
            parse_data_item(doc)
        assert err.value.element == "EntityID"

    def test_unknown_element_named(self):
        doc = SENSOR_XML.replace(b"<EntityAttributeList>", b"<Bogus/><EntityAttributeList>")
        with pytest.raises(TDUOParseError, match="Bogus"):
            parse_data_item(doc)

    def test_malformed(self):
        with pytest.raises(TDUOParseError, match="malformed"):
            parse_data_item(b"<DataItem>")
        with pytest.raises(TDUOParseError, match="malformed"):
            parse_data_item(b"{", "json")

    def test_serialized_output_is_dtd_valid(self):
        item = parse_data_item(SENSOR_XML)
        out = serialize_data_item(item)
        assert valid(out)
        assert parse_data_item(out) == item
        assert parse_data_item(serialize_data_item(item, "json"), "json") == item

    def test_domain_metadata(self):
        item = DataItem(EntityId("a", "b"), (), "air",
                        (EntityMetadata("usagePolicy", "URI", "urn:x"),))
        out = serialize_data_item(item)
        assert valid(out)
        assert parse_data_item(out) == item

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip(self, seed):
        item = random_data_item(random.Random(seed))
        xml = serialize_data_item(item)
        assert valid(xml)
        assert parse_data_item(xml) == item
        assert parse_data_item(serialize_data_item(item, "json"), "json") == item


class TestPolicyCodec:
    def test_municipal_document(self):
        assert valid(MA_XML)
        p = parse_usage_policy(MA_XML)
        assert p == MUNICIPAL_POLICY
        assert len(p.rules) == 1

    def test_zero_rules(self):
        doc = b"<UsagePolicy><Name><URI>urn:empty</URI></Name></UsagePolicy>"
        assert valid(doc)
        assert parse_usage_policy(doc).rules == ()

    def test_statistic_accepted(self):
        doc = MA_XML.replace(b"<Aggregation/>", b"<Statistic/>")
        assert valid(doc)
        assert parse_usage_policy(doc).rules[0].condition.abstraction == ("statistic",)

    def test_two_operators_rejected(self):
        doc = MA_XML.replace(b"<Permission/>", b"<Permission/><Forbidden/>")
        with pytest.raises(TDUOParseError, match="exactly one"):
            parse_usage_policy(doc)

    def test_unknown_scope_value_named(self):
        doc = MA_XML.replace(b"<Street/>", b"<Block/>")
        with pytest.raises(TDUOParseError, match="Block") as err:
            parse_usage_policy(doc)
        assert err.value.element == "Block"
        with pytest.raises(TDUOParseError, match="Block"):
            parse_usage_policy(b'{"Name": "urn:x", "Rule": [{"Operator": "Permission", '
                               b'"Condition": {"Spatiality": ["Block"]}}]}', "json")

    def test_rules_in_document_order(self):
        p = UsagePolicy("urn:o", (
            PolicyRule(DeonticOperator.FORBIDDEN, Condition(purpose=("commercial_use",))),
            PolicyRule(DeonticOperator.PERMISSION, Condition(actor=(Actor.DATA_OWNER,))),
        ))
        assert parse_usage_policy(serialize_usage_policy(p)).rules == p.rules

    @pytest.mark.parametrize("policy", POLICIES, ids=lambda p: p.name)
    def test_scenario_documents_valid(self, policy):
        xml = serialize_usage_policy(policy)
        assert valid(xml)
        assert parse_usage_policy(xml) == policy
        assert parse_usage_policy(serialize_usage_policy(policy, "json"), "json") == policy

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip(self, seed):
        policy = random_policy(random.Random(seed))
        xml = serialize_usage_policy(policy)
        assert valid(xml)
        assert parse_usage_policy(xml) == policy
        assert parse_usage_policy(serialize_usage_policy(policy, "json"), "json") == policy
