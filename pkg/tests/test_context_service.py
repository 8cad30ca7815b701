import math

import pytest
from hypothesis import given, settings, strategies as st

from core.exceptions import ContractViolation
from models.asset_model import Snapshot, StructuralSignals
from models.context_model import ALPHA_PRESETS, ContextIndex, ContextVector, CriterionWeights, ModulationConfig
from models.criteria_model import NOT_APPLICABLE, CriterionFamily, CriterionId, criteria_in, labels_for
from services.context_service import ContextService, global_peers, percentile_normalize
from conftest import assessment, make_asset

unit = st.floats(0, 1)


class TestPercentileNormalize:
    def test_midrank(self):
        result = percentile_normalize([("a", 1), ("b", 2), ("c", 3), ("d", 4)])
        assert result["c"] == pytest.approx(0.625)

    def test_full_tie(self):
        result = percentile_normalize([("a", 5), ("b", 5), ("c", 5)])
        assert set(result.values()) == {0.5}

    def test_singleton(self):
        assert percentile_normalize([("a", 7)]) == {"a": 0.5}

    def test_empty(self):
        assert percentile_normalize([]) == {}

    def test_groups_are_ranked_separately(self):
        groups = {"a": "x", "b": "x", "c": "y"}
        result = percentile_normalize([("a", 1), ("b", 9), ("c", 100)], peer_key=groups.get)
        assert result == {"a": 0.25, "b": 0.75, "c": 0.5}

    def test_negative_raw_value(self):
        with pytest.raises(ContractViolation):
            percentile_normalize([("a", -1.0)])

    @settings(max_examples=200)
    @given(st.lists(st.floats(0, 1e6), min_size=1, max_size=40))
    def test_matches_counting_definition(self, raws):
        values = [(f"a{i}", raw) for i, raw in enumerate(raws)]
        result = percentile_normalize(values)
        for asset_id, raw in values:
            less = sum(1 for r in raws if r < raw)
            equal = sum(1 for r in raws if r == raw)
            assert result[asset_id] == pytest.approx((less + 0.5 * equal) / len(raws), abs=1e-12)
            assert 0.0 < result[asset_id] < 1.0


class TestSoftMaxCriteria:
    def test_regulated_data_forces_one(self):
        assert ContextService().soft_max_criteria([assessment("data_type", "regulated")]) == 1.0

    def test_equal_weight_bfc(self):
        value = ContextService().soft_max_criteria([
            assessment("environment", "development"),
            assessment("functional_role", "auxiliary"),
        ])
        assert value == pytest.approx(1 - math.sqrt(0.56), abs=1e-12)
        assert value == pytest.approx(0.25167, abs=1e-5)

    def test_equal_weight_dc(self):
        value = ContextService().soft_max_criteria([
            assessment("data_type", "internal"),
            assessment("access_exposure", "restricted"),
        ])
        assert value == pytest.approx(0.40839, abs=1e-5)

    def test_mixed_families(self):
        with pytest.raises(ContractViolation, match="more than one family"):
            ContextService().soft_max_criteria([
                assessment("environment", "production"),
                assessment("data_type", "low"),
            ])

    def test_family_mismatch_with_expected(self):
        with pytest.raises(ContractViolation):
            ContextService().soft_max_criteria([assessment("data_type", "low")], CriterionFamily.BFC)

    def test_not_applicable_is_excluded(self):
        service = ContextService()
        base = [assessment("data_type", "internal"), assessment("access_exposure", "restricted")]
        with_na = base + [assessment("data_freshness", NOT_APPLICABLE)]
        assert service.soft_max_criteria(with_na) == service.soft_max_criteria(base)

    def test_low_confidence_is_excluded(self):
        service = ContextService()
        value = service.soft_max_criteria([
            assessment("environment", "development"),
            assessment("functional_role", "core_business_function", confidence=0.4),
        ])
        assert value == pytest.approx(0.3)

    def test_nothing_usable(self):
        assert ContextService().soft_max_criteria([]) is None
        assert ContextService().soft_max_criteria([assessment("data_type", NOT_APPLICABLE)]) is None

    def test_unknown_data_type_pulls_down(self):
        value = ContextService().soft_max_criteria([
            assessment("data_type", "unknown"),
            assessment("access_exposure", "broad"),
        ])
        assert value == 1.0
        value = ContextService().soft_max_criteria([
            assessment("data_type", "unknown"),
            assessment("access_exposure", "moderate"),
        ])
        assert value == pytest.approx(1 - math.sqrt(0.4))

    def test_custom_weights(self):
        weights = CriterionWeights(weights={"environment": 3.0})
        value = ContextService(weights).soft_max_criteria([
            assessment("environment", "development"),
            assessment("functional_role", "auxiliary"),
        ])
        assert value == pytest.approx(1 - 0.7 ** 0.75 * 0.8 ** 0.25)

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            CriterionWeights(weights={"environment": 0.0})

    @settings(max_examples=200)
    @given(st.sampled_from(["development", "pre_production", "production"]),
           st.sampled_from(["auxiliary", "internal_support", "customer_facing_support"]))
    def test_monotone_in_each_label(self, environment, role):
        service = ContextService()
        lower = service.soft_max_criteria([assessment("environment", environment), assessment("functional_role", role)])
        higher = service.soft_max_criteria([
            assessment("environment", environment),
            assessment("functional_role", "core_business_function"),
        ])
        assert lower <= higher


class TestCriticalityIndex:
    def test_worked_example(self):
        index = ContextService.criticality_index(ContextVector(v_anom=0.80, v_blast=0.70, v_bfc=0.74, v_dc=0.68))
        assert index.k == 4
        assert index.index == pytest.approx(0.734, abs=5e-3)

    def test_single_component_is_identity(self):
        assert ContextService.criticality_index(ContextVector(v_bfc=0.6)) == ContextIndex(index=0.6, k=1)

    def test_all_zero(self):
        assert ContextService.criticality_index(ContextVector(v_anom=0.0, v_dc=0.0)).index == 0.0

    def test_no_context(self):
        assert ContextService.criticality_index(ContextVector()) == ContextIndex(index=0.5, k=0)

    @settings(max_examples=200)
    @given(st.lists(unit, min_size=1, max_size=4), st.randoms(use_true_random=False))
    def test_symmetric(self, values, random):
        fields = ["v_anom", "v_blast", "v_bfc", "v_dc"]
        shuffled = list(values)
        random.shuffle(shuffled)
        a = ContextService.criticality_index(ContextVector(**dict(zip(fields, values))))
        b = ContextService.criticality_index(ContextVector(**dict(zip(fields, shuffled))))
        assert a.k == b.k == len(values)
        assert a.index == pytest.approx(b.index, abs=1e-12)

    @settings(max_examples=200)
    @given(unit, unit, unit)
    def test_monotone(self, fixed, low, high):
        low, high = sorted((low, high))
        a = ContextService.criticality_index(ContextVector(v_anom=fixed, v_dc=low)).index
        b = ContextService.criticality_index(ContextVector(v_anom=fixed, v_dc=high)).index
        assert a <= b + 1e-12


class TestModulationMultiplier:
    def test_worked_example(self):
        service = ContextService(modulation=ModulationConfig(alpha=0.3))
        assert service.modulation_multiplier(ContextIndex(index=0.73, k=4)) == pytest.approx(1.138, abs=1e-9)

    @pytest.mark.parametrize("alpha", ALPHA_PRESETS.values())
    def test_neutral_point(self, alpha):
        service = ContextService(modulation=ModulationConfig(alpha=alpha))
        assert service.modulation_multiplier(ContextIndex(index=0.5, k=2)) == 1.0

    def test_lower_bound(self):
        service = ContextService(modulation=ModulationConfig(alpha=0.2))
        assert service.modulation_multiplier(ContextIndex(index=0.0, k=1)) == pytest.approx(0.8)

    def test_no_context_is_neutral(self):
        service = ContextService(modulation=ModulationConfig(alpha=0.4))
        assert service.modulation_multiplier(ContextIndex(index=0.0, k=0)) == 1.0

    def test_alpha_override(self):
        service = ContextService(modulation=ModulationConfig(alpha=0.2))
        assert service.modulation_multiplier(ContextIndex(index=1.0, k=1), alpha=0.4) == pytest.approx(1.4)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError):
            ModulationConfig(alpha=alpha)

    @settings(max_examples=300)
    @given(unit, unit, st.floats(0.01, 0.99))
    def test_bounded_and_monotone(self, c1, c2, alpha):
        service = ContextService(modulation=ModulationConfig(alpha=alpha))
        low, high = sorted((c1, c2))
        m_low = service.modulation_multiplier(ContextIndex(index=low, k=1))
        m_high = service.modulation_multiplier(ContextIndex(index=high, k=1))
        assert 1 - alpha - 1e-12 <= m_low <= m_high <= 1 + alpha + 1e-12


class TestStructuralNormalization:
    def test_raw_values_ranked_within_vendor_and_type(self):
        snapshot = Snapshot(snapshot_id="s", assets=(
            make_asset("a", structural={"anomaly_raw": 1.0}),
            make_asset("b", structural={"anomaly_raw": 3.0}),
            make_asset("c", asset_type="iam_role", structural={"anomaly_raw": 50.0}),
        ))
        resolved = ContextService().normalize_structural(snapshot)
        assert resolved == {"a": (0.25, None), "b": (0.75, None), "c": (0.5, None)}

    def test_global_blast_grouping(self):
        snapshot = Snapshot(snapshot_id="s", assets=(
            make_asset("a", structural={"blast_raw": 1.0}),
            make_asset("b", asset_type="iam_role", structural={"blast_raw": 3.0}),
        ))
        resolved = ContextService(blast_peer_key=global_peers).normalize_structural(snapshot)
        assert resolved["a"][1] == 0.25
        assert resolved["b"][1] == 0.75

    def test_precomputed_percentile_wins(self):
        structural = StructuralSignals(anomaly_raw=10.0, anomaly_percentile=0.9)
        snapshot = Snapshot(snapshot_id="s", assets=(make_asset("a", structural=structural),))
        assert ContextService().normalize_structural(snapshot)["a"] == (0.9, None)

    def test_context_vector_omits_missing_components(self):
        asset = make_asset("a", bfc=[assessment("environment", "production")])
        vector = ContextService().context_vector(asset)
        assert vector == ContextVector(v_bfc=1.0)
        assert vector.components() == [1.0]


def labelled(family: CriterionFamily):
    """Assessments for a distinct subset of one family's criteria, with drawn labels and confidences."""
    return st.lists(st.sampled_from(criteria_in(family)), unique=True, max_size=6).flatmap(
        lambda criteria: st.tuples(*[
            st.builds(
                assessment,
                st.just(c.value),
                st.sampled_from(labels_for(c)),
                st.floats(0, 1),
            )
            for c in criteria
        ]).map(list)
    )


class TestNotApplicableInvariance:
    @settings(max_examples=1000)
    @given(
        labelled(CriterionFamily.BFC),
        labelled(CriterionFamily.DC),
        st.sampled_from(criteria_in(CriterionFamily.BFC)),
        st.sampled_from(criteria_in(CriterionFamily.DC)),
        st.dictionaries(st.sampled_from([c.value for c in CriterionId]), st.floats(0.1, 10), max_size=11),
    )
    def test_adding_not_applicable_leaves_components_unchanged(self, bfc, dc, extra_bfc, extra_dc, weights):
        """Property: an N/A criterion never moves v_bfc or v_dc."""
        service = ContextService(CriterionWeights(weights=weights))
        before = service.context_vector(make_asset("a", bfc=bfc, dc=dc))
        after = service.context_vector(make_asset(
            "a",
            bfc=bfc + [assessment(extra_bfc.value, NOT_APPLICABLE)],
            dc=dc + [assessment(extra_dc.value, NOT_APPLICABLE)],
        ))
        assert after.v_bfc == before.v_bfc
        assert after.v_dc == before.v_dc
