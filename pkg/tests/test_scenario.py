import json

import pytest

from solitonlab.scenario import SchemaError, load_scenario, scenario_from_dict

from conftest import SCENARIO_DIR


def minimal(**extra):
    doc = {"metric": {"catalog": "minkowski"}, "points": [[0.0, 0.0, 0.0, 0.0]]}
    doc.update(extra)
    return doc


class TestLoad:
    def test_shipped_de_sitter_fixture(self):
        sc = load_scenario(SCENARIO_DIR / "de-sitter-soliton.json")
        assert sc.data["metric"] == {"catalog": "de_sitter", "hubble": 1.0}
        assert sc.soliton is not None and sc.soliton.family == "conformal_ricci_yamabe"
        assert len(sc.points) == 3
        assert "torse" in sc.assertions

    def test_all_fixtures_load(self):
        for path in sorted(SCENARIO_DIR.glob("*.json")):
            sc = load_scenario(path)
            assert len(sc.points) >= 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_scenario(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_scenario(bad)


class TestValidation:
    def test_unknown_top_level_key(self):
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(minimal(dimension=3))
        assert "dimension" in str(err.value)

    def test_wrong_coordinate_count(self):
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(minimal(coordinates=["t", "x", "y"]))
        assert err.value.location == "/coordinates"

    def test_duplicate_coordinates(self):
        with pytest.raises(SchemaError):
            scenario_from_dict(minimal(coordinates=["t", "t", "y", "z"]))

    def test_bad_expression_has_location(self):
        doc = minimal()
        doc["metric"] = {
            "components": [
                ["-1", "0", "0", "0"],
                ["0", "ex(2*t)", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "1"],
            ]
        }
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(doc)
        assert err.value.location == "/metric/components/1/1"
        assert "offset 0" in err.value.message

    def test_asymmetric_components_rejected(self):
        doc = minimal()
        doc["metric"] = {
            "components": [
                ["-1", "t", "0", "0"],
                ["0", "1", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "1"],
            ]
        }
        with pytest.raises(SchemaError):
            scenario_from_dict(doc)

    def test_unknown_catalog(self):
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(minimal(metric={"catalog": "kerr"}))
        assert err.value.location == "/metric/catalog"

    def test_unknown_nested_key(self):
        with pytest.raises(SchemaError):
            scenario_from_dict(minimal(numerics={"h": 1e-3, "order": 4}))

    def test_no_points(self):
        doc = {"metric": {"catalog": "minkowski"}}
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(doc)
        assert "at least one point" in err.value.message

    def test_point_dimension(self):
        with pytest.raises(SchemaError):
            scenario_from_dict(minimal(points=[[0.0, 0.0]]))

    def test_negative_kappa(self):
        doc = minimal(fluid={"sigma": 0, "rho": 0, "kappa": -1.0, "cosmological_constant": 0})
        with pytest.raises(SchemaError):
            scenario_from_dict(doc)

    def test_mu_outside_eta_family(self):
        doc = minimal(
            vector_field={"components": [1, 0, 0, 0]},
            soliton={"family": "ricci_yamabe", "mu": 1.0},
        )
        with pytest.raises(SchemaError):
            scenario_from_dict(doc)

    def test_assert_residual_needs_lambda(self):
        doc = minimal(
            vector_field={"components": [1, 0, 0, 0]},
            soliton={"family": "ricci_yamabe", "assert_residual": True},
        )
        with pytest.raises(SchemaError):
            scenario_from_dict(doc)

    def test_unknown_assertion_group(self):
        with pytest.raises(SchemaError):
            scenario_from_dict(minimal(assertions=["everything"]))

    def test_fluid_expression_time_only(self):
        doc = minimal(fluid={"sigma": "3*x", "rho": 0, "kappa": 1.0, "cosmological_constant": 0})
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(doc)
        assert "only" in err.value.message

    def test_fit_needs_vector_field(self):
        doc = minimal(fluid={"fit_from_ricci": {"kappa": 1.0, "cosmological_constant": 0.0}})
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(doc)
        assert err.value.location == "/fluid"

    def test_soliton_needs_vector_field(self):
        doc = minimal(soliton={"family": "ricci_yamabe"})
        with pytest.raises(SchemaError) as err:
            scenario_from_dict(doc)
        assert err.value.location == "/soliton"

    def test_gradient_family_needs_gradient_field(self):
        doc = minimal(
            vector_field={"components": [1, 0, 0, 0]},
            soliton={"family": "gradient_ricci_yamabe"},
        )
        with pytest.raises(SchemaError):
            scenario_from_dict(doc)
        ok = minimal(
            vector_field={"gradient": "t"},
            soliton={"family": "gradient_ricci_yamabe"},
        )
        assert scenario_from_dict(ok).soliton.family == "gradient_ricci_yamabe"


class TestPlan:
    def test_grid_product(self):
        doc = minimal()
        del doc["points"]
        doc["grid"] = {"t": [0.5, 1.0], "x": {"start": -1.0, "stop": 1.0, "count": 3}}
        sc = scenario_from_dict(doc)
        assert len(sc.points) == 6
        assert sc.points[0] == (0.5, -1.0, 0.0, 0.0)

    def test_points_and_grid_combined(self):
        doc = minimal(grid={"t": [2.0]})
        sc = scenario_from_dict(doc)
        assert len(sc.points) == 2

    def test_bad_grid_coordinate(self):
        with pytest.raises(SchemaError):
            scenario_from_dict(minimal(grid={"w": [1.0]}))


class TestRoundTrip:
    def test_normalised_document_round_trips(self):
        for path in sorted(SCENARIO_DIR.glob("*.json")):
            sc = load_scenario(path)
            again = scenario_from_dict(sc.to_dict())
            assert again == sc
            assert again.to_dict() == sc.to_dict()

    def test_normalisation_is_stable(self):
        doc = minimal(
            vector_field={"components": [1, 0, 0, 0]},
            fluid={"sigma": 0.0, "rho": 0.0, "kappa": 1.0, "cosmological_constant": 0.0},
            soliton={"family": "conformal_ricci_yamabe"},
        )
        sc = scenario_from_dict(doc)
        assert json.dumps(sc.to_dict()) == json.dumps(scenario_from_dict(sc.to_dict()).to_dict())
