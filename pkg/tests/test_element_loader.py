"""
Tests for reading and writing element and function JSON files.
"""

import json

import numpy as np
import pytest

from src.crossed_algebra import unit_element
from src.element_loader import (
    dumps,
    element_from_dict,
    element_to_dict,
    load_element,
    load_torus_function,
    save_element,
    save_torus_function,
    torus_function_from_dict,
)
from src.errors import ParseError
from src.torus_function import TorusFunction


def same_element(F, G):
    if F.theta != G.theta or F.weight != G.weight or F.support != G.support:
        return False
    return all(F.terms[n].equals(G.terms[n]) for n in F.support)


def u3_dict(theta=0.6180339887498949, sigma=2.718281828459045):
    return {
        "theta": theta,
        "sigma": sigma,
        "terms": [{"n": 3, "fn": {"coeffs": [{"k": 0, "re": 1.0, "im": 0.0}]}}],
    }


class TestRoundTrip:

    def test_element_exact(self, rng, make_element, tmp_path):
        F = make_element(rng)
        path = tmp_path / "element.json"
        save_element(F, str(path), meta={"id": "random"})
        G, meta = load_element(str(path))
        assert same_element(F, G)
        assert meta == {"id": "random"}

    def test_function_exact(self, tmp_path):
        phi = TorusFunction.from_coeffs({-2: 0.1 + 0.2j, 0: 1 / 3, 5: -7e-3})
        path = tmp_path / "phi.json"
        save_torus_function(phi, str(path))
        assert load_torus_function(str(path)).equals(phi)

    def test_serialization_is_stable(self, rng, make_element):
        F = make_element(rng)
        text = dumps(element_to_dict(F))
        G, _ = element_from_dict(json.loads(text))
        assert dumps(element_to_dict(G)) == text
        assert text.endswith("\n") and "\r" not in text

    def test_tiny_coefficients_are_kept(self):
        phi = torus_function_from_dict({"coeffs": [{"k": 0, "re": 1.0, "im": 0.0}, {"k": 1, "re": 1e-20, "im": 0.0}]})
        assert phi.coefficient(1) == 1e-20


class TestElementFields:

    def test_u3(self):
        F, meta = element_from_dict(u3_dict())
        assert F.support == [3]
        assert meta == {}

    def test_convergents_from_file(self):
        data = u3_dict()
        data["convergents"] = ["1/2", "2/3", "3/5"]
        F, _ = element_from_dict(data)
        assert F.theta.convergents == ((1, 2), (2, 3), (3, 5))

    def test_convergents_override(self):
        F, _ = element_from_dict(u3_dict(), convergents=["3/5", "5/8"])
        assert F.theta.convergents == ((3, 5), (5, 8))

    def test_zero_terms_dropped(self):
        data = u3_dict()
        data["terms"].insert(0, {"n": 1, "fn": {"coeffs": []}})
        F, _ = element_from_dict(data)
        assert F.support == [3]

    def test_matches_unit(self, theta, weight):
        F, _ = element_from_dict(u3_dict(theta.theta, weight.sigma))
        assert same_element(F, unit_element(theta, weight, 3))


class TestParseErrors:

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_element(str(tmp_path / "absent.json"))

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "theta": 0.5,\n  "sigma": ,\n}\n', encoding="utf-8")
        with pytest.raises(ParseError) as info:
            load_element(str(path))
        assert info.value.line == 3
        assert "line 3" in str(info.value)

    @pytest.mark.parametrize("key", ["theta", "sigma", "terms"])
    def test_missing_top_level(self, key):
        data = u3_dict()
        del data[key]
        with pytest.raises(ParseError) as info:
            element_from_dict(data)
        assert info.value.field == "<root>"

    def test_wrong_type_has_field_path(self):
        data = u3_dict()
        data["terms"][0]["fn"]["coeffs"][0]["re"] = "one"
        with pytest.raises(ParseError) as info:
            element_from_dict(data)
        assert info.value.field == "terms[0].fn.coeffs[0].re"

    def test_boolean_rejected(self):
        data = u3_dict()
        data["terms"][0]["n"] = True
        with pytest.raises(ParseError) as info:
            element_from_dict(data)
        assert info.value.field == "terms[0].n"

    def test_fractional_index(self):
        with pytest.raises(ParseError) as info:
            torus_function_from_dict({"coeffs": [{"k": 0.5, "re": 1.0, "im": 0.0}]})
        assert info.value.field == "coeffs[0].k"

    @pytest.mark.parametrize("ks", [[1, 0], [2, 2]])
    def test_unsorted_or_duplicate_k(self, ks):
        data = {"coeffs": [{"k": k, "re": 1.0, "im": 0.0} for k in ks]}
        with pytest.raises(ParseError) as info:
            torus_function_from_dict(data)
        assert info.value.field == "coeffs[1].k"

    def test_unsorted_n(self):
        data = u3_dict()
        data["terms"].append({"n": -1, "fn": {"coeffs": [{"k": 0, "re": 1.0, "im": 0.0}]}})
        with pytest.raises(ParseError) as info:
            element_from_dict(data)
        assert info.value.field == "terms[1].n"

    def test_theta_out_of_range(self):
        with pytest.raises(ParseError):
            element_from_dict(u3_dict(theta=1.5))

    def test_sigma_below_one(self):
        with pytest.raises(ParseError):
            element_from_dict(u3_dict(sigma=0.5))

    def test_non_finite(self):
        with pytest.raises(ParseError):
            torus_function_from_dict({"coeffs": [{"k": 0, "re": float("inf"), "im": 0.0}]})

    def test_non_finite_not_serialized(self):
        with pytest.raises(ValueError):
            dumps({"x": np.nan})
