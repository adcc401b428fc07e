import json

import pytest

from gencrf import catalog
from gencrf.checks import run_check, sample_points
from gencrf.definition import CHECK_NAMES, parse_definition

REQUIRED = ("nirenberg-holo", "nirenberg-antiholo", "crfk-torus", "sasaki-r3", "warped-r3")


def test_names_and_unknown():
    names = catalog.names()
    assert all(n in names for n in REQUIRED)
    assert len(names) == len(set(names))
    with pytest.raises(KeyError):
        catalog.get("no-such-fixture")


@pytest.mark.parametrize("name", catalog.names())
def test_fixture_matches_expectations(name):
    for rep, expected in catalog.run(name):
        assert rep.passed == expected, rep.line()
        # every cross-checked check must agree with its second formulation
        assert rep.details.get("agree", True), rep.line()


@pytest.mark.parametrize("name", catalog.names())
def test_export_preserves_verdicts(name):
    fx = catalog.get(name)
    d = parse_definition(json.loads(catalog.export(name)))
    d = d.with_settings(samples=40)
    pts = sample_points(d)
    for check in d.checks:
        assert check in CHECK_NAMES
        assert run_check(d, check, pts).passed == fx.expected[check], check
