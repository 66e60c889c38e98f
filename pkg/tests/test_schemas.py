from fractions import Fraction

import pytest

from conftest import FIXTURES
from toriclab.core.errors import InputError
from toriclab.schemas.common import PolyhedronIO, parse_rational
from toriclab.schemas.complements import certificate_from_json, certificate_to_json
from toriclab.schemas.germs import dump_germ, load_germ
from toriclab.services.complement import local_complement
from toriclab.services.polyconv import Polyhedron
from toriclab.services.reduction import germ_reduce


@pytest.mark.parametrize(
    "value, expected",
    [(3, "3"), ("1/2", "1/2"), (" -4/6 ", "-2/3"), ("10/5", "2"), (Fraction(3, 9), "1/3")],
)
def test_parse_rational_accepts(value, expected):
    assert parse_rational(value) == expected


@pytest.mark.parametrize("value", [0.5, True, "1/0", "abc", "1.5", None, "1/-2"])
def test_parse_rational_rejects(value):
    with pytest.raises(ValueError):
        parse_rational(value)


def test_load_germ_reports_json_position():
    with pytest.raises(InputError) as exc:
        load_germ('{"N": [["1"]],\n  "fan": ')
    assert exc.value.details["line"] == 2


def test_load_germ_reports_missing_field():
    with pytest.raises(InputError) as exc:
        load_germ('{"N": [["1"]], "rays": [{"e": ["1"], "a": "1"}]}')
    assert exc.value.details["field"] == "fan"


def test_load_germ_rejects_float_coefficient():
    with pytest.raises(InputError) as exc:
        load_germ('{"N": [["1"]], "fan": [[0]], "rays": [{"e": ["1"], "a": 0.5}]}')
    assert exc.value.details["field"].startswith("rays")


def test_dump_germ_is_canonical():
    text = (FIXTURES / "germs" / "blowup_a2.json").read_text(encoding="utf-8")
    once = dump_germ(load_germ(text))
    assert dump_germ(load_germ(once)) == once
    assert once.startswith("{\n  ")


def test_polyhedron_io_is_canonical():
    p = Polyhedron.from_vrep([(0, 0), (1, 0), (0, 1), (Fraction(1, 4), Fraction(1, 4))])
    dumped = PolyhedronIO.from_domain(p)
    assert len(dumped.vertices) == 3
    assert dumped.to_domain() == p


def test_complement_certificate_json(p1xa1):
    cert = local_complement(p1xa1, 1)
    data = certificate_to_json(cert)
    assert data["kind"] == "complement"
    assert data["characters"] == [["0", "-1"]]
    kind, back = certificate_from_json(data)
    assert kind == "complement"
    assert back == cert


def test_reduction_certificate_json(p1xa1):
    cert = germ_reduce(p1xa1, 1)
    kind, back = certificate_from_json(certificate_to_json(cert))
    assert kind == "reduction"
    assert back.u_prime == cert.u_prime
    assert back.phi.matrix == cert.phi.matrix


def test_certificate_from_json_errors(p1xa1):
    with pytest.raises(InputError):
        certificate_from_json('{"kind": ')
    with pytest.raises(InputError) as exc:
        certificate_from_json({"kind": "proof"})
    assert exc.value.details["kind"] == "proof"
    data = certificate_to_json(local_complement(p1xa1, 1))
    data["n"] = 0
    with pytest.raises(InputError) as exc:
        certificate_from_json(data)
    assert exc.value.details["field"] == "n"


def test_certificate_to_json_rejects_other_objects():
    with pytest.raises(TypeError):
        certificate_to_json(object())
