from fractions import Fraction

import pytest

from conftest import load_fixture
from toriclab.core.errors import BoxTooLarge, CapTooSmall, NoInteriorLatticePoint
from toriclab.core.limits import use_caps
from toriclab.services.exact_lattice import Lattice, vec
from toriclab.services.oracle import (
    ScanPredicate,
    bounding_box,
    oracle_gamma,
    oracle_lattice_scan,
    oracle_mld,
    replay,
)
from toriclab.services.polyconv import Polyhedron, lattice_points, pikhurko_constant
from toriclab.services.toric_germ import mld_fiber

F = Fraction
U_P1A1 = Polyhedron.from_vrep([(0, 0), (1, 0), (0, 1), (-1, 0)])
SIMPLEX = Polyhedron.from_vrep([(0, 0), (1, 0), (0, 1)])
HALF_LATTICE = Lattice.from_generators([vec(1, 0), vec(0, 1), vec(F(1, 2), F(1, 2))], 2)


def scan(lat: Lattice, p: Polyhedron, kind: str):
    box = bounding_box(lat, p.vertices)
    return oracle_lattice_scan(lat, box, ScanPredicate(kind, p.inequalities))


# ============================================================
# SCAN
# ============================================================

def test_scan_interior_of_3u():
    record = scan(Lattice.standard(2), U_P1A1.scale(3), "interior")
    assert len(record.hits) == 4
    assert list(record.hits) == lattice_points(Lattice.standard(2), U_P1A1.scale(3), "interior")
    assert replay(record)


def test_scan_open_interval_without_integer():
    record = oracle_lattice_scan(
        Lattice.standard(1), ((-10, 10),), ScanPredicate("interior", Polyhedron.interval(0, 1).inequalities)
    )
    assert record.hits == ()
    assert record.cells == 21


def test_scan_half_lattice_simplex():
    record = scan(HALF_LATTICE, SIMPLEX, "closure")
    assert len(record.hits) == 4
    assert (F(1, 2), F(1, 2)) in record.hits


def test_scan_primitive():
    record = oracle_lattice_scan(Lattice.standard(1), ((0, 2),), ScanPredicate("primitive"))
    assert record.hits == ((1,),)


def test_replay_detects_tampering():
    record = scan(Lattice.standard(2), U_P1A1.scale(3), "interior")
    tampered = type(record)(record.box, record.lattice, record.predicate, record.hits[1:])
    assert not replay(tampered)


def test_scan_respects_cell_cap():
    with use_caps(cap_cells=10):
        with pytest.raises(BoxTooLarge):
            oracle_lattice_scan(Lattice.standard(2), ((0, 3), (0, 3)), ScanPredicate("primitive"))


# ============================================================
# mld DE RÉFÉRENCE
# ============================================================

@pytest.mark.parametrize(
    "name, cap, expected",
    [("p1xa1", 1, 1), ("cyclic_2_11", 1, 1), ("a3_smooth", 3, 3), ("a2_mixed", 1, F(5, 6)), ("cyclic_5_12", 1, F(3, 5))],
)
def test_oracle_mld(name, cap, expected):
    g = load_fixture(name)
    assert oracle_mld(g, cap) == expected == mld_fiber(g)[0]


def test_oracle_mld_cap_too_small():
    with pytest.raises(CapTooSmall):
        oracle_mld(load_fixture("a3_smooth"), 2)


# ============================================================
# γ DE RÉFÉRENCE
# ============================================================

@pytest.mark.parametrize(
    "p, expected",
    [
        (Polyhedron.interval(F(-1, 3), F(4, 3)), F(1, 5)),
        (Polyhedron.interval(-1, F(5, 2)), F(3, 7)),
        (Polyhedron.from_vrep([(-1, -1), (-1, 1), (1, -1), (1, 1)]), F(1, 2)),
    ],
)
def test_oracle_gamma_agrees(p, expected):
    lat = Lattice.standard(p.dim)
    assert oracle_gamma(lat, p) == expected == pikhurko_constant(lat, p)[0]


def test_oracle_gamma_without_interior_point():
    with pytest.raises(NoInteriorLatticePoint):
        oracle_gamma(Lattice.standard(1), Polyhedron.interval(0, 1))
