"""Portrait rendering: structure, marker inventory, determinism.

Marker counts follow the report inventory: the family always has six
equator markers (three antipodal direction pairs), the two blown-up axis
ends get sector glyphs (two filled nodal wedges and two open saddle
wedges each), and p < 0 adds four off-origin finite equilibria.
"""

from fractions import Fraction

import pytest

from darbouxcubic.report import build_family_report
from darbouxcubic.svg import render_portrait
from darbouxcubic.system import family_two

F = Fraction


@pytest.fixture(scope="module")
def p1():
    report = build_family_report(F(1))
    return report, render_portrait(family_two(F(1)), report)


@pytest.fixture(scope="module")
def pm1():
    report = build_family_report(F(-1))
    return report, render_portrait(family_two(F(-1)), report)


class TestDocument:
    def test_svg_one_one_header(self, p1):
        _report, svg = p1
        assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" version="1.1"')
        assert svg.rstrip().endswith("</svg>")
        assert 'viewBox="-1.1 -1.1 2.2 2.2"' in svg

    def test_disk_boundary(self, p1):
        _report, svg = p1
        assert '<circle class="boundary" cx="0" cy="0" r="1"/>' in svg

    def test_no_nan_coordinates(self, pm1):
        _report, svg = pm1
        assert "nan" not in svg
        assert "inf" not in svg


class TestInventory:
    def test_marker_count_matches_report(self, p1, pm1):
        for report, svg in (p1, pm1):
            finite = len(report["finite_equilibria"])
            equator_pairs = len(report["equator_equilibria"])
            assert svg.count('<g class="marker"') == finite + 2 * equator_pairs

    def test_p1_has_seven_markers(self, p1):
        _report, svg = p1
        assert svg.count('<g class="marker"') == 7  # origin + 3 antipodal pairs

    def test_pm1_adds_four_finite_markers(self, pm1):
        _report, svg = pm1
        assert svg.count('<g class="marker"') == 11

    def test_sector_glyphs_at_both_axis_ends(self, p1):
        _report, svg = p1
        assert svg.count('class="sector-nodal"') == 4
        assert svg.count('class="sector-saddle"') == 4
        assert svg.count("<title>nodal sector</title>") == 4
        assert svg.count("<title>saddle sector</title>") == 4

    def test_saddle_markers_shaped_as_crosses(self, pm1):
        report, svg = pm1
        saddles = sum(
            1
            for r in report["finite_equilibria"]
            if r["classification"]["category"] == "saddle"
        )
        assert saddles == 2
        assert svg.count("<title>saddle</title>") >= saddles

    def test_separatrices_present(self, pm1):
        _report, svg = pm1
        # 4 rays per finite saddle x2, 2 divisor-saddle curves, 2 axis rays
        assert svg.count('class="separatrix"') + svg.count('class="axis"') >= 12

    def test_orbit_layer_and_arrows(self, p1):
        _report, svg = p1
        assert svg.count('class="orbit"') >= 20
        assert svg.count('class="arrow"') >= 20
        assert svg.count('class="arrow-sep"') >= 4


class TestDeterminism:
    def test_byte_identical(self, p1):
        report, svg = p1
        assert render_portrait(family_two(F(1)), report) == svg

    def test_seed_changes_orbits_only(self, p1):
        report, svg = p1
        other = render_portrait(family_two(F(1)), report, seed=7)
        assert other != svg
        assert other.count('<g class="marker"') == svg.count('<g class="marker"')

    def test_orbit_count_zero_keeps_structure(self, pm1):
        report, _svg = pm1
        bare = render_portrait(family_two(F(-1)), report, orbit_count=0)
        assert bare.count('class="orbit"') == 0
        assert bare.count('<g class="marker"') == 11
        assert 'class="separatrix"' in bare
