"""Tests for complex-literal and curve-spec parsing and for output formatting."""

import math

import pytest

from cauchy_szego.errors import DomainError, PoleError, SpecParseError, UnboundedCurveError
from cauchy_szego.geometry import INFINITY, Circle, Ellipse, Sampled, WedgeBoundary, mobius_apply
from utils.formatters import emit, format_number, format_point, render_rows, to_json
from utils.parsers import build_curve, parse_complex, parse_curve_spec, parse_float_list


class TestParseComplex:
    @pytest.mark.parametrize("text,expected", [
        ("0.2+0.1i", 0.2 + 0.1j),
        ("1-2.5i", 1 - 2.5j),
        ("3", 3 + 0j),
        ("-4.5", -4.5 + 0j),
        ("2i", 2j),
        ("i", 1j),
        ("-i", -1j),
        ("1+i", 1 + 1j),
        ("1e-3i", 1e-3j),
        ("1+0i", 1 + 0j),
        (" 0.5 - 0.5i ", 0.5 - 0.5j),
    ])
    def test_literals(self, text, expected):
        assert parse_complex(text) == expected

    def test_infinity(self):
        assert parse_complex("inf") is INFINITY

    @pytest.mark.parametrize("text", ["", "abc", "1+2j", "(1+2i)", "1+2i+3", "infinity", "--1"])
    def test_malformed(self, text):
        with pytest.raises(SpecParseError):
            parse_complex(text)

    def test_format_round_trip(self):
        for z in (0.2 + 0.1j, -1.5 - 1e-7j, complex(math.pi, -math.e)):
            assert parse_complex(format_point(z)) == z
        assert format_point(INFINITY) == "inf"


class TestParseFloatList:
    def test_box(self):
        assert parse_float_list("-6,6,-1.5,1.5", 4, "--box") == [-6.0, 6.0, -1.5, 1.5]

    def test_wrong_count(self):
        with pytest.raises(SpecParseError):
            parse_float_list("1,2,3", 4, "--box")

    def test_non_numeric(self):
        with pytest.raises(SpecParseError):
            parse_float_list("1,x", 2, "--res")


class TestParseCurveSpec:
    def test_circle_defaults(self):
        parsed = parse_curve_spec("circle")
        assert parsed["family"] == "circle"
        assert parsed["params"] == {"cx": 0.0, "cy": 0.0, "r": 1.0}
        assert parsed["mobius"] is None
        assert parsed["curve"] == Circle()

    def test_circle_explicit(self):
        parsed = parse_curve_spec("circle:cx=1,cy=-2,r=0.5")
        assert parsed["curve"] == Circle(center=1 - 2j, radius=0.5)

    def test_ellipse_and_wedge(self):
        assert parse_curve_spec("ellipse:r=2")["curve"] == Ellipse(r=2.0)
        wedge = parse_curve_spec("wedge:theta=0.3926990817")["curve"]
        assert isinstance(wedge, WedgeBoundary)
        assert abs(wedge.theta - math.pi / 8) < 1e-10

    @pytest.mark.parametrize("spec", [
        "square:side=1",
        "Ellipse:r=2",
        "ellipse",
        "ellipse:r=2,s=3",
        "ellipse:r=2,r=3",
        "ellipse:r=two",
        "ellipse:r",
        "mobius(1,0,0)*ellipse:r=2",
        "mobius(1,0,0,inf)*ellipse:r=2",
    ])
    def test_parse_errors(self, spec):
        with pytest.raises(SpecParseError):
            parse_curve_spec(spec)

    @pytest.mark.parametrize("spec", [
        "ellipse:r=0.5",
        "wedge:theta=2",
        "circle:r=0",
        "mobius(1,1,1,1)*circle",
    ])
    def test_domain_errors(self, spec):
        with pytest.raises(DomainError):
            parse_curve_spec(spec)

    def test_mobius_prefix(self):
        parsed = parse_curve_spec("mobius(1,0.25i,1,-3.5)*ellipse:r=2")
        M = parsed["mobius"]
        assert (M.a, M.b, M.c, M.d) == (1, 0.25j, 1, -3.5)
        assert parsed["curve"] == Ellipse(r=2.0)

    def test_nested_mobius_composes_outer_first(self):
        parsed = parse_curve_spec("mobius(2,0,0,1)*mobius(1,1,0,1)*circle")
        # z ↦ 2(z + 1)
        assert mobius_apply(parsed["mobius"], 0.5 + 0j) == 3.0

    def test_build_curve(self):
        assert build_curve(parse_curve_spec("ellipse:r=2"), 64) == Ellipse(r=2.0)
        image = build_curve(parse_curve_spec("mobius(0,1,1,0)*ellipse:r=2"), 64)
        assert isinstance(image, Sampled)
        assert image.n == 64
        assert image.orientation == -1

    def test_build_curve_errors(self):
        with pytest.raises(PoleError):
            build_curve(parse_curve_spec("mobius(1,0,1,-1)*circle"), 64)
        with pytest.raises(UnboundedCurveError):
            build_curve(parse_curve_spec("mobius(0,1,1,0)*wedge:theta=0.5"), 64)


class TestFormatters:
    def test_number(self):
        assert format_number(0.1) == "0.10000000000000001"
        assert format_number(1.0) == "1"

    def test_point(self):
        assert format_point(1 - 2j) == "1-2i"
        assert format_point(0.5 + 0j) == "0.5+0i"

    def test_csv(self):
        text = render_rows([{"x": 0.5, "y": -1.0, "lambda": 1.25, "regime": "interior"}],
                           ["x", "y", "lambda", "regime"])
        assert text == "x,y,lambda,regime\n0.5,-1,1.25,interior\n"

    def test_json_rows(self):
        text = render_rows([{"phi": 0.0, "lambda": 1.5}], ["phi", "lambda"], "json")
        assert text == '[\n  {"phi": 0, "lambda": 1.5}\n]\n'

    def test_json_non_finite(self):
        assert to_json({"accuracy": float("nan"), "ok": True, "name": "x"}) == \
            '{"accuracy": null, "ok": true, "name": "x"}'

    def test_emit(self, tmp_path, capsys):
        emit("a,b\n")
        assert capsys.readouterr().out == "a,b\n"
        target = tmp_path / "out.csv"
        emit("a,b\n", target)
        assert target.read_text() == "a,b\n"
        with pytest.raises(OSError):
            emit("a,b\n", tmp_path / "missing" / "out.csv")
