"""
Unit tests for finite subgroups of GL2 over the maximal orders of the
exceptional 2x2 algebras.
"""

import pytest

from src.app.errors import InvalidActionError, ParameterMismatchError
from src.app.services.fixtures import load_fixture
from src.app.services.group_spec import build
from src.app.services.groups import is_isomorphic
from src.app.services.subgroup_analysis import (
    Imprimitivity,
    MatrixGroupOverOrder,
    Zassenhaus,
    admissible_orders,
    division_span_catalog,
    embeds_in_spanning_catalog,
    get_ambient,
    is_imprimitive,
    is_spanning,
    max_imprimitive,
    max_imprimitive_order,
    monomial_group,
    order_spectrum_admissible,
    quadratic_embeds,
    span_dimension,
    spanning_catalog,
    type_constructor,
    zassenhaus_embed,
)
from src.app.services.wedderburn import decompose

MAT5_48_33 = "Mat(5)<[2,0;0,3],[0,1;4,0],[1,1;2,3],[2,0;0,2]>"

SWAP = [[0], [1], [1], [0]]

# (ambient, generators, spans the ambient); each entry is its coordinate list
MATRIX_GROUPS = [
    ("Z", [[[1], [-1], [1], [0]], SWAP], True),
    ("Z", [[[0], [-1], [1], [-1]], SWAP], True),
    ("Z", [[[0], [-1], [1], [0]]], False),
    ("I1", [[[0, 1], [0, 0], [0, 0], [0, -1]], [[0, 0], [1, 0], [-1, 0], [0, 0]]], False),
    (
        "I1",
        [[[0, 1], [0, 0], [0, 0], [0, -1]], [[0, 0], [1, 0], [-1, 0], [0, 0]], [[0, 1], [0, 0], [0, 0], [0, 1]]],
        True,
    ),
    ("O2", [[[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]], [[0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0]]], True),
    ("O2", [[[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0]], [[0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0]]], False),
]


class TestAmbients:
    @pytest.mark.parametrize(
        "name,key",
        [("I3", "I3"), ("i3", "I3"), ("M2(Q(sqrt(-3)))", "I3"), ("m2(o2)", "O2"), (" M2( H3 ) ", "O3"), ("M2(Q)", "Z")],
    )
    def test_lookup(self, name, key):
        assert get_ambient(name).key == key

    def test_unknown_ambient(self):
        with pytest.raises(ParameterMismatchError):
            get_ambient("I7")

    def test_dimensions(self):
        assert get_ambient("Z").dimension == 4
        assert get_ambient("I2").dimension == 8
        assert get_ambient("O5").dimension == 16
        assert not get_ambient("O3").is_commutative

    def test_entry_arithmetic(self):
        amb = get_ambient("I3")
        omega = amb.element(["-1/2", "1/2"])
        assert amb.is_integral(omega)
        assert amb.norm(omega) == 1
        assert amb.mul(omega, amb.inverse(omega)) == amb.scalar(1)
        assert len(amb.roots_of_unity()) == 6


class TestMatrixGroups:
    def test_monomial_group_of_rational_matrices(self):
        H = monomial_group("Z")
        assert H.order == 8
        assert is_spanning(H)
        assert is_isomorphic(H.abstract(), build("D8"))
        result = is_imprimitive(H)
        assert result.kind == Imprimitivity.SWAP
        assert result.stabilizer_order == 4
        assert result.to_dict()["lines"] == ["(0)", "inf"]

    def test_diagonal_group_is_decomposable(self):
        H = MatrixGroupOverOrder.generate("Z", [[[-1], [0], [0], [1]]])
        assert H.order == 2
        assert span_dimension(H) == 2
        assert not is_spanning(H)
        assert is_imprimitive(H).kind == Imprimitivity.DECOMPOSABLE

    def test_entries_must_be_integral(self):
        with pytest.raises(InvalidActionError):
            MatrixGroupOverOrder.generate("Z", [[["1/2"], [0], [0], [1]]])

    def test_gaussian_monomial_group(self):
        H = monomial_group("I1")
        assert H.order == max_imprimitive_order("I1")
        assert is_spanning(H)

    def test_maximal_imprimitive_groups(self):
        assert max_imprimitive("I1").order == 32
        assert is_isomorphic(max_imprimitive("I1"), build("(C4xC4):C2(swap)"))
        assert max_imprimitive_order("Z") == 8
        assert max_imprimitive_order("I3") == 72
        assert max_imprimitive_order("O2") == 1152

    @pytest.mark.parametrize("ambient,generators,spans", MATRIX_GROUPS)
    def test_spanning_group_has_ambient_component(self, ambient, generators, spans):
        H = MatrixGroupOverOrder.generate(ambient, generators)
        assert is_spanning(H) is spans
        names = decompose(H.abstract()).names()
        if spans:
            assert get_ambient(ambient).algebra in names

    @pytest.mark.parametrize("ambient", ["Z", "I1", "I2", "I3"])
    def test_monomial_groups_against_decomposition(self, ambient):
        H = monomial_group(ambient)
        names = decompose(H.abstract()).names()
        assert is_spanning(H) is (get_ambient(ambient).algebra in names)

    @pytest.mark.parametrize(
        "row",
        [r for r in load_fixture("imprimitive", "core") if r["maximal"] == r["isomorphic"] == "yes"],
        ids=lambda r: r["ambient"],
    )
    def test_maximal_orders_match_reference(self, row):
        expected = int(row["spanning_id"].strip("[]").split(",")[0])
        assert max_imprimitive_order(row["ambient"]) == expected


class TestQuadraticSubfields:
    @pytest.mark.parametrize("row", load_fixture("embeddings"))
    def test_reference_cells(self, row):
        result = quadratic_embeds(int(row["d"]), (int(row["a"]), int(row["b"])))
        assert result.in_table
        assert result.agrees is True

    def test_outside_table(self):
        result = quadratic_embeds(5, (1, 1))
        assert not result.in_table
        assert result.agrees is None
        assert result.to_dict()["symbol"] == [-1, -1]

    @pytest.mark.parametrize("d,symbol", [(4, (1, 1)), (0, (1, 1)), (2, (-1, 1))])
    def test_invalid_arguments(self, d, symbol):
        with pytest.raises(ParameterMismatchError):
            quadratic_embeds(d, symbol)


class TestAdmissibleOrders:
    @pytest.mark.parametrize(
        "ambient,expected",
        [
            ("Z", {1, 2, 3, 4, 6}),
            ("I1", {1, 2, 3, 4, 6, 8, 12}),
            ("I2", {1, 2, 3, 4, 6, 8}),
            ("I3", {1, 2, 3, 4, 6, 12}),
            ("O3", {1, 2, 3, 4, 5, 6, 8, 10, 12}),
        ],
    )
    def test_orders(self, ambient, expected):
        assert admissible_orders(ambient) == frozenset(expected)

    def test_spectrum(self):
        Q16 = build("Q16")
        assert order_spectrum_admissible(Q16, "I1")
        assert not order_spectrum_admissible(Q16, "Z")


class TestZassenhaus:
    def test_spanning_catalog(self):
        assert [e.row_id for e in spanning_catalog("Z")] == ["[6,1]", "[8,3]", "[12,4]"]
        assert [e.row_id for e in spanning_catalog("I2", "core")] == ["[16,8]"]

    def test_conjugate_into_catalog_group(self):
        result = zassenhaus_embed(build("D12"), "I2")
        assert result.verdict == Zassenhaus.CONJUGATE_INTO
        assert result.witness == "[48,29]"
        assert result.ambient == "M2(Q(sqrt(-2)))"

    def test_listed_exception(self):
        result = zassenhaus_embed(build(MAT5_48_33), "O3")
        assert result.verdict == Zassenhaus.EXCEPTED
        assert result.witness == "[48,33]"

    @pytest.mark.parametrize("spec,ambient", [("C5", "I1"), ("Q8", "Z")])
    def test_no_embedding(self, spec, ambient):
        result = zassenhaus_embed(build(spec), ambient)
        assert result.verdict == Zassenhaus.NONE
        assert result.witness is None

    def test_spanning_catalog_union(self):
        assert embeds_in_spanning_catalog(build("Q8"))


class TestDivisionSpans:
    def test_rational_types_are_verified(self):
        types = division_span_catalog("Z")
        assert [t.name for t in types] == ["C1", "C2", "C3", "C6"]
        assert all(t.verified for t in types)

    def test_named_types(self):
        assert type_constructor("SL2F3") == "SL(2,3)"
        assert type_constructor("SU2F3") == "CSU(2,3)"
        assert type_constructor("Q12") == "Q12"
