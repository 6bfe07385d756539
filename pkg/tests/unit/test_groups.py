"""
Unit tests for multiplication-table groups, their constructors and subgroup
structure.
"""

from itertools import combinations, product

import pytest

from src.app.errors import ElementCapError, InvalidActionError, LatticeTooLargeError, NotNormalError, UndecidedError
from src.app.services.groups import (
    FiniteGroup,
    abelian,
    binary_octahedral,
    center,
    cyclic,
    derived_length,
    derived_subgroup,
    dicyclic,
    dihedral,
    direct_product,
    find_embedding,
    fitting_subgroup,
    general_linear,
    group_exponent,
    is_isomorphic,
    is_normal,
    matrix_group,
    maximal_abelian_over,
    metacyclic,
    modular,
    nilpotency_class,
    normal_subgroups,
    p_core,
    power_action,
    quotient,
    semidihedral,
    semidirect_product,
    special_linear,
    spectrum,
    subgroup_class_representatives,
    subgroup_embeds,
    subgroups,
    unit_group,
    wreath_square,
)

# Latin square with identity 0 that is not associative: 1 * 1 = 0 is impossible in C5
LOOP5 = (
    (0, 1, 2, 3, 4),
    (1, 0, 3, 4, 2),
    (2, 4, 0, 1, 3),
    (3, 2, 4, 0, 1),
    (4, 3, 1, 2, 0),
)


def _loop_times_cyclic(n):
    """LOOP5 x C_n, indexed a * n + k."""
    return tuple(
        tuple(LOOP5[a][b] * n + (k + l) % n for b in range(5) for l in range(n))
        for a in range(5)
        for k in range(n)
    )


def _canonical_form(G):
    """Least relabelled table over all minimal generating tuples, elements in breadth-first word order."""
    n = G.order
    for d in range(n):
        best = None
        for gens in product(range(1, n), repeat=d):
            order, index = [0], {0: 0}
            for x in order:
                for g in gens:
                    y = G.mul[x][g]
                    if y not in index:
                        index[y] = len(order)
                        order.append(y)
            if len(order) < n:
                continue
            table = tuple(tuple(index[G.mul[x][y]] for y in order) for x in order)
            if best is None or table < best:
                best = table
        if best is not None:
            return best
    raise AssertionError("no generating tuple found")


class TestConstruction:
    """Constructors produce valid tables of the expected shape."""

    def test_table_must_be_latin_square(self):
        with pytest.raises(InvalidActionError):
            FiniteGroup("bad", ((0, 1), (1, 1)))

    def test_columns_must_be_permutations(self):
        with pytest.raises(InvalidActionError, match="column 1"):
            FiniteGroup("bad", ((0, 1, 2), (1, 2, 0), (2, 1, 0)))

    def test_non_associative_loop_rejected(self):
        with pytest.raises(InvalidActionError, match="associativity"):
            FiniteGroup("loop", LOOP5)

    def test_associativity_sampled_above_exhaustive_limit(self):
        table = _loop_times_cyclic(14)
        assert len(table) == 70
        with pytest.raises(InvalidActionError, match="associativity"):
            FiniteGroup("loop x C14", table)

    def test_large_valid_table_accepted(self):
        assert FiniteGroup("C72", cyclic(72).mul).order == 72

    @pytest.mark.parametrize(
        "group,order,spec",
        [
            (cyclic(12), 12, {1, 2, 3, 4, 6, 12}),
            (dihedral(8), 8, {1, 2, 4}),
            (dicyclic(8), 8, {1, 2, 4}),
            (dicyclic(12), 12, {1, 2, 3, 4, 6}),
            (semidihedral(16), 16, {1, 2, 4, 8}),
            (modular(16), 16, {1, 2, 4, 8}),
            (special_linear(3), 24, {1, 2, 3, 4, 6}),
            (general_linear(3), 48, {1, 2, 3, 4, 6, 8}),
        ],
    )
    def test_order_and_spectrum(self, group, order, spec):
        assert group.order == order
        assert spectrum(group) == frozenset(spec)

    def test_quaternion_group_has_one_involution(self):
        Q8 = dicyclic(8)
        assert list(Q8.orders).count(2) == 1
        assert center(Q8).order == 2

    def test_invalid_metacyclic_parameters(self):
        with pytest.raises(InvalidActionError):
            metacyclic(5, 2, 2)
        with pytest.raises(InvalidActionError):
            dihedral(7)
        with pytest.raises(InvalidActionError):
            semidihedral(8)

    def test_binary_octahedral(self):
        G = binary_octahedral()
        assert G.order == 48
        assert G.name == "CSU(2,3)"
        assert subgroup_embeds(dicyclic(16), G)
        assert subgroup_embeds(special_linear(3), G)
        assert not is_isomorphic(G, general_linear(3))

    def test_singular_matrix_rejected(self):
        with pytest.raises(InvalidActionError):
            matrix_group(5, [[[1, 1], [1, 1]]])

    def test_closure_cap(self):
        with pytest.raises(ElementCapError):
            matrix_group(5, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]], cap=50)

    def test_unit_groups(self):
        assert unit_group("O2").order == 24
        assert unit_group("i3").order == 6
        with pytest.raises(InvalidActionError):
            unit_group("O7")


class TestProducts:
    def test_direct_product(self):
        G = direct_product(cyclic(3), dicyclic(8))
        assert G.order == 24
        assert G.name == "C3xQ8"
        assert center(G).order == 6

    def test_semidirect_product_by_inversion_is_dihedral(self):
        C3 = cyclic(3)
        G = semidirect_product(C3, cyclic(2), [power_action(C3, -1)])
        assert is_isomorphic(G, dihedral(6))

    def test_action_must_be_homomorphism(self):
        C5 = cyclic(5)
        with pytest.raises(InvalidActionError):
            semidirect_product(C5, cyclic(2), [power_action(C5, 2)])

    def test_power_action_needs_abelian_normal_factor(self):
        with pytest.raises(InvalidActionError):
            power_action(dihedral(6), -1)
        with pytest.raises(InvalidActionError):
            power_action(cyclic(6), 2)

    def test_wreath_square(self):
        assert is_isomorphic(wreath_square(cyclic(2)), dihedral(8))
        assert wreath_square(cyclic(4)).order == 32


class TestSubgroupStructure:
    """Lattices, normal subgroups, series and the Fitting subgroup."""

    def test_subgroup_counts(self):
        assert len(subgroups(dihedral(8))) == 10
        assert len(subgroups(dicyclic(8))) == 6
        assert len(normal_subgroups(dihedral(8))) == 6

    def test_subgroup_classes_of_d8(self):
        assert len(subgroup_class_representatives(dihedral(8))) == 8

    def test_lattice_cap(self):
        with pytest.raises(LatticeTooLargeError):
            subgroups(cyclic(20), cap=10)

    def test_conjugacy_classes(self):
        assert len(dihedral(8).classes) == 5
        assert len(special_linear(3).classes) == 7

    def test_series_invariants(self):
        assert nilpotency_class(dihedral(8)) == 2
        assert nilpotency_class(semidihedral(16)) == 3
        assert nilpotency_class(dihedral(6)) is None
        assert derived_length(special_linear(3)) == 3
        assert derived_length(general_linear(3)) == 4
        assert derived_length(special_linear(5)) is None

    def test_fitting_subgroup(self):
        assert fitting_subgroup(dihedral(6)).order == 3
        assert fitting_subgroup(special_linear(3)).order == 8
        assert p_core(special_linear(3), 3).order == 1
        assert fitting_subgroup(dicyclic(8)).order == 8

    @pytest.mark.parametrize(
        "group",
        [dihedral(6), dihedral(12), dicyclic(12), special_linear(3), general_linear(3), metacyclic(5, 8, 2), binary_octahedral()],
        ids=lambda G: G.name,
    )
    def test_fitting_subgroup_is_product_of_nilpotent_normal_subgroups(self, group):
        nilpotent = [N for N in normal_subgroups(group) if nilpotency_class(group, N) is not None]
        product_of_all = group.subgroup(set().union(*(N.elements for N in nilpotent)))
        assert nilpotency_class(group, product_of_all) is not None
        assert fitting_subgroup(group).elements == product_of_all.elements

    def test_derived_subgroup(self):
        assert derived_subgroup(dihedral(8)).order == 2
        assert derived_subgroup(special_linear(3)).order == 8
        assert derived_subgroup(cyclic(5)).is_trivial()

    def test_exponent(self):
        assert group_exponent(dihedral(8)) == 4
        assert group_exponent(special_linear(3)) == 12

    def test_maximal_abelian_subgroups(self):
        D8 = dihedral(8)
        maximal = maximal_abelian_over(D8, D8.trivial())
        assert sorted(S.order for S in maximal) == [4, 4, 4]


class TestQuotients:
    def test_quotient_by_center(self):
        D8 = dihedral(8)
        Q, hom = quotient(D8, center(D8))
        assert Q.order == 4
        assert spectrum(Q) == frozenset({1, 2})
        assert hom.kernel().elements == center(D8).elements
        assert hom.image().order == 4

    def test_non_normal_subgroup_rejected(self):
        D6 = dihedral(6)
        reflection = next(x for x in range(D6.order) if D6.orders[x] == 2)
        S = D6.subgroup([reflection])
        assert not is_normal(D6, S)
        with pytest.raises(NotNormalError):
            quotient(D6, S)


class TestEmbeddings:
    def test_embedding_is_injective_homomorphism(self):
        hom = find_embedding(dicyclic(8), special_linear(3))
        assert hom is not None
        assert hom.is_injective()
        H = hom.domain
        for x in range(H.order):
            for y in range(H.order):
                assert hom(H.mul[x][y]) == hom.codomain.mul[hom(x)][hom(y)]

    def test_no_embedding(self):
        assert find_embedding(dihedral(8), special_linear(3)) is None
        assert find_embedding(cyclic(5), dicyclic(8)) is None

    def test_budget_exhaustion_is_undecided(self):
        with pytest.raises(UndecidedError):
            find_embedding(dihedral(8), general_linear(3), budget=1)

    def test_isomorphism(self):
        assert is_isomorphic(dicyclic(12), metacyclic(3, 4, -1))
        assert not is_isomorphic(dihedral(8), dicyclic(8))
        assert not is_isomorphic(cyclic(8), dicyclic(8))

    def test_isomorphism_agrees_with_canonical_forms(self):
        groups = [
            cyclic(8), abelian(2, 4), abelian(2, 2, 2), dihedral(8), dicyclic(8),
            cyclic(12), abelian(2, 6), dihedral(12), dicyclic(12), metacyclic(3, 4, -1),
            direct_product(cyclic(2), dihedral(6)), direct_product(cyclic(3), cyclic(4)),
            cyclic(16), abelian(4, 4), abelian(2, 8), dihedral(16), dicyclic(16), semidihedral(16), modular(16),
            direct_product(cyclic(2), dihedral(8)), direct_product(cyclic(2), dicyclic(8)), direct_product(cyclic(4), cyclic(4)),
        ]
        forms = [_canonical_form(G) for G in groups]
        pairs = 0
        for (G, f), (H, h) in combinations(zip(groups, forms), 2):
            if G.order != H.order:
                continue
            pairs += 1
            assert is_isomorphic(G, H) == (f == h), (G.name, H.name)
        assert pairs > 50
